#pragma once

// Query classification, weighted reciprocal rank fusion, scene expansion,
// Steiner-tree bridge discovery, reranker blending and the end-to-end
// retrieve orchestration.

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mnemo/adapters.hpp"
#include "mnemo/channels.hpp"
#include "mnemo/common.hpp"
#include "mnemo/info_geometry.hpp"
#include "mnemo/store.hpp"

namespace mnemo::fusion {

enum class Channel : std::size_t { Semantic = 0, Bm25 = 1, Entity = 2, Temporal = 3 };
inline constexpr std::size_t kChannels = 4;
using ChannelArray = std::array<double, kChannels>;

inline constexpr ChannelArray kChannelWeights{1.2, 1.0, 1.3, 1.0};
inline constexpr int kRrfK = 60;

std::string_view to_string(Channel c);

enum class QueryType { SingleHop, MultiHop, Temporal, OpenDomain };
std::string_view to_string(QueryType t);

struct QueryPlan {
    QueryType type = QueryType::SingleHop;
    ChannelArray multipliers{1.0, 1.0, 1.0, 1.0};
    std::optional<Timestamp> anchor;
    std::set<EntityId> entities; // known entities named by the query
    double alpha = 0.75;
};

/// Rule cascade: date/time expression -> Temporal; >= 2 known entities or a
/// comparative connective -> MultiHop; interrogative with no entity ->
/// OpenDomain; otherwise SingleHop.
QueryPlan classify_query(std::string_view query, const std::set<EntityId>& known);

enum class Origin { Channel, SceneExpansion, Bridge, ProfileLookup };
std::string_view to_string(Origin o);

struct FusedCandidate {
    MemoryId id = 0;
    double wrrf = 0.0;
    std::array<std::optional<std::size_t>, kChannels> ranks{};
    std::optional<double> ce;
    double final = 0.0;
    Origin origin = Origin::Channel;
};

/// nullopt marks a disabled channel.
using ChannelResults = std::array<std::optional<channels::RankedList>, kChannels>;

/// WRRF(m) = sum_i w_i mult_i / (k + r_i(m)); sorted descending, ties by id.
std::vector<FusedCandidate> wrrf_fuse(const ChannelResults& lists, const ChannelArray& weights = kChannelWeights,
                                      const ChannelArray& multipliers = {1.0, 1.0, 1.0, 1.0}, int k = kRrfK);

/// Appends scene-mates of every candidate at half the sponsor's score. A memory
/// reachable several ways keeps its best score. Result is re-sorted.
std::vector<FusedCandidate> scene_expand(std::vector<FusedCandidate> fused,
                                         const std::map<std::int64_t, std::vector<MemoryId>>& scenes);

struct SteinerTree {
    std::set<EntityId> terminals;
    std::set<EntityId> vertices;
    std::set<std::pair<EntityId, EntityId>> edges; // ordered pairs a < b
    std::map<EntityId, std::size_t> hops;          // tree distance to the nearest terminal
};

/// Metric-closure MST 2-approximation over hop distances, pruned of
/// non-terminal leaves. Terminals absent from the graph are dropped.
SteinerTree steiner_tree(const channels::EntityGraph& g, const std::set<EntityId>& terminals);

inline constexpr double kBridgeScale = 0.5;
inline constexpr double kBridgeDecay = 0.7;

/// Memories mentioning interior tree entities, scored
/// kBridgeScale * max fused wrrf * kBridgeDecay^hops. Fewer than two terminals
/// in the graph gives an empty result.
std::vector<FusedCandidate> bridge_discover(const channels::EntityGraph& g, const std::set<EntityId>& query_entities,
                                            const std::vector<FusedCandidate>& fused);

/// final = alpha logistic(ce) + (1 - alpha) wrrf, or wrrf when ce is absent.
/// Sorted descending, ties by id.
std::vector<FusedCandidate> blend_rerank(std::vector<FusedCandidate> fused, double alpha);

struct Ablation {
    bool fisher_off = false;
    bool sheaf_off = false;
    bool langevin_off = false;
    bool bm25_off = false;
    bool entity_off = false;
    bool temporal_off = false;
    bool cross_encoder_off = false;
    bool all_math_off = false;

    /// all_math_off implies fisher_off, sheaf_off and langevin_off.
    Ablation normalized() const;
    /// Comma-separated names, with or without the "_off" suffix.
    static Ablation parse(std::string_view list);
    std::string describe() const;
};

double lifecycle_weight(langevin::LifecycleState s);
inline constexpr double kSupersededFactor = 0.25;

struct RetrieveOptions {
    std::size_t top_k = 20;
    std::size_t channel_top_n = channels::kDefaultTopN;
    Ablation ablation;
    ChannelArray weights = kChannelWeights;
    int k = kRrfK;
    std::shared_ptr<adapters::Reranker> reranker; // null: no blending
    bool parallel = true;
};

struct RetrievedMemory {
    MemoryId id = 0;
    double score = 0.0;
    double wrrf = 0.0;
    std::optional<double> ce;
    Origin origin = Origin::Channel;
    std::array<std::optional<std::size_t>, kChannels> ranks{};
    langevin::LifecycleState lifecycle = langevin::LifecycleState::Active;
    bool superseded = false;
    std::string content;
};

struct TraceStage {
    std::string name;
    std::size_t in = 0;
    std::size_t out = 0;
    double millis = 0.0;
    std::vector<std::pair<MemoryId, double>> head; // first few (id, score)
};

struct Trace {
    QueryPlan plan;
    std::vector<TraceStage> stages;
    std::map<Channel, channels::RankedList> channels; // enabled channels only
    std::optional<MemoryId> profile_hit;
    double entity_coverage = 1.0;
};

struct RetrieveResult {
    std::vector<RetrievedMemory> results;
    Trace trace;
};

/// Pattern "what/who is <entity>'s <attribute>"; the attribute is returned in
/// predicate form (lowercase words joined by '_').
std::optional<std::pair<EntityId, std::string>> profile_query(std::string_view query);

/// Fraction of query entities mentioned by at least one result; 1 when the
/// query names none. Reported only, no retry decision.
double entity_coverage(const QueryPlan& plan, const std::vector<RetrievedMemory>& results,
                       const store::Snapshot& snap);

RetrieveResult retrieve(const store::Snapshot& snap, const adapters::Embedder& embedder,
                        const info::SimilarityConfig& similarity, std::string_view query,
                        const RetrieveOptions& opts = {});

RetrieveResult retrieve(const store::Store& store, std::string_view profile, std::string_view query,
                        const RetrieveOptions& opts = {});

} // namespace mnemo::fusion
