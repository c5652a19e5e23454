#pragma once

// The three non-semantic retrieval channels: Okapi BM25 over an inverted
// index, spreading activation over the entity co-occurrence graph, and
// date-proximity scoring. Each produces an independently ranked list.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mnemo/common.hpp"

namespace mnemo::channels {

inline constexpr std::size_t kDefaultTopN = 50;

struct RankedCandidate {
    MemoryId id = 0;
    double score = 0.0;
    std::size_t rank = 0; // 1-based, no gaps

    friend bool operator==(const RankedCandidate&, const RankedCandidate&) = default;
};

using RankedList = std::vector<RankedCandidate>;

/// Sorts by score descending then id ascending, truncates to top_n and
/// assigns ranks 1..n.
RankedList rank_scores(std::vector<std::pair<MemoryId, double>> scores, std::size_t top_n);

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

class Bm25Index {
  public:
    explicit Bm25Index(Bm25Params params = {}) : params_(params) {}

    /// Replaces any previous document with the same id.
    void add_document(MemoryId id, const std::vector<std::string>& tokens);
    void remove_document(MemoryId id);

    /// Inserts one persisted posting; doc lengths must be set separately.
    void add_posting(const std::string& term, MemoryId id, std::uint32_t tf);
    void set_doc_length(MemoryId id, std::uint32_t length);

    std::size_t doc_count() const { return doc_lengths_.size(); }
    double avg_doc_length() const;
    const Bm25Params& params() const { return params_; }
    const std::map<std::string, std::map<MemoryId, std::uint32_t>>& postings() const { return postings_; }
    const std::map<MemoryId, std::uint32_t>& doc_lengths() const { return doc_lengths_; }

    /// ln((N - n_t + 0.5) / (n_t + 0.5) + 1); 0 for unknown terms.
    double idf(const std::string& term) const;

    /// Duplicate query terms count once.
    double score(const std::vector<std::string>& query_terms, MemoryId id) const;

    RankedList search(std::string_view query, std::size_t top_n = kDefaultTopN) const;

  private:
    Bm25Params params_;
    std::map<std::string, std::map<MemoryId, std::uint32_t>> postings_;
    std::map<MemoryId, std::uint32_t> doc_lengths_;
    std::uint64_t total_length_ = 0;
};

class EntityGraph {
  public:
    void add_node(const EntityId& e);
    /// Weight must be in (0, 1]; self-loops are rejected. Re-adding replaces.
    void add_edge(const EntityId& a, const EntityId& b, double weight);
    void add_mention(const EntityId& e, MemoryId m);
    /// Drops the memory from every mention set; nodes and edges stay.
    void remove_memory(MemoryId m);

    bool contains(const EntityId& e) const { return adjacency_.contains(e); }
    const std::map<EntityId, std::map<EntityId, double>>& adjacency() const { return adjacency_; }
    const std::set<MemoryId>& mentions(const EntityId& e) const;
    const std::map<EntityId, std::set<MemoryId>>& all_mentions() const { return mentions_; }

  private:
    std::map<EntityId, std::map<EntityId, double>> adjacency_;
    std::map<EntityId, std::set<MemoryId>> mentions_;
};

struct ActivationParams {
    std::size_t max_hops = 3;
    double decay = 0.7;
};

/// Breadth-first propagation from seeds at activation 1. A node first reached
/// at hop h takes the max over frontier neighbours of activation * decay * w.
/// Unknown seeds are ignored.
std::map<EntityId, double> spread_activation(const EntityGraph& g, const std::set<EntityId>& seeds,
                                             const ActivationParams& p = {});

/// Memory score = sum of the activations of the entities it mentions.
RankedList entity_channel(const EntityGraph& g, const std::set<EntityId>& query_entities,
                          std::size_t top_n = kDefaultTopN, const ActivationParams& p = {});

struct TemporalRecord {
    MemoryId id = 0;
    Timestamp observed_at = 0;
    std::optional<Timestamp> refers_to;
    std::optional<Timestamp> valid_from;
    std::optional<Timestamp> valid_until;
};

struct TemporalParams {
    double tau_days = 30.0;
    double expired_penalty = 0.5;
};

/// exp(-|delta days| / tau). With an anchor, delta is measured against
/// refers_to (else observed_at) and the penalty applies when the anchor lies
/// outside a present validity bound. Without one, delta is now - observed_at.
double temporal_score(const TemporalRecord& r, std::optional<Timestamp> anchor, Timestamp now,
                      const TemporalParams& p = {});

RankedList temporal_channel(const std::vector<TemporalRecord>& records, std::optional<Timestamp> anchor,
                            Timestamp now, std::size_t top_n = kDefaultTopN, const TemporalParams& p = {});

} // namespace mnemo::channels
