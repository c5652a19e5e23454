#pragma once

// Single-file durable memory store (SQLite, WAL journal) with the eleven-step
// ingestion pipeline, profile isolation, provenance, erasure and maintenance.
// Every row carries a profile id and every profile-scoped call filters on it.

#include <array>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mnemo/adapters.hpp"
#include "mnemo/channels.hpp"
#include "mnemo/common.hpp"
#include "mnemo/info_geometry.hpp"
#include "mnemo/langevin.hpp"
#include "mnemo/sheaf.hpp"

struct sqlite3;

namespace mnemo::store {

using langevin::LifecycleState;

struct ProvenanceRecord {
    std::string session_id;
    std::optional<std::string> speaker;
    Timestamp timestamp = 0;
    std::optional<std::string> source_document;
};

/// Caller-supplied metadata for one store() call.
struct StoreMetadata {
    Timestamp timestamp = 0;
    std::string session_id;
    std::optional<std::string> speaker;
    std::optional<std::string> source_document;
    /// Overrides the date found in the content.
    std::optional<Timestamp> refers_to;
    std::optional<Timestamp> valid_from;
    std::optional<Timestamp> valid_until;
};

struct FactRecord {
    FactId id = 0;
    MemoryId memory = 0;
    EntityId subject;
    std::string predicate;
    std::string object;
    Vector embedding;
    std::string context;
    Timestamp observed_at = 0;
    bool attribute = false;
    std::optional<FactId> superseded_by;
};

struct MemoryRecord {
    MemoryId id = 0;
    std::string profile_id;
    std::string content;
    info::GaussianEmbedding embedding{{}, {}};
    std::set<EntityId> entities;
    std::vector<FactId> facts;
    std::optional<std::int64_t> scene_id;
    Timestamp t_created = 0;
    Timestamp t_accessed = 0;
    std::uint64_t n_access = 0;
    LifecycleState lifecycle = LifecycleState::Active;
    langevin::LangevinState langevin;
    ProvenanceRecord provenance;
    channels::TemporalRecord temporal;
    std::uint32_t token_count = 0;
};

struct SupersedesEdge {
    MemoryId newer = 0;
    MemoryId older = 0;
    double kappa = 0.0;
    double discrepancy = 0.0;
};

struct Rejection {
    std::string gate; // "entropy_gate"
    double entropy_bits = 0.0;
    std::size_t tokens = 0;
};

struct StoreOutcome {
    std::optional<MemoryRecord> record;
    std::optional<Rejection> rejection;
    std::vector<SupersedesEdge> supersedes;
    bool ok() const { return record.has_value(); }
};

struct ProfileValue {
    std::string value;
    MemoryId memory = 0;
};

/// Immutable read model of one profile used by retrieval.
struct Snapshot {
    std::string profile;
    std::vector<MemoryRecord> memories; // ascending id
    std::map<MemoryId, std::size_t> index;
    channels::Bm25Index bm25;
    channels::EntityGraph graph;
    std::vector<channels::TemporalRecord> temporal;
    std::map<std::int64_t, std::vector<MemoryId>> scenes;
    std::set<MemoryId> superseded; // memories with an incoming SUPERSEDES edge
    std::map<EntityId, std::map<std::string, ProfileValue>> profiles;
    std::set<EntityId> known_entities;
    Timestamp latest_observed = 0;

    const MemoryRecord* find(MemoryId id) const;
};

struct KeyCheck {
    EntityId subject;
    std::string predicate;
    sheaf::ConsistencyReport initial;
    sheaf::ConsistencyReport final;
    std::vector<SupersedesEdge> created;
};

struct CheckReport {
    double kappa = 0.0;      // largest initial kappa over keys
    std::size_t h1_dim = 0;  // summed over keys
    std::vector<KeyCheck> keys;
    std::size_t created = 0;
};

struct Stats {
    std::size_t memories = 0;
    std::size_t facts = 0;
    std::size_t superseded_facts = 0;
    std::size_t entities = 0;
    std::size_t entity_edges = 0;
    std::size_t scenes = 0;
    std::size_t supersedes_edges = 0;
    std::size_t postings = 0;
    std::array<std::size_t, 4> lifecycle{};
};

struct StoreOptions {
    std::shared_ptr<adapters::Embedder> embedder; // defaults to HashFeatureEmbedder(384)
    info::SimilarityConfig similarity;
    double entropy_threshold = 1.5;
    std::size_t min_tokens = 3;
    double tau = sheaf::kDefaultTau;
    double access_boost = 0.3;
    langevin::PotentialParams potential;
    langevin::LifecycleThresholds thresholds;
    Timestamp scene_window = 600;
    bool read_only = false;
    /// Called at every ingestion step boundary ("ingest:1" .. "ingest:11") and
    /// after each table write inside the final transaction ("persist:<table>").
    std::function<void(std::string_view)> fault_hook;
};

class Store {
  public:
    /// Opens or creates the file; ":memory:" gives a private in-memory store.
    /// A writable handle holds an exclusive lock on the file until close;
    /// a second writable open throws BusyError.
    explicit Store(const std::string& path, StoreOptions options = {});
    ~Store();
    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    void close();
    bool is_open() const { return db_ != nullptr; }
    const std::string& path() const { return path_; }
    const StoreOptions& options() const { return opts_; }
    const adapters::Embedder& embedder() const { return *opts_.embedder; }

    StoreOutcome store(std::string_view profile, std::string_view content, const StoreMetadata& meta);

    std::optional<MemoryRecord> find(std::string_view profile, MemoryId id) const;
    std::vector<MemoryRecord> memories(std::string_view profile) const;
    std::vector<FactRecord> facts(std::string_view profile) const;
    std::vector<SupersedesEdge> supersedes_edges(std::string_view profile) const;
    std::vector<std::string> profiles() const;
    Stats stats(std::string_view profile) const;

    /// n_access += 1, t_accessed = now, radial access boost, lifecycle re-derived.
    MemoryRecord record_access(std::string_view profile, MemoryId id, Timestamp now);

    std::size_t erase_memory(std::string_view profile, MemoryId id);
    std::size_t erase_profile(std::string_view profile);
    std::size_t erase_entity(std::string_view profile, const EntityId& entity);

    langevin::MaintenanceReport maintain(std::string_view profile, std::uint64_t steps, std::uint64_t seed,
                                         Timestamp now);

    /// Sweeps every (subject, predicate) key and persists new SUPERSEDES edges.
    CheckReport check(std::string_view profile);

    /// WAL checkpoint followed by VACUUM.
    void compact();

    /// One JSON object per row: {"table": name, "row": {...}}.
    void export_jsonl(std::ostream& out) const;
    /// Inserts exported rows in one transaction; id collisions abort it.
    std::size_t import_jsonl(std::istream& in);

    /// Cached per profile until the next write from any connection.
    std::shared_ptr<const Snapshot> snapshot(std::string_view profile) const;

  private:
    void require_open() const;
    void require_writable() const;
    void fault(std::string_view point) const;
    void invalidate();
    std::int64_t next_id(const char* key);
    std::int64_t data_version() const;
    std::shared_ptr<Snapshot> load_snapshot(const std::string& profile) const;
    std::vector<MemoryRecord> load_memories(const std::string& profile, std::optional<MemoryId> only) const;
    std::size_t erase_memories_locked(const std::string& profile, const std::vector<MemoryId>& ids);

    std::string path_;
    StoreOptions opts_;
    sqlite3* db_ = nullptr;
    int lock_fd_ = -1;
    mutable std::recursive_mutex mu_;
    mutable std::map<std::string, std::shared_ptr<const Snapshot>> cache_;
    mutable std::int64_t cache_version_ = -1;
};

} // namespace mnemo::store
