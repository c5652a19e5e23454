#pragma once

// Seeded synthetic evaluation harness: a conversational corpus with planted
// relevant memories, stale facts that a later memory contradicts, access
// histories, and query sets spanning the four query types.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "mnemo/fusion.hpp"
#include "mnemo/store.hpp"

namespace mnemo::bench {

struct CorpusSpec {
    std::size_t memories = 1000;
    std::size_t queries = 100;
    std::uint64_t seed = 7;
    /// Maintenance steps run between ingestion and the access replay.
    std::uint64_t maintenance_steps = 300;
};

struct CorpusMemory {
    std::string content;
    store::StoreMetadata meta;
    std::uint32_t accesses = 0;
};

struct CorpusQuery {
    std::string text;
    std::string kind; // residence, detail, profile, temporal, multi_hop
    std::set<std::size_t> relevant; // indices into Corpus::memories
};

struct Corpus {
    std::vector<CorpusMemory> memories;
    std::vector<CorpusQuery> queries;
    Timestamp now = 0;
};

Corpus generate(const CorpusSpec& spec);

/// Ingests, runs maintenance, replays accesses. Returns the memory id of every
/// corpus entry (0 for rejected entries).
std::vector<MemoryId> load(store::Store& store, const std::string& profile, const Corpus& corpus,
                           const CorpusSpec& spec);

struct Metrics {
    std::string config;
    std::size_t queries = 0;
    double ndcg10 = 0.0;
    double hit20 = 0.0;
    double mrr = 0.0;
    std::size_t trace_stages = 0;
    std::size_t channels = 0; // enabled channel lists seen in traces
};

/// Binary-relevance NDCG@k of a ranking.
double ndcg_at(const std::vector<MemoryId>& ranking, const std::set<MemoryId>& relevant, std::size_t k);

Metrics evaluate(const store::Store& store, const std::string& profile, const Corpus& corpus,
                 const std::vector<MemoryId>& ids, const std::string& name, const fusion::RetrieveOptions& opts);

} // namespace mnemo::bench
