#include "mnemo/channels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mnemo/text.hpp"

namespace mnemo::channels {

RankedList rank_scores(std::vector<std::pair<MemoryId, double>> scores, std::size_t top_n)
{
    std::sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (scores.size() > top_n) scores.resize(top_n);
    RankedList out;
    out.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out.push_back({scores[i].first, scores[i].second, i + 1});
    return out;
}

void Bm25Index::add_document(MemoryId id, const std::vector<std::string>& tokens)
{
    remove_document(id);
    std::map<std::string, std::uint32_t> tf;
    for (const auto& t : tokens) tf[t]++;
    for (const auto& [term, f] : tf) postings_[term][id] = f;
    set_doc_length(id, static_cast<std::uint32_t>(tokens.size()));
}

void Bm25Index::remove_document(MemoryId id)
{
    const auto it = doc_lengths_.find(id);
    if (it == doc_lengths_.end()) return;
    total_length_ -= it->second;
    doc_lengths_.erase(it);
    for (auto p = postings_.begin(); p != postings_.end();) {
        p->second.erase(id);
        p = p->second.empty() ? postings_.erase(p) : std::next(p);
    }
}

void Bm25Index::add_posting(const std::string& term, MemoryId id, std::uint32_t tf)
{
    if (tf == 0) throw std::invalid_argument("bm25 posting frequency must be >= 1");
    postings_[term][id] = tf;
}

void Bm25Index::set_doc_length(MemoryId id, std::uint32_t length)
{
    auto [it, inserted] = doc_lengths_.try_emplace(id, length);
    if (!inserted) {
        total_length_ -= it->second;
        it->second = length;
    }
    total_length_ += length;
}

double Bm25Index::avg_doc_length() const
{
    if (doc_lengths_.empty()) return 0.0;
    return static_cast<double>(total_length_) / static_cast<double>(doc_lengths_.size());
}

double Bm25Index::idf(const std::string& term) const
{
    const auto it = postings_.find(term);
    if (it == postings_.end()) return 0.0;
    const double n = static_cast<double>(doc_lengths_.size());
    const double nt = static_cast<double>(it->second.size());
    return std::log((n - nt + 0.5) / (nt + 0.5) + 1.0);
}

double Bm25Index::score(const std::vector<std::string>& query_terms, MemoryId id) const
{
    const auto len_it = doc_lengths_.find(id);
    if (len_it == doc_lengths_.end()) return 0.0;
    const double avgdl = avg_doc_length();
    const double norm = params_.k1 * (1.0 - params_.b + params_.b * len_it->second / avgdl);
    std::set<std::string> seen;
    double s = 0.0;
    for (const auto& t : query_terms) {
        if (!seen.insert(t).second) continue;
        const auto p = postings_.find(t);
        if (p == postings_.end()) continue;
        const auto f_it = p->second.find(id);
        if (f_it == p->second.end()) continue;
        const double f = f_it->second;
        s += idf(t) * f * (params_.k1 + 1.0) / (f + norm);
    }
    return s;
}

RankedList Bm25Index::search(std::string_view query, std::size_t top_n) const
{
    const auto terms = text::tokenize(query);
    std::set<MemoryId> docs;
    for (const auto& t : terms) {
        const auto p = postings_.find(t);
        if (p == postings_.end()) continue;
        for (const auto& [id, _] : p->second) docs.insert(id);
    }
    std::vector<std::pair<MemoryId, double>> scored;
    scored.reserve(docs.size());
    for (MemoryId id : docs) scored.emplace_back(id, score(terms, id));
    return rank_scores(std::move(scored), top_n);
}

void EntityGraph::add_node(const EntityId& e) { adjacency_.try_emplace(e); }

void EntityGraph::add_edge(const EntityId& a, const EntityId& b, double weight)
{
    if (a == b) throw std::invalid_argument("entity graph: self-loop on " + a);
    if (!(weight > 0.0 && weight <= 1.0)) throw std::invalid_argument("entity graph: edge weight outside (0, 1]");
    adjacency_[a][b] = weight;
    adjacency_[b][a] = weight;
}

void EntityGraph::add_mention(const EntityId& e, MemoryId m)
{
    add_node(e);
    mentions_[e].insert(m);
}

void EntityGraph::remove_memory(MemoryId m)
{
    for (auto it = mentions_.begin(); it != mentions_.end();) {
        it->second.erase(m);
        it = it->second.empty() ? mentions_.erase(it) : std::next(it);
    }
}

const std::set<MemoryId>& EntityGraph::mentions(const EntityId& e) const
{
    static const std::set<MemoryId> empty;
    const auto it = mentions_.find(e);
    return it == mentions_.end() ? empty : it->second;
}

std::map<EntityId, double> spread_activation(const EntityGraph& g, const std::set<EntityId>& seeds,
                                             const ActivationParams& p)
{
    std::map<EntityId, double> act;
    std::vector<EntityId> frontier;
    for (const auto& s : seeds) {
        if (!g.contains(s)) continue;
        act[s] = 1.0;
        frontier.push_back(s);
    }
    const auto& adj = g.adjacency();
    for (std::size_t hop = 1; hop <= p.max_hops && !frontier.empty(); ++hop) {
        std::map<EntityId, double> reached;
        for (const auto& u : frontier) {
            const double a = act.at(u);
            for (const auto& [v, w] : adj.at(u)) {
                if (act.contains(v)) continue;
                double& r = reached[v];
                r = std::max(r, a * p.decay * w);
            }
        }
        frontier.clear();
        for (const auto& [v, a] : reached) {
            act[v] = a;
            frontier.push_back(v);
        }
    }
    return act;
}

RankedList entity_channel(const EntityGraph& g, const std::set<EntityId>& query_entities, std::size_t top_n,
                          const ActivationParams& p)
{
    if (query_entities.empty()) return {};
    std::map<MemoryId, double> score;
    for (const auto& [e, a] : spread_activation(g, query_entities, p))
        for (MemoryId m : g.mentions(e)) score[m] += a;
    return rank_scores({score.begin(), score.end()}, top_n);
}

double temporal_score(const TemporalRecord& r, std::optional<Timestamp> anchor, Timestamp now,
                      const TemporalParams& p)
{
    if (!anchor) {
        const double days = std::abs(static_cast<double>(now - r.observed_at)) / kSecondsPerDay;
        return std::exp(-days / p.tau_days);
    }
    const Timestamp ref = r.refers_to.value_or(r.observed_at);
    const double days = std::abs(static_cast<double>(*anchor - ref)) / kSecondsPerDay;
    double s = std::exp(-days / p.tau_days);
    const bool before = r.valid_from && *anchor < *r.valid_from;
    const bool after = r.valid_until && *anchor > *r.valid_until;
    if (before || after) s *= p.expired_penalty;
    return s;
}

RankedList temporal_channel(const std::vector<TemporalRecord>& records, std::optional<Timestamp> anchor,
                            Timestamp now, std::size_t top_n, const TemporalParams& p)
{
    std::vector<std::pair<MemoryId, double>> scored;
    scored.reserve(records.size());
    for (const auto& r : records) scored.emplace_back(r.id, temporal_score(r, anchor, now, p));
    return rank_scores(std::move(scored), top_n);
}

} // namespace mnemo::channels
