#include "mnemo/fusion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <deque>
#include <future>
#include <limits>
#include <numeric>
#include <regex>
#include <stdexcept>
#include <unordered_set>

#include "mnemo/text.hpp"

namespace mnemo::fusion {

namespace {

bool by_score(const FusedCandidate& a, double sa, const FusedCandidate& b, double sb)
{
    if (sa != sb) return sa > sb;
    return a.id < b.id;
}

void sort_by_wrrf(std::vector<FusedCandidate>& v)
{
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return by_score(a, a.wrrf, b, b.wrrf); });
}

void sort_by_final(std::vector<FusedCandidate>& v)
{
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return by_score(a, a.final, b, b.final); });
}

const std::unordered_set<std::string>& temporal_words()
{
    static const std::unordered_set<std::string> w = {
        "when", "date", "dates", "time", "year", "years", "month", "months", "week", "weeks", "day",
        "days", "ago", "yesterday", "today", "tomorrow", "before", "after", "since", "until", "during",
        "recently", "earlier", "later", "january", "february", "march", "april", "june", "july",
        "august", "september", "october", "november", "december", "monday", "tuesday", "wednesday",
        "thursday", "friday", "saturday", "sunday"};
    return w;
}

const std::unordered_set<std::string>& comparative_words()
{
    static const std::unordered_set<std::string> w = {
        "both", "compare", "compared", "comparison", "difference", "differ", "between", "connect",
        "connects", "connected", "connection", "relationship", "related", "versus", "vs", "than", "common"};
    return w;
}

const std::unordered_set<std::string>& interrogatives()
{
    static const std::unordered_set<std::string> w = {"what", "who", "whom", "whose", "which", "where", "why",
                                                      "how", "is", "are", "does", "do", "can", "should"};
    return w;
}

using Clock = std::chrono::steady_clock;

double millis_since(Clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <class It, class F>
std::vector<std::pair<MemoryId, double>> head_of(It begin, It end, F score)
{
    std::vector<std::pair<MemoryId, double>> out;
    for (auto it = begin; it != end && out.size() < 5; ++it) out.emplace_back(it->id, score(*it));
    return out;
}

} // namespace

std::string_view to_string(Channel c)
{
    switch (c) {
    case Channel::Semantic: return "semantic";
    case Channel::Bm25: return "bm25";
    case Channel::Entity: return "entity";
    case Channel::Temporal: return "temporal";
    }
    return "?";
}

std::string_view to_string(QueryType t)
{
    switch (t) {
    case QueryType::SingleHop: return "single_hop";
    case QueryType::MultiHop: return "multi_hop";
    case QueryType::Temporal: return "temporal";
    case QueryType::OpenDomain: return "open_domain";
    }
    return "?";
}

std::string_view to_string(Origin o)
{
    switch (o) {
    case Origin::Channel: return "channel";
    case Origin::SceneExpansion: return "scene_expansion";
    case Origin::Bridge: return "bridge";
    case Origin::ProfileLookup: return "profile_lookup";
    }
    return "?";
}

QueryPlan classify_query(std::string_view query, const std::set<EntityId>& known)
{
    QueryPlan plan;
    const auto tokens = text::tokenize(query);
    for (const auto& e : text::extract_entities(query, known))
        if (known.contains(e)) plan.entities.insert(e);
    plan.anchor = text::find_date(query);

    const bool temporal =
        plan.anchor || std::any_of(tokens.begin(), tokens.end(), [](const auto& t) { return temporal_words().contains(t); });
    const bool comparative =
        std::any_of(tokens.begin(), tokens.end(), [](const auto& t) { return comparative_words().contains(t); });
    const bool interrogative = query.find('?') != std::string_view::npos ||
                               (!tokens.empty() && interrogatives().contains(tokens.front()));

    if (temporal) {
        plan.type = QueryType::Temporal;
        plan.multipliers[static_cast<std::size_t>(Channel::Temporal)] = 1.5;
        plan.multipliers[static_cast<std::size_t>(Channel::Entity)] = 0.8;
        plan.alpha = 0.5;
    } else if (plan.entities.size() >= 2 || comparative) {
        plan.type = QueryType::MultiHop;
        plan.multipliers[static_cast<std::size_t>(Channel::Entity)] = 1.5;
        plan.alpha = 0.5;
    } else if (interrogative && plan.entities.empty()) {
        plan.type = QueryType::OpenDomain;
        plan.alpha = 0.75;
    } else {
        plan.type = QueryType::SingleHop;
        plan.alpha = 0.75;
    }
    return plan;
}

std::vector<FusedCandidate> wrrf_fuse(const ChannelResults& lists, const ChannelArray& weights,
                                      const ChannelArray& multipliers, int k)
{
    std::map<MemoryId, FusedCandidate> acc;
    for (std::size_t c = 0; c < kChannels; ++c) {
        if (!lists[c]) continue;
        for (const auto& r : *lists[c]) {
            auto& f = acc[r.id];
            f.id = r.id;
            f.ranks[c] = r.rank;
        }
    }
    std::vector<FusedCandidate> out;
    out.reserve(acc.size());
    for (auto& [id, f] : acc) {
        // summed in channel order so the value depends only on the ranks
        for (std::size_t c = 0; c < kChannels; ++c)
            if (f.ranks[c]) f.wrrf += weights[c] * multipliers[c] / (static_cast<double>(k) + static_cast<double>(*f.ranks[c]));
        f.final = f.wrrf;
        out.push_back(f);
    }
    sort_by_wrrf(out);
    return out;
}

std::vector<FusedCandidate> scene_expand(std::vector<FusedCandidate> fused,
                                         const std::map<std::int64_t, std::vector<MemoryId>>& scenes)
{
    std::map<MemoryId, std::int64_t> scene_of;
    for (const auto& [s, members] : scenes)
        for (MemoryId m : members) scene_of[m] = s;

    std::map<MemoryId, std::size_t> at;
    for (std::size_t i = 0; i < fused.size(); ++i) at[fused[i].id] = i;

    std::map<MemoryId, double> offered;
    for (const auto& f : fused) {
        const auto it = scene_of.find(f.id);
        if (it == scene_of.end()) continue;
        for (MemoryId mate : scenes.at(it->second)) {
            if (mate == f.id) continue;
            double& o = offered[mate];
            o = std::max(o, 0.5 * f.wrrf);
        }
    }
    for (const auto& [id, score] : offered) {
        if (const auto it = at.find(id); it != at.end()) {
            auto& f = fused[it->second];
            f.wrrf = std::max(f.wrrf, score);
            f.final = f.wrrf;
            continue;
        }
        FusedCandidate c;
        c.id = id;
        c.wrrf = c.final = score;
        c.origin = Origin::SceneExpansion;
        fused.push_back(c);
    }
    sort_by_wrrf(fused);
    return fused;
}

SteinerTree steiner_tree(const channels::EntityGraph& g, const std::set<EntityId>& terminals)
{
    SteinerTree tree;
    for (const auto& t : terminals)
        if (g.contains(t)) tree.terminals.insert(t);
    if (tree.terminals.size() < 2) return tree;
    const auto& adj = g.adjacency();
    const std::vector<EntityId> term(tree.terminals.begin(), tree.terminals.end());

    // BFS from each terminal; parents follow the sorted adjacency order.
    std::vector<std::map<EntityId, std::pair<std::size_t, EntityId>>> bfs(term.size());
    for (std::size_t i = 0; i < term.size(); ++i) {
        auto& seen = bfs[i];
        seen[term[i]] = {0, term[i]};
        std::deque<EntityId> q{term[i]};
        while (!q.empty()) {
            const EntityId u = q.front();
            q.pop_front();
            const std::size_t du = seen.at(u).first;
            for (const auto& [v, _] : adj.at(u)) {
                if (seen.contains(v)) continue;
                seen[v] = {du + 1, u};
                q.push_back(v);
            }
        }
    }

    struct ClosureEdge {
        std::size_t dist, i, j;
    };
    std::vector<ClosureEdge> closure;
    for (std::size_t i = 0; i < term.size(); ++i)
        for (std::size_t j = i + 1; j < term.size(); ++j)
            if (const auto it = bfs[i].find(term[j]); it != bfs[i].end()) closure.push_back({it->second.first, i, j});
    std::sort(closure.begin(), closure.end(), [](const auto& a, const auto& b) {
        return std::tie(a.dist, a.i, a.j) < std::tie(b.dist, b.i, b.j);
    });

    std::vector<std::size_t> parent(term.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::map<EntityId, std::set<EntityId>> sub;
    for (const auto& e : closure) {
        const std::size_t a = find(e.i), b = find(e.j);
        if (a == b) continue;
        parent[a] = b;
        // expand the closure edge into its graph path
        EntityId v = term[e.j];
        while (v != term[e.i]) {
            const EntityId u = bfs[e.i].at(v).second;
            sub[u].insert(v);
            sub[v].insert(u);
            v = u;
        }
    }

    // Spanning forest of the union of paths, then prune non-terminal leaves.
    std::map<EntityId, std::set<EntityId>> forest;
    std::set<EntityId> visited;
    for (const auto& t : term) {
        if (visited.contains(t) || !sub.contains(t)) continue;
        visited.insert(t);
        std::deque<EntityId> q{t};
        forest[t];
        while (!q.empty()) {
            const EntityId u = q.front();
            q.pop_front();
            for (const auto& v : sub.at(u)) {
                if (visited.contains(v)) continue;
                visited.insert(v);
                forest[u].insert(v);
                forest[v].insert(u);
                q.push_back(v);
            }
        }
    }
    bool pruned = true;
    while (pruned) {
        pruned = false;
        for (auto it = forest.begin(); it != forest.end();) {
            if (it->second.size() <= 1 && !tree.terminals.contains(it->first)) {
                for (const auto& n : it->second) forest[n].erase(it->first);
                it = forest.erase(it);
                pruned = true;
            } else {
                ++it;
            }
        }
    }
    for (const auto& [u, ns] : forest) {
        tree.vertices.insert(u);
        for (const auto& v : ns)
            if (u < v) tree.edges.insert({u, v});
    }

    std::deque<EntityId> q;
    for (const auto& t : tree.terminals) {
        if (!forest.contains(t)) continue;
        tree.hops[t] = 0;
        q.push_back(t);
    }
    while (!q.empty()) {
        const EntityId u = q.front();
        q.pop_front();
        for (const auto& v : forest.at(u)) {
            if (tree.hops.contains(v)) continue;
            tree.hops[v] = tree.hops.at(u) + 1;
            q.push_back(v);
        }
    }
    return tree;
}

std::vector<FusedCandidate> bridge_discover(const channels::EntityGraph& g, const std::set<EntityId>& query_entities,
                                            const std::vector<FusedCandidate>& fused)
{
    const SteinerTree tree = steiner_tree(g, query_entities);
    if (tree.terminals.size() < 2) return {};
    double max_wrrf = 0.0;
    for (const auto& f : fused) max_wrrf = std::max(max_wrrf, f.wrrf);
    if (max_wrrf == 0.0) max_wrrf = 1.0;

    std::map<MemoryId, double> score;
    for (const auto& v : tree.vertices) {
        if (tree.terminals.contains(v)) continue;
        const double s = kBridgeScale * max_wrrf * std::pow(kBridgeDecay, static_cast<double>(tree.hops.at(v)));
        for (MemoryId m : g.mentions(v)) {
            double& cur = score[m];
            cur = std::max(cur, s);
        }
    }
    std::vector<FusedCandidate> out;
    for (const auto& [id, s] : score) {
        FusedCandidate c;
        c.id = id;
        c.wrrf = c.final = s;
        c.origin = Origin::Bridge;
        out.push_back(c);
    }
    sort_by_wrrf(out);
    return out;
}

std::vector<FusedCandidate> blend_rerank(std::vector<FusedCandidate> fused, double alpha)
{
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("blend alpha outside [0, 1]");
    for (auto& f : fused) f.final = f.ce ? alpha * adapters::logistic(*f.ce) + (1.0 - alpha) * f.wrrf : f.wrrf;
    sort_by_final(fused);
    return fused;
}

Ablation Ablation::normalized() const
{
    Ablation a = *this;
    if (a.all_math_off) a.fisher_off = a.sheaf_off = a.langevin_off = true;
    return a;
}

Ablation Ablation::parse(std::string_view list)
{
    Ablation a;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        const std::size_t comma = std::min(list.find(',', pos), list.size());
        std::string name(list.substr(pos, comma - pos));
        pos = comma + 1;
        name.erase(0, name.find_first_not_of(" \t"));
        name.erase(name.find_last_not_of(" \t") + 1);
        if (name.empty()) continue;
        if (name.ends_with("_off")) name.resize(name.size() - 4);
        if (name == "fisher")
            a.fisher_off = true;
        else if (name == "sheaf")
            a.sheaf_off = true;
        else if (name == "langevin")
            a.langevin_off = true;
        else if (name == "bm25")
            a.bm25_off = true;
        else if (name == "entity")
            a.entity_off = true;
        else if (name == "temporal")
            a.temporal_off = true;
        else if (name == "cross_encoder")
            a.cross_encoder_off = true;
        else if (name == "all_math")
            a.all_math_off = true;
        else
            throw std::invalid_argument("unknown component: " + name);
    }
    return a.normalized();
}

std::string Ablation::describe() const
{
    std::string out;
    auto add = [&](bool on, const char* n) {
        if (on) out += (out.empty() ? "" : ",") + std::string(n);
    };
    add(fisher_off, "fisher_off");
    add(sheaf_off, "sheaf_off");
    add(langevin_off, "langevin_off");
    add(bm25_off, "bm25_off");
    add(entity_off, "entity_off");
    add(temporal_off, "temporal_off");
    add(cross_encoder_off, "cross_encoder_off");
    add(all_math_off, "all_math_off");
    return out.empty() ? "full" : out;
}

double lifecycle_weight(langevin::LifecycleState s)
{
    switch (s) {
    case langevin::LifecycleState::Active: return 1.0;
    case langevin::LifecycleState::Warm: return 0.9;
    case langevin::LifecycleState::Cold: return 0.7;
    case langevin::LifecycleState::Archived: return 0.4;
    }
    return 1.0;
}

std::optional<std::pair<EntityId, std::string>> profile_query(std::string_view query)
{
    static const std::regex re(R"(^\s*(?:what|who)\s+(?:is|was|are|were)\s+(.+?)(?:'s|')\s+(.+?)\s*\??\s*$)",
                               std::regex::icase);
    std::string q(query);
    for (std::size_t p; (p = q.find("\xE2\x80\x99")) != std::string::npos;) q.replace(p, 3, "'");
    std::smatch m;
    if (!std::regex_match(q, m, re)) return std::nullopt;
    std::string entity = text::canonical_entity(m[1].str());
    const std::string attr = text::canonical_entity(m[2].str());
    for (const char* det : {"the_", "a_", "an_"})
        if (entity.starts_with(det)) entity.erase(0, std::strlen(det));
    if (entity.empty() || attr.empty()) return std::nullopt;
    return std::pair(entity, attr);
}

double entity_coverage(const QueryPlan& plan, const std::vector<RetrievedMemory>& results,
                       const store::Snapshot& snap)
{
    if (plan.entities.empty()) return 1.0;
    std::size_t covered = 0;
    for (const auto& e : plan.entities) {
        const bool hit = std::any_of(results.begin(), results.end(), [&](const auto& r) {
            const auto* m = snap.find(r.id);
            return m != nullptr && m->entities.contains(e);
        });
        covered += hit ? 1 : 0;
    }
    return static_cast<double>(covered) / static_cast<double>(plan.entities.size());
}

RetrieveResult retrieve(const store::Snapshot& snap, const adapters::Embedder& embedder,
                        const info::SimilarityConfig& similarity, std::string_view query, const RetrieveOptions& opts)
{
    const Ablation ab = opts.ablation.normalized();
    RetrieveResult res;
    Trace& tr = res.trace;
    auto stage = [&](std::string name, std::size_t in, std::size_t out, Clock::time_point t0,
                     std::vector<std::pair<MemoryId, double>> head) {
        tr.stages.push_back({std::move(name), in, out, millis_since(t0), std::move(head)});
    };

    auto t0 = Clock::now();
    tr.plan = classify_query(query, snap.known_entities);
    stage("classify", 1, 1, t0, {});
    if (snap.memories.empty()) return res;

    t0 = Clock::now();
    if (const auto pq = profile_query(query)) {
        const auto e = snap.profiles.find(pq->first);
        if (e != snap.profiles.end())
            if (const auto a = e->second.find(pq->second); a != e->second.end() && snap.find(a->second.memory))
                tr.profile_hit = a->second.memory;
    }
    stage("profile_lookup", 1, tr.profile_hit ? 1 : 0, t0, {});

    const bool has_tokens = !text::tokenize(query).empty();
    const std::size_t top_n = opts.channel_top_n;
    const QueryPlan& plan = tr.plan;

    auto semantic = [&]() -> channels::RankedList {
        if (!has_tokens) return {};
        const Vector qe = embedder.embed(query);
        if (qe.size() != embedder.dimension()) throw DimensionMismatch(embedder.dimension(), qe.size());
        const auto qg = info::estimate_variance(qe, similarity);
        std::vector<std::pair<MemoryId, double>> scored;
        scored.reserve(snap.memories.size());
        for (const auto& m : snap.memories) {
            if (!ab.langevin_off && m.lifecycle == langevin::LifecycleState::Archived) continue;
            const double s = ab.fisher_off ? info::cosine_score(qe, m.embedding.mu())
                                           : info::effective_score(qg, m.embedding, m.n_access, similarity);
            scored.emplace_back(m.id, s);
        }
        return channels::rank_scores(std::move(scored), top_n);
    };
    auto bm25 = [&] { return snap.bm25.search(query, top_n); };
    auto entity = [&] { return channels::entity_channel(snap.graph, plan.entities, top_n); };
    auto temporal = [&] { return channels::temporal_channel(snap.temporal, plan.anchor, snap.latest_observed, top_n); };

    t0 = Clock::now();
    const auto policy = opts.parallel ? std::launch::async : std::launch::deferred;
    std::array<std::optional<std::future<channels::RankedList>>, kChannels> jobs;
    jobs[0] = std::async(policy, semantic);
    if (!ab.bm25_off) jobs[1] = std::async(policy, bm25);
    if (!ab.entity_off) jobs[2] = std::async(policy, entity);
    if (!ab.temporal_off) jobs[3] = std::async(policy, temporal);
    ChannelResults lists;
    for (std::size_t c = 0; c < kChannels; ++c) {
        if (!jobs[c]) continue;
        lists[c] = jobs[c]->get();
        tr.channels[static_cast<Channel>(c)] = *lists[c];
        const auto& l = *lists[c];
        stage("channel:" + std::string(to_string(static_cast<Channel>(c))), snap.memories.size(), l.size(), t0,
              head_of(l.begin(), l.end(), [](const auto& r) { return r.score; }));
    }

    t0 = Clock::now();
    auto fused = wrrf_fuse(lists, opts.weights, plan.multipliers, opts.k);
    std::size_t n_in = 0;
    for (const auto& l : lists) n_in += l ? l->size() : 0;
    stage("wrrf_fuse", n_in, fused.size(), t0, head_of(fused.begin(), fused.end(), [](const auto& f) { return f.wrrf; }));

    t0 = Clock::now();
    n_in = fused.size();
    fused = scene_expand(std::move(fused), snap.scenes);
    stage("scene_expand", n_in, fused.size(), t0, head_of(fused.begin(), fused.end(), [](const auto& f) { return f.wrrf; }));

    if (plan.type == QueryType::MultiHop) {
        t0 = Clock::now();
        n_in = fused.size();
        const auto bridges = bridge_discover(snap.graph, plan.entities, fused);
        std::map<MemoryId, std::size_t> at;
        for (std::size_t i = 0; i < fused.size(); ++i) at[fused[i].id] = i;
        for (const auto& b : bridges) {
            if (const auto it = at.find(b.id); it != at.end()) {
                fused[it->second].wrrf = std::max(fused[it->second].wrrf, b.wrrf);
                fused[it->second].final = fused[it->second].wrrf;
            } else {
                fused.push_back(b);
            }
        }
        sort_by_wrrf(fused);
        stage("bridge_discover", n_in, fused.size(), t0, head_of(bridges.begin(), bridges.end(), [](const auto& f) { return f.wrrf; }));
    }

    if (tr.profile_hit && std::none_of(fused.begin(), fused.end(), [&](const auto& f) { return f.id == *tr.profile_hit; })) {
        FusedCandidate c;
        c.id = *tr.profile_hit;
        c.wrrf = c.final = fused.empty() ? 0.0 : fused.front().wrrf;
        c.origin = Origin::ProfileLookup;
        fused.push_back(c);
    }

    t0 = Clock::now();
    const bool blend = opts.reranker && !ab.cross_encoder_off && !fused.empty();
    if (blend) {
        std::vector<std::string> docs;
        docs.reserve(fused.size());
        for (const auto& f : fused) docs.push_back(snap.find(f.id)->content);
        const auto ce = opts.reranker->score_batch(query, docs);
        for (std::size_t i = 0; i < fused.size(); ++i) fused[i].ce = ce[i];
    }
    fused = blend_rerank(std::move(fused), plan.alpha);
    stage(blend ? "blend_rerank" : "blend_rerank(off)", fused.size(), fused.size(), t0,
          head_of(fused.begin(), fused.end(), [](const auto& f) { return f.final; }));

    t0 = Clock::now();
    for (auto& f : fused) {
        const auto* m = snap.find(f.id);
        if (!ab.langevin_off) f.final *= lifecycle_weight(m->lifecycle);
        if (!ab.sheaf_off && snap.superseded.contains(f.id)) f.final *= kSupersededFactor;
    }
    sort_by_final(fused);
    if (tr.profile_hit) {
        const auto it = std::find_if(fused.begin(), fused.end(), [&](const auto& f) { return f.id == *tr.profile_hit; });
        std::rotate(fused.begin(), it, std::next(it));
    }
    stage("post_process", fused.size(), fused.size(), t0, head_of(fused.begin(), fused.end(), [](const auto& f) { return f.final; }));

    t0 = Clock::now();
    const std::size_t n = std::min(opts.top_k, fused.size());
    res.results.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& f = fused[i];
        const auto* m = snap.find(f.id);
        RetrievedMemory r;
        r.id = f.id;
        r.score = f.final;
        r.wrrf = f.wrrf;
        r.ce = f.ce;
        r.origin = f.id == tr.profile_hit ? Origin::ProfileLookup : f.origin;
        r.ranks = f.ranks;
        r.lifecycle = m->lifecycle;
        r.superseded = snap.superseded.contains(f.id);
        r.content = m->content;
        res.results.push_back(std::move(r));
    }
    tr.entity_coverage = entity_coverage(plan, res.results, snap);
    stage("top_k", fused.size(), n, t0, head_of(res.results.begin(), res.results.end(), [](const auto& r) { return r.score; }));
    return res;
}

RetrieveResult retrieve(const store::Store& store, std::string_view profile, std::string_view query,
                        const RetrieveOptions& opts)
{
    if (!store.is_open()) throw Error("store is closed");
    const auto snap = store.snapshot(profile);
    return retrieve(*snap, store.embedder(), store.options().similarity, query, opts);
}

} // namespace mnemo::fusion
