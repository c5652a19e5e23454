#include <doctest.h>

#include <cmath>
#include <map>

#include "mnemo/channels.hpp"
#include "mnemo/text.hpp"
#include "support.hpp"

using namespace mnemo;
using namespace mnemo::channels;
using testing::Gen;

namespace {

/// Okapi BM25 evaluated from the raw token lists of the whole corpus.
double oracle_bm25(const std::map<MemoryId, std::vector<std::string>>& docs, const std::vector<std::string>& query,
                   MemoryId id, double k1 = 1.2, double b = 0.75)
{
    double total = 0.0;
    for (const auto& [_, d] : docs) total += static_cast<double>(d.size());
    const double n = static_cast<double>(docs.size());
    const double avgdl = total / n;
    std::set<std::string> terms(query.begin(), query.end());
    const auto& doc = docs.at(id);
    double s = 0.0;
    for (const auto& t : terms) {
        double nt = 0.0;
        for (const auto& [_, d] : docs)
            if (std::find(d.begin(), d.end(), t) != d.end()) nt += 1.0;
        const double f = static_cast<double>(std::count(doc.begin(), doc.end(), t));
        if (f == 0.0) continue;
        const double idf = std::log((n - nt + 0.5) / (nt + 0.5) + 1.0);
        s += idf * f * (k1 + 1.0) / (f + k1 * (1.0 - b + b * static_cast<double>(doc.size()) / avgdl));
    }
    return s;
}

void check_ranked(const RankedList& l)
{
    for (std::size_t i = 0; i < l.size(); ++i) {
        CHECK(l[i].rank == i + 1);
        if (i > 0) {
            CHECK(l[i - 1].score >= l[i].score);
            if (l[i - 1].score == l[i].score) CHECK(l[i - 1].id < l[i].id);
        }
    }
}

EntityGraph chain()
{
    EntityGraph g;
    g.add_edge("s", "a", 1.0);
    g.add_edge("a", "b", 1.0);
    g.add_edge("b", "c", 1.0);
    g.add_edge("c", "d", 1.0);
    return g;
}

} // namespace

TEST_CASE("rank_scores orders by score then id and truncates")
{
    const auto l = rank_scores({{5, 1.0}, {2, 3.0}, {3, 1.0}, {1, 0.5}}, 3);
    REQUIRE(l.size() == 3);
    CHECK(l[0] == RankedCandidate{2, 3.0, 1});
    CHECK(l[1] == RankedCandidate{3, 1.0, 2});
    CHECK(l[2] == RankedCandidate{5, 1.0, 3});
}

TEST_CASE("bm25 worked example")
{
    Bm25Index idx;
    idx.add_document(1, {"apple", "banana"});
    idx.add_document(2, {"banana"});
    CHECK(idx.idf("apple") == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(idx.score({"apple"}, 1) == doctest::Approx(std::log(2.0) * 2.2 / 2.5).epsilon(1e-14));
    CHECK(idx.score({"apple"}, 1) == doctest::Approx(0.6100).epsilon(1e-4));
    CHECK(idx.score({"apple"}, 2) == 0.0);
    CHECK(idx.score({"cherry"}, 1) == 0.0);
    CHECK(idx.avg_doc_length() == 1.5);
}

TEST_CASE("bm25 search contracts")
{
    Bm25Index idx;
    CHECK(idx.search("anything").empty());
    idx.add_document(7, text::tokenize("the quick brown fox"));
    CHECK(idx.search("").empty());
    const auto one = idx.search("fox");
    REQUIRE(one.size() == 1);
    CHECK(one[0].id == 7);
    CHECK(one[0].rank == 1);
    CHECK_THROWS_AS(idx.add_posting("x", 1, 0), std::invalid_argument);
}

TEST_CASE("bm25 matches the brute-force oracle on random corpora")
{
    Gen g(51);
    const std::vector<std::string> vocab{"alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta", "iota", "kappa"};
    for (int round = 0; round < 30; ++round) {
        std::map<MemoryId, std::vector<std::string>> docs;
        Bm25Index idx;
        const std::size_t n = 2 + g.index(30);
        for (MemoryId id = 1; id <= static_cast<MemoryId>(n); ++id) {
            std::vector<std::string> d(1 + g.index(12));
            for (auto& t : d) t = vocab[g.index(vocab.size())];
            docs[id] = d;
            idx.add_document(id, d);
        }
        std::vector<std::string> q(1 + g.index(4));
        for (auto& t : q) t = vocab[g.index(vocab.size())];
        for (const auto& [id, _] : docs) CHECK(idx.score(q, id) == doctest::Approx(oracle_bm25(docs, q, id)).epsilon(1e-12));
        std::string qs;
        for (const auto& t : q) qs += t + " ";
        check_ranked(idx.search(qs, 10));
    }
}

TEST_CASE("bm25 is monotone in term frequency and document length")
{
    Bm25Index idx;
    idx.add_document(1, {"x", "y"});
    idx.add_document(2, {"x", "x", "y"});
    idx.add_document(3, {"x", "y", "z", "w"});
    idx.add_document(4, {"q"});
    CHECK(idx.score({"x"}, 2) >= idx.score({"x"}, 1));
    CHECK(idx.score({"x"}, 3) <= idx.score({"x"}, 1));
    // Duplicate query terms count once.
    CHECK(idx.score({"x", "x"}, 1) == idx.score({"x"}, 1));
}

TEST_CASE("bm25 rebuilt from persisted postings scores identically")
{
    Gen g(52);
    Bm25Index a;
    for (MemoryId id = 1; id <= 40; ++id) {
        std::vector<std::string> d(1 + g.index(10));
        for (auto& t : d) t = "t" + std::to_string(g.index(15));
        a.add_document(id, d);
    }
    a.remove_document(7);
    Bm25Index b;
    for (const auto& [term, plist] : a.postings())
        for (const auto& [id, tf] : plist) b.add_posting(term, id, tf);
    for (const auto& [id, len] : a.doc_lengths()) b.set_doc_length(id, len);
    CHECK(b.avg_doc_length() == a.avg_doc_length());
    for (int i = 0; i < 15; ++i) {
        const std::vector<std::string> q{"t" + std::to_string(i), "t" + std::to_string((i + 3) % 15)};
        for (MemoryId id = 1; id <= 40; ++id) CHECK(a.score(q, id) == b.score(q, id));
    }
    CHECK(a.score({"t1"}, 7) == 0.0);
}

TEST_CASE("entity graph invariants")
{
    EntityGraph g;
    CHECK_THROWS_AS(g.add_edge("a", "a", 0.5), std::invalid_argument);
    CHECK_THROWS_AS(g.add_edge("a", "b", 0.0), std::invalid_argument);
    CHECK_THROWS_AS(g.add_edge("a", "b", 1.5), std::invalid_argument);
    g.add_edge("a", "b", 0.5);
    CHECK(g.adjacency().at("b").at("a") == 0.5);
    g.add_mention("a", 1);
    g.add_mention("a", 2);
    g.remove_memory(1);
    CHECK(g.mentions("a") == std::set<MemoryId>{2});
    CHECK(g.mentions("zz").empty());
}

TEST_CASE("spreading activation worked examples")
{
    EntityGraph iso;
    iso.add_node("s");
    CHECK(spread_activation(iso, {"s"}) == std::map<EntityId, double>{{"s", 1.0}});
    CHECK(spread_activation(iso, {"unknown"}).empty());

    const auto a = spread_activation(chain(), {"s"});
    CHECK(a.at("s") == 1.0);
    CHECK(a.at("a") == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(a.at("b") == doctest::Approx(0.49).epsilon(1e-15));
    CHECK(a.at("c") == doctest::Approx(0.343).epsilon(1e-15));
    CHECK_FALSE(a.contains("d"));

    // Two seeds reaching one node: the larger path activation wins.
    EntityGraph two;
    two.add_edge("p", "x", 1.0);
    two.add_edge("q", "x", 0.5);
    CHECK(spread_activation(two, {"p", "q"}).at("x") == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("activation stays in [0, 1] and decreases with hop count on unit graphs")
{
    Gen g(53);
    for (int round = 0; round < 50; ++round) {
        EntityGraph gr;
        const std::size_t n = 3 + g.index(15);
        for (std::size_t i = 0; i < n; ++i) gr.add_node("e" + std::to_string(i));
        for (std::size_t i = 0; i < 2 * n; ++i) {
            const auto u = g.index(n), v = g.index(n);
            if (u != v) gr.add_edge("e" + std::to_string(u), "e" + std::to_string(v), 1.0);
        }
        const auto act = spread_activation(gr, {"e0"});
        for (const auto& [e, a] : act) {
            CHECK(a >= 0.0);
            CHECK(a <= 1.0);
            // Unit weights: activation is exactly decay^(first-reach hop).
            const double hops = std::log(a) / std::log(0.7);
            CHECK(std::abs(hops - std::round(hops)) < 1e-9);
            CHECK(std::round(hops) <= 3.0);
        }
    }
}

TEST_CASE("entity channel scoring")
{
    auto g = chain();
    g.add_mention("s", 1);
    g.add_mention("b", 2);
    g.add_mention("a", 3);
    g.add_mention("b", 3);
    CHECK(entity_channel(g, {}).empty());
    const auto l = entity_channel(g, {"s"});
    check_ranked(l);
    std::map<MemoryId, double> by_id;
    for (const auto& c : l) by_id[c.id] = c.score;
    CHECK(by_id.at(1) > by_id.at(2));
    CHECK(by_id.at(3) == doctest::Approx(0.7 + 0.49).epsilon(1e-15));
}

TEST_CASE("temporal kernel")
{
    const Timestamp day = kSecondsPerDay;
    const Timestamp t0 = 1'700'000'000;
    TemporalRecord r{1, t0, t0, t0 - day, t0 + day};
    CHECK(temporal_score(r, t0, t0) == 1.0);
    CHECK(temporal_score(r, t0 + 30 * day, t0) == doctest::Approx(std::exp(-1.0) * 0.5).epsilon(1e-15));
    TemporalRecord open{2, t0, t0, std::nullopt, std::nullopt};
    CHECK(temporal_score(open, t0 + 30 * day, t0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    TemporalRecord expired{3, t0, t0, std::nullopt, t0 - day};
    CHECK(temporal_score(expired, t0, t0) == 0.5);
    // refers_to falls back to observed_at.
    TemporalRecord plain{4, t0, std::nullopt, std::nullopt, std::nullopt};
    CHECK(temporal_score(plain, t0, 0) == 1.0);
    // Without an anchor the score measures recency.
    CHECK(temporal_score(plain, std::nullopt, t0 + 30 * day) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));

    Gen g(54);
    for (int i = 0; i < 200; ++i) {
        const Timestamp delta = static_cast<Timestamp>(g.uniform(0, 400)) * day / 3;
        CHECK(temporal_score(open, t0 + delta, 0) == temporal_score(open, t0 - delta, 0));
    }
}

TEST_CASE("temporal channel ranks by proximity")
{
    const Timestamp day = kSecondsPerDay;
    std::vector<TemporalRecord> recs;
    for (MemoryId id = 1; id <= 10; ++id) recs.push_back({id, id * 10 * day, std::nullopt, std::nullopt, std::nullopt});
    const auto l = temporal_channel(recs, 42 * day, 0, 3);
    check_ranked(l);
    REQUIRE(l.size() == 3);
    CHECK(l[0].id == 4);
    CHECK(l[1].id == 5);
    CHECK(l[2].id == 3);
}
