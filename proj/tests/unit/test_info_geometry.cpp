#include <doctest.h>

#include <cmath>

#include "mnemo/info_geometry.hpp"
#include "support.hpp"

using namespace mnemo;
using namespace mnemo::info;
using testing::Gen;

namespace {

GaussianEmbedding random_gaussian(Gen& g, std::size_t d)
{
    Vector mu = g.normal_vector(d);
    Vector var(d);
    for (double& v : var) v = g.uniform(0.1, 1.1);
    return GaussianEmbedding(mu, var);
}

/// Distance written straight from the closed form with standard deviations.
double oracle_distance(const GaussianEmbedding& p, const GaussianEmbedding& q)
{
    double s = 0.0;
    for (std::size_t k = 0; k < p.dim(); ++k) {
        const double t = 2.0 * std::log(std::sqrt(q.var()[k]) / std::sqrt(p.var()[k]));
        s += t * t + std::pow(p.mu()[k] - q.mu()[k], 2) / (p.var()[k] + q.var()[k]);
    }
    return std::sqrt(s);
}

} // namespace

TEST_CASE("gaussian embeddings enforce shape and the variance floor")
{
    CHECK_THROWS_AS(GaussianEmbedding({0.0, 1.0}, {1.0}), DimensionMismatch);
    CHECK_THROWS_AS(GaussianEmbedding({0.0}, {1e-7}), std::invalid_argument);
    CHECK_THROWS_AS(GaussianEmbedding({0.0}, {0.5}, 0.6), std::invalid_argument);
    CHECK_THROWS_AS(GaussianEmbedding({NAN}, {1.0}), std::invalid_argument);
    CHECK_NOTHROW(GaussianEmbedding({0.0}, {1e-6}));
}

TEST_CASE("similarity config validation")
{
    SimilarityConfig c;
    CHECK_NOTHROW(c.validate());
    c.temperature = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.ramp_threshold = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.sigma_min_sq = 2.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    CHECK(SimilarityConfig{}.temperature_for(384) == 384.0);
}

TEST_CASE("fisher-rao distance closed-form values")
{
    const GaussianEmbedding a({0.0}, {1.0});
    CHECK(fisher_rao_distance(a, a) == 0.0);
    const double e = std::exp(1.0);
    CHECK(fisher_rao_distance(a, GaussianEmbedding({0.0}, {e * e})) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(fisher_rao_distance(a, GaussianEmbedding({1.0}, {1.0})) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(fisher_rao_distance(a, GaussianEmbedding({0.0, 0.0}, {1.0, 1.0})), DimensionMismatch);
}

TEST_CASE("fisher-rao distance agrees with the standard-deviation form and is exactly symmetric")
{
    Gen g(21);
    for (int i = 0; i < 2000; ++i) {
        const std::size_t d = 1 + g.index(64);
        const auto p = random_gaussian(g, d);
        const auto q = random_gaussian(g, d);
        CHECK(fisher_rao_distance(p, q) == doctest::Approx(oracle_distance(p, q)).epsilon(1e-12));
        CHECK(fisher_rao_distance(p, q) == fisher_rao_distance(q, p));
        CHECK(fisher_rao_distance(p, p) == 0.0);
    }
}

TEST_CASE("fisher-rao distance decomposes over dimensions exactly")
{
    Gen g(22);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t d = 1 + g.index(32);
        const auto p = random_gaussian(g, d);
        const auto q = random_gaussian(g, d);
        double sum = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const GaussianEmbedding pk({p.mu()[k]}, {p.var()[k]});
            const GaussianEmbedding qk({q.mu()[k]}, {q.var()[k]});
            sum += fisher_rao_distance_squared(pk, qk);
        }
        CHECK(fisher_rao_distance_squared(p, q) == sum);
        CHECK(fisher_rao_distance(p, q) == std::sqrt(sum));
    }
}

TEST_CASE("the closed form admits triangle violations on strongly heteroscedastic triples")
{
    // Recorded counterexample: two sharp Gaussians two units apart are farther
    // from each other than the sum of their distances to a broad one between them.
    const GaussianEmbedding p({0.0}, {0.01});
    const GaussianEmbedding q({1.0}, {1.0});
    const GaussianEmbedding r({2.0}, {0.01});
    const double pr = fisher_rao_distance(p, r);
    const double via = fisher_rao_distance(p, q) + fisher_rao_distance(q, r);
    CHECK(pr == doctest::Approx(std::sqrt(4.0 / 0.02)).epsilon(1e-14));
    CHECK(pr > via);
}

TEST_CASE("estimate_variance boundary and worked values")
{
    const auto axis = estimate_variance(Vector{1.0, 0.0});
    CHECK(axis.var()[0] == doctest::Approx(0.1 + 1e-6).epsilon(1e-15));
    CHECK(axis.var()[1] == doctest::Approx(1.0 + 1e-6).epsilon(1e-15));

    const auto v = estimate_variance(Vector{3.0, 4.0});
    CHECK(v.var()[0] == doctest::Approx(0.325001).epsilon(1e-12));
    CHECK(v.var()[1] == doctest::Approx(0.100001).epsilon(1e-12));
    CHECK(v.mu()[0] == 3.0);

    CHECK_THROWS_AS(estimate_variance(Vector{0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("estimate_variance is scale invariant and stays inside its band")
{
    Gen g(23);
    SimilarityConfig cfg;
    for (int i = 0; i < 500; ++i) {
        const std::size_t d = 1 + g.index(128);
        const Vector e = g.normal_vector(d);
        Vector scaled(e);
        const double c = g.uniform(0.01, 100.0);
        for (double& x : scaled) x *= c;
        const auto a = estimate_variance(e, cfg);
        const auto b = estimate_variance(scaled, cfg);
        CHECK(testing::max_abs_diff(a.var_vector(), b.var_vector()) < 1e-14);
        double lo = 2.0;
        for (double v : a.var()) {
            CHECK(v >= cfg.sigma_min_sq + cfg.eps_var - 1e-15);
            CHECK(v <= cfg.sigma_max_sq + cfg.eps_var + 1e-15);
            lo = std::min(lo, v);
        }
        CHECK(lo == doctest::Approx(cfg.sigma_min_sq + cfg.eps_var).epsilon(1e-14));
    }
}

TEST_CASE("fisher score values and monotonicity")
{
    SimilarityConfig one;
    one.temperature = 1.0;
    const GaussianEmbedding m({0.0}, {1.0});
    CHECK(fisher_score(m, m, one) == 1.0);
    CHECK(fisher_score(GaussianEmbedding({1.0}, {1.0}), m, one) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    // Halving the gapped dimension's memory variance strictly lowers the score.
    CHECK(fisher_score(GaussianEmbedding({1.0}, {1.0}), GaussianEmbedding({0.0}, {0.5}), one) <
          fisher_score(GaussianEmbedding({1.0}, {1.0}), m, one));
    // Only the memory variance enters.
    CHECK(fisher_score(GaussianEmbedding({1.0}, {0.01}), m, one) == fisher_score(GaussianEmbedding({1.0}, {5.0}), m, one));

    Gen g(24);
    for (int i = 0; i < 300; ++i) {
        const std::size_t d = 2 + g.index(30);
        const auto q = random_gaussian(g, d);
        const auto mem = random_gaussian(g, d);
        const double s = fisher_score(q, mem);
        CHECK(s > 0.0);
        CHECK(s <= 1.0);
        Vector farther = mem.mu_vector();
        const std::size_t k = g.index(d);
        farther[k] += (farther[k] >= q.mu()[k] ? 1.0 : -1.0);
        CHECK(fisher_score(q, GaussianEmbedding(farther, mem.var_vector())) < s);
    }
}

TEST_CASE("cosine score")
{
    const Vector u{1.0, 2.0, 3.0};
    CHECK(cosine_score(u, u) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cosine_score(Vector{1.0, 0.0}, Vector{0.0, 3.0}) == 0.0);
    CHECK(cosine_score(u, Vector{-1.0, -2.0, -3.0}) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK_THROWS_AS(cosine_score(u, Vector{0.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("graduated ramp endpoints and midpoint")
{
    Gen g(25);
    SimilarityConfig cfg;
    const auto q = estimate_variance(g.normal_vector(16), cfg);
    const auto m = estimate_variance(g.normal_vector(16), cfg);
    const double cos = cosine_score(q.mu(), m.mu());
    const double fis = fisher_score(q, m, cfg);
    CHECK(effective_score(q, m, 0, cfg) == cos);
    CHECK(effective_score(q, m, 10, cfg) == fis);
    CHECK(effective_score(q, m, 12, cfg) == fis);
    CHECK(effective_score(q, m, 5, cfg) == doctest::Approx(0.5 * cos + 0.5 * fis).epsilon(1e-15));
    CHECK(ramp_weight(5) == 0.5);

    // Monotone interpolation between the two endpoints.
    double prev = effective_score(q, m, 0, cfg);
    for (std::uint64_t n = 1; n <= 10; ++n) {
        const double s = effective_score(q, m, n, cfg);
        if (fis >= cos)
            CHECK(s >= prev - 1e-15);
        else
            CHECK(s <= prev + 1e-15);
        prev = s;
    }
}

TEST_CASE("fisher tie-breaking on constructed pairs")
{
    const GaussianEmbedding q({1.0, 0.0}, {0.1, 0.1});
    const GaussianEmbedding a({0.9, 0.1}, {0.5, 0.5});
    CHECK(fisher_breaks_tie(q, a, a).winner == TieWinner::Tie);

    // Same mean near the query; b is sharper on the small-gap dimension and
    // closer to the query's own variance there, so b is nearer.
    const GaussianEmbedding b({0.9, 0.1}, {0.2, 0.5});
    const auto t = fisher_breaks_tie(q, a, b);
    CHECK(t.winner == TieWinner::Second);
    CHECK(t.distance_b < t.distance_a);

    CHECK_THROWS_AS(fisher_breaks_tie(q, a, GaussianEmbedding({0.0, 1.0}, {0.5, 0.5})), std::invalid_argument);
}
