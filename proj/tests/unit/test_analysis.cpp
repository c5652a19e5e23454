#include <doctest.h>

#include <cmath>

#include <boost/math/special_functions/beta.hpp>

#include "mnemo/analysis.hpp"
#include "support.hpp"

using namespace mnemo;
using namespace mnemo::analysis;
using testing::Gen;

namespace {

Eigen::MatrixXd unit_columns(Gen& g, int d, int m)
{
    Eigen::MatrixXd x(d, m);
    for (int j = 0; j < m; ++j) {
        const Vector u = g.unit_vector(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) x(i, j) = u[static_cast<std::size_t>(i)];
    }
    return x;
}

} // namespace

TEST_CASE("incomplete beta matches the boost reference")
{
    Gen g(81);
    for (int i = 0; i < 2000; ++i) {
        const double a = g.uniform(0.05, 300.0);
        const double b = g.uniform(0.05, 50.0);
        const double x = g.uniform(0.0, 1.0);
        const double ref = boost::math::ibeta(a, b, x);
        CHECK(std::abs(incomplete_beta(x, a, b) - ref) <= 1e-10 * std::max(ref, 1e-300) + 1e-300);
    }
    CHECK(incomplete_beta(0.0, 2.0, 3.0) == 0.0);
    CHECK(incomplete_beta(1.0, 2.0, 3.0) == 1.0);
    CHECK(incomplete_beta(0.3, 1.0, 1.0) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK_THROWS_AS(incomplete_beta(0.5, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(incomplete_beta(1.5, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("cap fraction values and domain")
{
    CHECK(cap_fraction(5, 1.0) == 0.5);
    CHECK(cap_fraction(5, 2.0) == 1.0);
    // On the circle the cap is an arc of half-angle acos(1 - eps).
    for (double eps : {0.1, 0.5, 1.5})
        CHECK(cap_fraction(2, eps) == doctest::Approx(std::acos(1.0 - eps) / M_PI).epsilon(1e-10));
    // On S^2 the cap area is proportional to its height.
    CHECK(cap_fraction(3, 0.3) == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(cap_fraction(7, 0.4) + cap_fraction(7, 1.6) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(cap_fraction(1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(cap_fraction(4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(cap_fraction(4, 2.5), std::invalid_argument);
}

TEST_CASE("cap fraction agrees with sphere sampling")
{
    Gen g(82);
    const int d = 8;
    const double eps = 0.3;
    const int n = 200000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        const Vector v = g.unit_vector(d);
        if (1.0 - v[0] <= eps) ++hits;
    }
    const double p = cap_fraction(d, eps);
    const double se = std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(static_cast<double>(hits) / n - p) < 3.0 * se);
}

TEST_CASE("cap fraction concentrates as dimension grows")
{
    for (double eps : {0.05, 0.3, 0.9}) {
        double prev = 1.0;
        for (int d = 2; d <= 512; d *= 2) {
            const double c = cap_fraction(d, eps);
            CHECK(c < prev);
            prev = c;
        }
    }
}

TEST_CASE("neighbour count, SNR, contradictions and depth")
{
    CHECK(expected_neighbor_count(0, 384, 0.05) == 0.0);
    CHECK(expected_neighbor_count(2000, 16, 0.2) == doctest::Approx(2.0 * expected_neighbor_count(1000, 16, 0.2)).epsilon(1e-15));
    CHECK(cosine_snr(10, 5, 16, 0.01) == 1.0);
    CHECK_THROWS_AS(cosine_snr(10, 0, 16, 0.01), std::invalid_argument);
    double prev = 1.0;
    for (std::uint64_t n = 1; n < 10'000'000; n *= 3) {
        const double s = cosine_snr(n, 5, 32, 0.3);
        CHECK(s <= prev);
        CHECK(s > 0.0);
        prev = s;
    }
    // Halving holds once the neighbour count exceeds K_rel.
    REQUIRE(expected_neighbor_count(1'000'000, 16, 0.5) > 5.0);
    CHECK(cosine_snr(2'000'000, 5, 16, 0.5) == doctest::Approx(0.5 * cosine_snr(1'000'000, 5, 16, 0.5)).epsilon(1e-12));

    CHECK(expected_contradictions(1, 0.5) == 0.0);
    CHECK(expected_contradictions(100000, 1e-6) == doctest::Approx(4999.95).epsilon(1e-12));
    CHECK(expected_contradictions(200000, 1e-6) / expected_contradictions(100000, 1e-6) ==
          doctest::Approx(4.0).epsilon(1e-4));
    CHECK_THROWS_AS(expected_contradictions(10, 1.5), std::invalid_argument);

    CHECK(optimal_depth(1, 2.0) == 0.0);
    CHECK(optimal_depth(16, 2.0) == 2.0);
    CHECK(optimal_depth(64, 3.0) - optimal_depth(32, 3.0) == doctest::Approx(1.0 / (2.0 * std::log2(3.0))).epsilon(1e-12));
    CHECK_THROWS_AS(optimal_depth(0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(optimal_depth(10, 1.0), std::invalid_argument);
}

TEST_CASE("hopfield energy worked values")
{
    Gen g(83);
    Eigen::MatrixXd one = unit_columns(g, 5, 1);
    const Eigen::VectorXd x1 = one.col(0);
    CHECK(std::abs(hopfield_energy(one, x1, 2.0)) < 1e-14);
    CHECK_THROWS_AS(hopfield_energy(Eigen::MatrixXd(5, 0), x1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(hopfield_energy(one, Eigen::VectorXd::Zero(4), 1.0), DimensionMismatch);
    CHECK_THROWS_AS(hopfield_energy(one, x1, 0.0), std::invalid_argument);

    const Eigen::MatrixXd x = unit_columns(g, 6, 4);
    const Eigen::VectorXd xi = Eigen::VectorXd::Random(6);
    Eigen::MatrixXd permuted(6, 4);
    permuted << x.col(2), x.col(0), x.col(3), x.col(1);
    CHECK(hopfield_energy(permuted, xi, 1.7) == doctest::Approx(hopfield_energy(x, xi, 1.7)).epsilon(1e-14));
}

TEST_CASE("hopfield energy of stored patterns respects the log M bound")
{
    Gen g(84);
    for (int t = 0; t < 100; ++t) {
        const int m = 2 + static_cast<int>(g.index(20));
        const Eigen::MatrixXd x = unit_columns(g, 16, m);
        const double beta = g.uniform(0.5, 20.0);
        for (int j = 0; j < m; ++j)
            CHECK(hopfield_energy(x, x.col(j), beta) <= std::log(static_cast<double>(m)) / beta + 1e-12);
    }
}

TEST_CASE("hopfield update")
{
    Gen g(85);
    Eigen::MatrixXd one = unit_columns(g, 4, 1);
    CHECK((hopfield_update(one, Eigen::VectorXd::Random(4), 3.0) - one.col(0)).norm() < 1e-15);

    // Well-separated patterns with large beta: a stored pattern is a fixed point.
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(8, 3);
    x(0, 0) = 1.0;
    x(1, 1) = 1.0;
    x(0, 2) = 0.5;
    x(2, 2) = std::sqrt(0.75);
    for (int j = 0; j < 3; ++j) CHECK((hopfield_update(x, x.col(j), 50.0) - x.col(j)).norm() < 1e-6);

    // Tiny beta: the uniform softmax returns the column mean.
    const Eigen::VectorXd mean = x.rowwise().mean();
    CHECK((hopfield_update(x, Eigen::VectorXd::Random(8), 1e-12) - mean).norm() < 1e-10);

    // Contraction near a fixed point.
    const Eigen::VectorXd near = x.col(1) + 0.05 * Eigen::VectorXd::Random(8);
    const Eigen::VectorXd from_random = Eigen::VectorXd::Random(8);
    const Eigen::VectorXd a1 = hopfield_update(x, near, 8.0);
    const Eigen::VectorXd a2 = hopfield_update(x, a1, 8.0);
    const Eigen::VectorXd b1 = hopfield_update(x, from_random, 8.0);
    CHECK((a2 - a1).norm() < (b1 - from_random).norm());

    // Output lies in the convex hull: softmax weights are recoverable and non-negative.
    const Eigen::VectorXd out = hopfield_update(x, from_random, 2.0);
    const Eigen::VectorXd w = x.colPivHouseholderQr().solve(out);
    CHECK(w.minCoeff() >= -1e-12);
    CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));
}
