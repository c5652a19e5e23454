#include <doctest.h>

#include <cmath>

#include "mnemo/langevin.hpp"
#include "support.hpp"

using namespace mnemo;
using namespace mnemo::langevin;
using testing::Gen;

namespace {

BallPoint on_axis(std::size_t d, double r)
{
    Vector v(d, 0.0);
    v[0] = r;
    return BallPoint(v);
}

/// Random orthogonal matrix by Gram-Schmidt on Gaussian rows.
std::vector<Vector> random_rotation(Gen& g, std::size_t d)
{
    std::vector<Vector> q;
    while (q.size() < d) {
        Vector v = g.normal_vector(d);
        for (const auto& u : q) {
            const double p = vec::dot(u, v);
            for (std::size_t i = 0; i < d; ++i) v[i] -= p * u[i];
        }
        const double n = vec::norm(v);
        for (double& x : v) x /= n;
        q.push_back(std::move(v));
    }
    return q;
}

Vector rotate(const std::vector<Vector>& q, const Vector& v)
{
    Vector out(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = vec::dot(q[i], v);
    return out;
}

} // namespace

TEST_CASE("potential parameters validation")
{
    PotentialParams p;
    CHECK_NOTHROW(p.validate());
    p.dt = 0.2;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.temperature = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.beta = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("potential values")
{
    PotentialParams p;
    CHECK(potential(BallPoint::origin(8), 0, 0.0, p) == 0.0);
    CHECK(potential(on_axis(8, 0.5), 3, 0.4, p) == doctest::Approx(-0.25).epsilon(1e-15));
    double prev = -1e9;
    for (double r = 0.0; r < 0.99; r += 0.01) {
        const double u = potential(on_axis(8, r), 2, 0.3, p);
        CHECK(u > prev);
        prev = u;
    }
    const auto g = potential_gradient(on_axis(3, 0.4), p);
    CHECK(g[0] == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("langevin step worked values")
{
    PotentialParams p;
    p.temperature = 0.0;
    const Vector zero(4, 0.0);

    LangevinState s{on_axis(4, 0.5), 0};
    CHECK(langevin_step(s, zero, p, zero).xi == s.xi);

    p.dt = 0.1;
    Vector grad(4, 0.0);
    grad[0] = 1.0;
    const auto next = langevin_step(s, grad, p, zero);
    CHECK(next.xi.coords()[0] == doctest::Approx(0.4859375).epsilon(1e-15));

    // At the origin the correction term vanishes and lambda = 2.
    PotentialParams warm;
    warm.temperature = 0.2;
    warm.dt = 0.01;
    Vector noise{1.0, -0.5, 0.25, 0.0};
    const auto o = langevin_step(LangevinState{}, Vector(kStateDim, 0.0), warm,
                                 Vector{1.0, -0.5, 0.25, 0.0, 0.0, 0.0, 0.0, 0.0});
    const double expect = std::sqrt(2.0 * 0.2 * 0.01) * 0.5;
    CHECK(o.xi.coords()[0] == doctest::Approx(expect).epsilon(1e-15));
    CHECK(o.xi.coords()[1] == doctest::Approx(-0.5 * expect).epsilon(1e-15));
}

TEST_CASE("langevin step never leaves the ball")
{
    Gen g(31);
    PotentialParams p;
    p.temperature = 5.0;
    p.dt = 0.1;
    for (int i = 0; i < 2000; ++i) {
        LangevinState s{BallPoint(g.ball_vector(kStateDim, 0.999)), 0};
        Vector noise = g.normal_vector(kStateDim);
        for (double& x : noise) x *= 50.0;
        const auto next = langevin_step(s, potential_gradient(s.xi, p), p, noise);
        CHECK(next.xi.norm() < 1.0);
    }
}

TEST_CASE("lifecycle bands")
{
    CHECK(lifecycle_of(on_axis(8, 0.3)) == LifecycleState::Active);
    CHECK(lifecycle_of(on_axis(8, 0.6)) == LifecycleState::Warm);
    CHECK(lifecycle_of(on_axis(8, 0.8)) == LifecycleState::Cold);
    CHECK(lifecycle_of(on_axis(8, 0.95)) == LifecycleState::Archived);
    CHECK(lifecycle_of(on_axis(8, 0.5)) == LifecycleState::Warm);
    CHECK(LifecycleState::Active < LifecycleState::Warm);
    CHECK(LifecycleState::Cold < LifecycleState::Archived);
    for (auto s : {LifecycleState::Active, LifecycleState::Warm, LifecycleState::Cold, LifecycleState::Archived})
        CHECK(lifecycle_from_string(to_string(s)) == s);
    CHECK_THROWS_AS(lifecycle_from_string("frozen"), std::invalid_argument);
}

TEST_CASE("access boost contracts the radius and never worsens the lifecycle")
{
    const LangevinState s{on_axis(8, 0.8), 5};
    CHECK(access_boost(s, 1.0).xi.norm() == 0.0);
    CHECK(access_boost(s, 0.5).xi.norm() == doctest::Approx(0.4).epsilon(1e-15));
    CHECK_THROWS_AS(access_boost(s, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(access_boost(s, 1.5), std::invalid_argument);

    Gen g(32);
    for (int i = 0; i < 1000; ++i) {
        const LangevinState x{BallPoint(g.ball_vector(kStateDim, 0.999)), 0};
        const auto b = access_boost(x, g.uniform(1e-3, 1.0));
        CHECK(b.xi.norm() <= x.xi.norm());
        CHECK(lifecycle_of(b.xi) <= lifecycle_of(x.xi));
    }

    // Ten boosts of 0.3 bring a memory at radius 0.9 back to the active band.
    LangevinState far{on_axis(8, 0.9), 0};
    for (int i = 0; i < 10; ++i) far = access_boost(far, 0.3);
    CHECK(lifecycle_of(far.xi) == LifecycleState::Active);
}

TEST_CASE("stationary density values")
{
    CHECK(stationary_density(BallPoint::origin(2), 0.0, 0.2, 2) == 1.0);
    const BallPoint a = on_axis(2, 0.3);
    const BallPoint b = on_axis(2, 0.7);
    const double ratio = stationary_density(a, 0.4, 0.2, 2) / stationary_density(b, 0.4, 0.2, 2);
    CHECK(ratio == doctest::Approx(std::pow((1.0 - 0.49) / (1.0 - 0.09), 2)).epsilon(1e-14));
}

TEST_CASE("maintenance pass with zero steps changes nothing")
{
    std::vector<MaintenanceItem> items;
    Gen g(33);
    for (MemoryId id = 1; id <= 20; ++id) {
        const BallPoint xi(g.ball_vector(kStateDim, 0.99));
        items.push_back({id, {xi, 7}, 0, 0.0, lifecycle_of(xi)});
    }
    const auto before = items;
    const auto rep = maintenance_pass(items, PotentialParams{}, 0, 1);
    CHECK(rep.transitions.empty());
    for (std::size_t i = 0; i < items.size(); ++i) {
        CHECK(items[i].state.xi == before[i].state.xi);
        CHECK(items[i].state.last_step_time == 7);
    }
    CHECK(rep.before == rep.after);
}

TEST_CASE("maintenance pass is deterministic, order independent and partitions the population")
{
    std::vector<MaintenanceItem> items;
    for (MemoryId id = 1; id <= 50; ++id) items.push_back({id, {}, 0, 0.0, LifecycleState::Active});
    auto a = items;
    auto b = items;
    std::vector<MaintenanceItem> reversed(items.rbegin(), items.rend());
    PotentialParams p;
    p.temperature = 1.0;
    const auto ra = maintenance_pass(a, p, 200, 99, {}, 1000);
    const auto rb = maintenance_pass(b, p, 200, 99, {}, 1000);
    maintenance_pass(reversed, p, 200, 99, {}, 1000);
    std::size_t total = 0;
    for (std::size_t i = 0; i < 4; ++i) total += ra.after[i];
    CHECK(total == items.size());
    CHECK(ra.transitions.size() == rb.transitions.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].state.xi == b[i].state.xi);
        CHECK(a[i].state.xi == reversed[a.size() - 1 - i].state.xi);
        CHECK(a[i].lifecycle == lifecycle_of(a[i].state.xi));
        CHECK(a[i].state.last_step_time == 1000);
    }
}

TEST_CASE("dormant memories sit farther out than frequently re-centered ones")
{
    PotentialParams p;
    p.temperature = 0.5;
    p.dt = 0.01;
    double dormant = 0.0;
    double recalled = 0.0;
    const int n = 100;
    for (int i = 0; i < n; ++i) {
        NoiseSource na(stream_seed(5, i));
        NoiseSource nb(stream_seed(5, i));
        LangevinState a;
        LangevinState b;
        Vector eta(kStateDim);
        for (int step = 0; step < 10000; ++step) {
            na.fill(eta);
            a = langevin_step(a, potential_gradient(a.xi, p), p, eta);
            nb.fill(eta);
            b = langevin_step(b, potential_gradient(b.xi, p), p, eta);
            if (step % 100 == 99) b = access_boost(b, 0.3);
        }
        dormant += a.xi.norm();
        recalled += b.xi.norm();
    }
    CHECK(dormant / n > recalled / n);
}

TEST_CASE("trajectories commute with rotations of the noise stream")
{
    Gen g(34);
    const auto q = random_rotation(g, kStateDim);
    PotentialParams p;
    p.temperature = 0.3;
    LangevinState a;
    LangevinState b;
    NoiseSource noise(77);
    Vector eta(kStateDim);
    for (int step = 0; step < 2000; ++step) {
        noise.fill(eta);
        a = langevin_step(a, potential_gradient(a.xi, p), p, eta);
        b = langevin_step(b, potential_gradient(b.xi, p), p, rotate(q, eta));
    }
    CHECK(a.xi.norm() == doctest::Approx(b.xi.norm()).epsilon(1e-9));
    CHECK(testing::max_abs_diff(rotate(q, a.xi.vector()), b.xi.vector()) < 1e-9);
}

TEST_CASE("noise streams are reproducible and distinct per key")
{
    NoiseSource a(stream_seed(1, 2));
    NoiseSource b(stream_seed(1, 2));
    NoiseSource c(stream_seed(1, 3));
    bool differs = false;
    for (int i = 0; i < 16; ++i) {
        const double x = a.next();
        CHECK(x == b.next());
        differs = differs || x != c.next();
    }
    CHECK(differs);
    CHECK(stream_seed(1, 2) != stream_seed(2, 1));
}
