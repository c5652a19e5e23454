#include "mnemo/langevin.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mnemo::langevin {

void PotentialParams::validate() const
{
    if (alpha < 0.0 || beta < 0.0 || gamma < 0.0)
        throw std::invalid_argument("PotentialParams: alpha, beta, gamma must be non-negative");
    if (!(temperature > 0.0)) throw std::invalid_argument("PotentialParams: temperature must be positive");
    if (!(dt > 0.0) || dt > 0.1) throw std::invalid_argument("PotentialParams: dt must be in (0, 0.1]");
}

std::string_view to_string(LifecycleState s)
{
    switch (s) {
    case LifecycleState::Active: return "active";
    case LifecycleState::Warm: return "warm";
    case LifecycleState::Cold: return "cold";
    case LifecycleState::Archived: return "archived";
    }
    return "active";
}

LifecycleState lifecycle_from_string(std::string_view s)
{
    if (s == "active") return LifecycleState::Active;
    if (s == "warm") return LifecycleState::Warm;
    if (s == "cold") return LifecycleState::Cold;
    if (s == "archived") return LifecycleState::Archived;
    throw std::invalid_argument("unknown lifecycle state: " + std::string(s));
}

double potential(const BallPoint& xi, std::uint64_t n_access, double relevance,
                 const PotentialParams& p)
{
    return p.alpha * xi.squared_norm() - p.beta * static_cast<double>(n_access) -
           p.gamma * relevance;
}

Vector potential_gradient(const BallPoint& xi, const PotentialParams& p)
{
    Vector g(xi.vector());
    for (double& c : g) c *= 2.0 * p.alpha;
    return g;
}

LangevinState langevin_step(const LangevinState& s, std::span<const double> grad_u,
                            const PotentialParams& p, std::span<const double> noise)
{
    const auto xi = s.xi.coords();
    vec::require_same_dim(xi, grad_u);
    vec::require_same_dim(xi, noise);
    const double inv_lambda = 1.0 / hyperbolic::conformal_factor(s.xi);
    const double d = static_cast<double>(xi.size());
    const double drift = inv_lambda * inv_lambda * p.dt;
    const double correction = 0.5 * p.temperature * (d - 2.0) * inv_lambda * p.dt;
    const double diffusion = std::sqrt(2.0 * p.temperature * p.dt) * inv_lambda;

    Vector next(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i)
        next[i] = xi[i] - drift * grad_u[i] + correction * xi[i] + diffusion * noise[i];
    return LangevinState{BallPoint::clamped(std::move(next)), s.last_step_time};
}

LifecycleState lifecycle_of(const BallPoint& xi, const LifecycleThresholds& t)
{
    const double r = xi.norm();
    if (r < t.warm) return LifecycleState::Active;
    if (r < t.cold) return LifecycleState::Warm;
    if (r < t.archived) return LifecycleState::Cold;
    return LifecycleState::Archived;
}

LangevinState access_boost(const LangevinState& s, double strength)
{
    if (!(strength > 0.0 && strength <= 1.0))
        throw std::invalid_argument("access_boost: strength must be in (0, 1]");
    Vector out(s.xi.vector());
    for (double& c : out) c *= (1.0 - strength);
    return LangevinState{BallPoint::clamped(std::move(out)), s.last_step_time};
}

double stationary_density(const BallPoint& xi, double u_at_xi, double temperature, int dim)
{
    return std::pow(1.0 - xi.squared_norm(), -static_cast<double>(dim)) *
           std::exp(-u_at_xi / temperature);
}

std::uint64_t stream_seed(std::uint64_t pass_seed, std::uint64_t key)
{
    // splitmix64 finalizer over the combined words
    std::uint64_t z = pass_seed ^ (key + 0x9e3779b97f4a7c15ULL + (pass_seed << 6) + (pass_seed >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

MaintenanceReport maintenance_pass(std::span<MaintenanceItem> items, const PotentialParams& p,
                                   std::uint64_t steps, std::uint64_t seed,
                                   const LifecycleThresholds& thresholds, Timestamp now)
{
    p.validate();
    MaintenanceReport report;
    report.steps = steps;
    for (auto& item : items) {
        report.before[static_cast<std::size_t>(item.lifecycle)]++;
        if (steps > 0) {
            NoiseSource noise(stream_seed(seed, static_cast<std::uint64_t>(item.id)));
            Vector eta(item.state.xi.dim());
            for (std::uint64_t s = 0; s < steps; ++s) {
                noise.fill(eta);
                const Vector grad = potential_gradient(item.state.xi, p);
                item.state = langevin_step(item.state, grad, p, eta);
            }
            item.state.last_step_time = now;
        }
        const LifecycleState next = steps > 0 ? lifecycle_of(item.state.xi, thresholds) : item.lifecycle;
        if (next != item.lifecycle) report.transitions.push_back({item.id, item.lifecycle, next});
        item.lifecycle = next;
        report.after[static_cast<std::size_t>(item.lifecycle)]++;
    }
    return report;
}

} // namespace mnemo::langevin
