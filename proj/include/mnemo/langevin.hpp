#pragma once

// Memory lifecycle as discretized Riemannian Langevin dynamics on the
// Poincare ball, plus the radial four-state lifecycle machine.

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "mnemo/common.hpp"
#include "mnemo/hyperbolic.hpp"

namespace mnemo::langevin {

using hyperbolic::BallPoint;

inline constexpr std::size_t kStateDim = 8;

struct LangevinState {
    BallPoint xi = BallPoint::origin(kStateDim);
    Timestamp last_step_time = 0;
};

struct PotentialParams {
    double alpha = 1.0;
    double beta = 0.1;
    double gamma = 0.5;
    double temperature = 0.1;
    double dt = 0.01;

    void validate() const;
};

enum class LifecycleState : std::uint8_t { Active = 0, Warm = 1, Cold = 2, Archived = 3 };

std::string_view to_string(LifecycleState s);
LifecycleState lifecycle_from_string(std::string_view s);

struct LifecycleThresholds {
    double warm = 0.5;
    double cold = 0.75;
    double archived = 0.9;
};

/// U = alpha |xi|^2 - beta n_access - gamma relevance
double potential(const BallPoint& xi, std::uint64_t n_access, double relevance,
                 const PotentialParams& p);

/// Euclidean gradient of the potential with respect to xi. Only the quadratic
/// term depends on xi.
Vector potential_gradient(const BallPoint& xi, const PotentialParams& p);

/// One Euler-Maruyama step; noise is a unit-Gaussian vector of the state
/// dimension supplied by the caller. The result is projected back into the ball.
LangevinState langevin_step(const LangevinState& s, std::span<const double> grad_u,
                            const PotentialParams& p, std::span<const double> noise);

LifecycleState lifecycle_of(const BallPoint& xi, const LifecycleThresholds& t = {});

/// Radial contraction toward the origin: xi' = (1 - strength) xi.
LangevinState access_boost(const LangevinState& s, double strength);

/// Unnormalized (1 - |xi|^2)^(-d) exp(-U/T).
double stationary_density(const BallPoint& xi, double u_at_xi, double temperature, int dim);

/// Seedable unit-Gaussian stream.
class NoiseSource {
  public:
    explicit NoiseSource(std::uint64_t seed) : engine_(seed) {}

    double next() { return normal_(engine_); }
    void fill(std::span<double> out)
    {
        for (double& x : out) x = next();
    }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Derives an independent stream seed for one memory from a pass seed.
std::uint64_t stream_seed(std::uint64_t pass_seed, std::uint64_t key);

struct MaintenanceItem {
    MemoryId id = 0;
    LangevinState state;
    std::uint64_t n_access = 0;
    double relevance = 0.0;
    LifecycleState lifecycle = LifecycleState::Active;
};

struct Transition {
    MemoryId id = 0;
    LifecycleState from = LifecycleState::Active;
    LifecycleState to = LifecycleState::Active;
};

struct MaintenanceReport {
    std::vector<Transition> transitions;
    std::array<std::size_t, 4> before{};
    std::array<std::size_t, 4> after{};
    std::uint64_t steps = 0;
};

/// Advances every item `steps` times in place and re-derives its lifecycle.
/// Each item draws noise from stream_seed(seed, id), so the result does not
/// depend on item order.
MaintenanceReport maintenance_pass(std::span<MaintenanceItem> items, const PotentialParams& p,
                                   std::uint64_t steps, std::uint64_t seed,
                                   const LifecycleThresholds& thresholds = {},
                                   Timestamp now = 0);

} // namespace mnemo::langevin
