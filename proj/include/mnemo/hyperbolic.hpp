#pragma once

// Poincare ball model (curvature -1): distance, Mobius addition, conformal
// factor, exponential and logarithmic maps. All functions are pure.

#include <span>

#include "mnemo/common.hpp"

namespace mnemo::hyperbolic {

/// Largest Euclidean norm any operation is allowed to produce.
inline constexpr double kMaxRadius = 1.0 - 1e-12;

/// A point of the open unit ball. Construction rejects norm >= 1 and
/// non-finite coordinates.
class BallPoint {
  public:
    explicit BallPoint(Vector coords);

    static BallPoint origin(std::size_t dim);

    /// Radially projects onto the closed ball of radius kMaxRadius when the
    /// input reaches or escapes it. Non-finite input still throws.
    static BallPoint clamped(Vector coords);

    std::span<const double> coords() const { return coords_; }
    const Vector& vector() const { return coords_; }
    std::size_t dim() const { return coords_.size(); }
    double squared_norm() const { return vec::squared_norm(coords_); }
    double norm() const { return vec::norm(coords_); }

    BallPoint negated() const;

    friend bool operator==(const BallPoint&, const BallPoint&) = default;

  private:
    struct Unchecked {};
    BallPoint(Vector coords, Unchecked) : coords_(std::move(coords)) {}

    Vector coords_;
};

struct TangentVector {
    TangentVector(BallPoint base, Vector direction);

    BallPoint base;
    Vector direction;
};

/// lambda_x = 2 / (1 - |x|^2)
double conformal_factor(const BallPoint& x);

double ball_distance(const BallPoint& x, const BallPoint& y);

BallPoint mobius_add(const BallPoint& x, const BallPoint& y);

BallPoint exp_map(const TangentVector& v);

TangentVector log_map(const BallPoint& x, const BallPoint& y);

} // namespace mnemo::hyperbolic
