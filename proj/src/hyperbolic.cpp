#include "mnemo/hyperbolic.hpp"

#include <cmath>
#include <stdexcept>

namespace mnemo::hyperbolic {

namespace {

Vector project_into_ball(Vector v)
{
    const double n = vec::norm(v);
    if (n >= kMaxRadius) {
        const double s = kMaxRadius / n;
        for (double& c : v) c *= s;
    }
    return v;
}

} // namespace

BallPoint::BallPoint(Vector coords) : coords_(std::move(coords))
{
    if (!vec::all_finite(coords_)) throw std::invalid_argument("BallPoint: non-finite coordinate");
    if (vec::squared_norm(coords_) >= 1.0)
        throw std::invalid_argument("BallPoint: norm must be strictly less than 1");
}

BallPoint BallPoint::origin(std::size_t dim) { return BallPoint(Vector(dim, 0.0), Unchecked{}); }

BallPoint BallPoint::clamped(Vector coords)
{
    if (!vec::all_finite(coords)) throw std::invalid_argument("BallPoint: non-finite coordinate");
    return BallPoint(project_into_ball(std::move(coords)), Unchecked{});
}

BallPoint BallPoint::negated() const
{
    Vector out(coords_);
    for (double& c : out) c = -c;
    return BallPoint(std::move(out), Unchecked{});
}

TangentVector::TangentVector(BallPoint base_point, Vector dir)
    : base(std::move(base_point)), direction(std::move(dir))
{
    vec::require_same_dim(base.coords(), direction);
    if (!vec::all_finite(direction)) throw std::invalid_argument("TangentVector: non-finite direction");
}

double conformal_factor(const BallPoint& x) { return 2.0 / (1.0 - x.squared_norm()); }

double ball_distance(const BallPoint& x, const BallPoint& y)
{
    vec::require_same_dim(x.coords(), y.coords());
    double diff2 = 0.0;
    for (std::size_t i = 0; i < x.dim(); ++i) {
        const double d = x.coords()[i] - y.coords()[i];
        diff2 += d * d;
    }
    const double z = 2.0 * diff2 / ((1.0 - x.squared_norm()) * (1.0 - y.squared_norm()));
    // arccosh(1 + z) without cancellation for small z
    return std::log1p(z + std::sqrt(z * (z + 2.0)));
}

BallPoint mobius_add(const BallPoint& x, const BallPoint& y)
{
    vec::require_same_dim(x.coords(), y.coords());
    const double xy = vec::dot(x.coords(), y.coords());
    const double x2 = x.squared_norm();
    const double y2 = y.squared_norm();
    const double a = 1.0 + 2.0 * xy + y2;
    const double b = 1.0 - x2;
    const double denom = 1.0 + 2.0 * xy + x2 * y2;
    Vector out(x.dim());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = (a * x.coords()[i] + b * y.coords()[i]) / denom;
    return BallPoint::clamped(std::move(out));
}

BallPoint exp_map(const TangentVector& v)
{
    const double vn = vec::norm(v.direction);
    if (vn == 0.0) return v.base;
    const double scale = std::tanh(conformal_factor(v.base) * vn / 2.0) / vn;
    Vector step(v.direction);
    for (double& c : step) c *= scale;
    return mobius_add(v.base, BallPoint::clamped(std::move(step)));
}

TangentVector log_map(const BallPoint& x, const BallPoint& y)
{
    const BallPoint diff = mobius_add(x.negated(), y);
    const double dn = diff.norm();
    if (dn == 0.0) return TangentVector(x, Vector(x.dim(), 0.0));
    const double scale = 2.0 / conformal_factor(x) * std::atanh(dn) / dn;
    Vector dir(diff.vector());
    for (double& c : dir) c *= scale;
    return TangentVector(x, std::move(dir));
}

} // namespace mnemo::hyperbolic
