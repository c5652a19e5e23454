#include "mnemo/analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mnemo::analysis {

namespace {

// Continued fraction for I_x(a, b), valid for x < (a + 1) / (a + b + 2).
double beta_cf(double x, double a, double b)
{
    constexpr int kMaxIter = 10000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw Error("incomplete beta: continued fraction did not converge");
}

void check_patterns(const Eigen::MatrixXd& x, const Eigen::VectorXd& xi, double beta)
{
    if (x.cols() == 0) throw std::invalid_argument("hopfield: empty pattern set");
    if (x.rows() != xi.size()) throw DimensionMismatch(static_cast<std::size_t>(x.rows()), static_cast<std::size_t>(xi.size()));
    if (!(beta > 0.0)) throw std::invalid_argument("hopfield: beta must be positive");
}

} // namespace

double incomplete_beta(double x, double a, double b)
{
    if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("incomplete beta: a and b must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete beta: x outside [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(x, a, b) / a;
    return 1.0 - front * beta_cf(1.0 - x, b, a) / b;
}

double cap_fraction(int d, double eps)
{
    if (d < 2) throw std::invalid_argument("cap_fraction: d must be >= 2");
    if (!(eps > 0.0 && eps <= 2.0)) throw std::invalid_argument("cap_fraction: eps outside (0, 2]");
    if (eps == 1.0) return 0.5;
    if (eps == 2.0) return 1.0;
    const double a = 0.5 * (d - 1);
    if (eps < 1.0) return 0.5 * incomplete_beta(eps * (2.0 - eps), a, 0.5);
    const double e = 2.0 - eps;
    return 1.0 - 0.5 * incomplete_beta(e * (2.0 - e), a, 0.5);
}

double expected_neighbor_count(std::uint64_t n, int d, double eps)
{
    return static_cast<double>(n) * cap_fraction(d, eps);
}

double cosine_snr(std::uint64_t n, std::uint64_t k_rel, int d, double eps)
{
    if (k_rel < 1) throw std::invalid_argument("cosine_snr: k_rel must be >= 1");
    const double k = static_cast<double>(k_rel);
    return k / std::max(k, expected_neighbor_count(n, d, eps));
}

double expected_contradictions(std::uint64_t n, double p_c)
{
    if (!(p_c >= 0.0 && p_c <= 1.0)) throw std::invalid_argument("expected_contradictions: p_c outside [0, 1]");
    const double nn = static_cast<double>(n);
    return n < 2 ? 0.0 : nn * (nn - 1.0) / 2.0 * p_c;
}

double optimal_depth(std::uint64_t n, double r)
{
    if (n < 1) throw std::invalid_argument("optimal_depth: N must be >= 1");
    if (!(r > 1.0)) throw std::invalid_argument("optimal_depth: r must be > 1");
    return std::log(static_cast<double>(n)) / (2.0 * std::log(r));
}

double hopfield_energy(const Eigen::MatrixXd& x, const Eigen::VectorXd& xi, double beta)
{
    check_patterns(x, xi, beta);
    const Eigen::VectorXd z = beta * (x.transpose() * xi);
    const double zmax = z.maxCoeff();
    const double lse = (zmax + std::log((z.array() - zmax).exp().sum())) / beta;
    const double m = static_cast<double>(x.cols());
    const double max_sq = x.colwise().squaredNorm().maxCoeff();
    return -lse + 0.5 * xi.squaredNorm() + std::log(m) / beta + 0.5 * max_sq;
}

Eigen::VectorXd hopfield_update(const Eigen::MatrixXd& x, const Eigen::VectorXd& xi, double beta)
{
    check_patterns(x, xi, beta);
    const Eigen::VectorXd z = beta * (x.transpose() * xi);
    Eigen::VectorXd p = (z.array() - z.maxCoeff()).exp();
    p /= p.sum();
    return x * p;
}

} // namespace mnemo::analysis
