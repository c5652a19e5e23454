#include "mnemo/info_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mnemo::info {

GaussianEmbedding::GaussianEmbedding(Vector mu, Vector var, double var_floor)
    : mu_(std::move(mu)), var_(std::move(var))
{
    vec::require_same_dim(mu_, var_);
    if (!vec::all_finite(mu_)) throw std::invalid_argument("GaussianEmbedding: non-finite mean");
    for (double v : var_) {
        if (!std::isfinite(v) || v < var_floor)
            throw std::invalid_argument("GaussianEmbedding: variance below floor");
    }
}

void SimilarityConfig::validate() const
{
    if (temperature && !(*temperature > 0.0))
        throw std::invalid_argument("SimilarityConfig: temperature must be positive");
    if (ramp_threshold < 1) throw std::invalid_argument("SimilarityConfig: ramp_threshold >= 1");
    if (!(sigma_min_sq > 0.0 && sigma_min_sq < sigma_max_sq && eps_var > 0.0))
        throw std::invalid_argument("SimilarityConfig: need 0 < sigma_min_sq < sigma_max_sq, eps > 0");
}

double fisher_rao_distance_squared(const GaussianEmbedding& p, const GaussianEmbedding& q)
{
    vec::require_same_dim(p.mu(), q.mu());
    const auto mp = p.mu(), mq = q.mu(), vp = p.var(), vq = q.var();
    double total = 0.0;
    for (std::size_t k = 0; k < mp.size(); ++k) {
        // [2 log(s2/s1)]^2 == (log v2 - log v1)^2, written so that swapping
        // the arguments is bit-for-bit symmetric.
        const double log_gap = std::log(vq[k]) - std::log(vp[k]);
        const double mean_gap = mp[k] - mq[k];
        total += log_gap * log_gap + mean_gap * mean_gap / (vp[k] + vq[k]);
    }
    return total;
}

double fisher_rao_distance(const GaussianEmbedding& p, const GaussianEmbedding& q)
{
    return std::sqrt(fisher_rao_distance_squared(p, q));
}

GaussianEmbedding estimate_variance(std::span<const double> e, const SimilarityConfig& cfg)
{
    cfg.validate();
    const double n = vec::norm(e);
    if (!(n > 0.0) || !std::isfinite(n))
        throw std::invalid_argument("estimate_variance: embedding must be a finite nonzero vector");
    double max_abs = 0.0;
    for (double x : e) max_abs = std::max(max_abs, std::abs(x / n));
    Vector var(e.size());
    const double span = cfg.sigma_max_sq - cfg.sigma_min_sq;
    for (std::size_t k = 0; k < e.size(); ++k) {
        const double ratio = std::abs(e[k] / n) / max_abs;
        var[k] = cfg.sigma_max_sq - span * ratio + cfg.eps_var;
    }
    return GaussianEmbedding(Vector(e.begin(), e.end()), std::move(var), cfg.var_floor);
}

double fisher_score(const GaussianEmbedding& query, const GaussianEmbedding& memory,
                    const SimilarityConfig& cfg)
{
    vec::require_same_dim(query.mu(), memory.mu());
    const auto mq = query.mu(), mm = memory.mu(), vm = memory.var();
    double acc = 0.0;
    for (std::size_t k = 0; k < mq.size(); ++k) {
        const double g = mq[k] - mm[k];
        acc += g * g / vm[k];
    }
    return std::exp(-acc / cfg.temperature_for(mq.size()));
}

double cosine_score(std::span<const double> u, std::span<const double> v)
{
    vec::require_same_dim(u, v);
    const double nu = vec::norm(u), nv = vec::norm(v);
    if (nu == 0.0 || nv == 0.0) throw std::invalid_argument("cosine_score: zero vector");
    return std::clamp(vec::dot(u, v) / (nu * nv), -1.0, 1.0);
}

double ramp_weight(std::uint64_t n_access, const SimilarityConfig& cfg)
{
    return std::min(static_cast<double>(n_access) / static_cast<double>(cfg.ramp_threshold), 1.0);
}

double effective_score(const GaussianEmbedding& query, const GaussianEmbedding& memory,
                       std::uint64_t n_access, const SimilarityConfig& cfg)
{
    const double alpha = ramp_weight(n_access, cfg);
    if (alpha == 0.0) return cosine_score(query.mu(), memory.mu());
    if (alpha == 1.0) return fisher_score(query, memory, cfg);
    return (1.0 - alpha) * cosine_score(query.mu(), memory.mu()) +
           alpha * fisher_score(query, memory, cfg);
}

TieBreak fisher_breaks_tie(const GaussianEmbedding& query, const GaussianEmbedding& a,
                           const GaussianEmbedding& b)
{
    const double ca = cosine_score(query.mu(), a.mu());
    const double cb = cosine_score(query.mu(), b.mu());
    if (std::abs(ca - cb) > 1e-12)
        throw std::invalid_argument("fisher_breaks_tie: memories are not cosine-tied");
    TieBreak out;
    out.distance_a = fisher_rao_distance(query, a);
    out.distance_b = fisher_rao_distance(query, b);
    if (out.distance_a < out.distance_b)
        out.winner = TieWinner::First;
    else if (out.distance_b < out.distance_a)
        out.winner = TieWinner::Second;
    return out;
}

} // namespace mnemo::info
