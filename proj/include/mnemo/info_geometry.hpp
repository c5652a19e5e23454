#pragma once

// Diagonal-Gaussian statistical manifold: Fisher-Rao distance, variance
// estimation from raw embeddings and the variance-weighted retrieval score
// with its cosine -> Fisher access ramp.

#include <cstdint>
#include <optional>
#include <span>

#include "mnemo/common.hpp"

namespace mnemo::info {

inline constexpr double kDefaultVarFloor = 1e-6;

/// (mu, sigma^2) of a diagonal Gaussian. Every variance component must be at
/// least var_floor.
class GaussianEmbedding {
  public:
    GaussianEmbedding(Vector mu, Vector var, double var_floor = kDefaultVarFloor);

    std::span<const double> mu() const { return mu_; }
    std::span<const double> var() const { return var_; }
    const Vector& mu_vector() const { return mu_; }
    const Vector& var_vector() const { return var_; }
    std::size_t dim() const { return mu_.size(); }

  private:
    Vector mu_;
    Vector var_;
};

struct SimilarityConfig {
    /// Temperature of the retrieval score; unset means "embedding dimension".
    std::optional<double> temperature;
    std::uint32_t ramp_threshold = 10;
    double sigma_min_sq = 0.1;
    double sigma_max_sq = 1.0;
    double eps_var = 1e-6;
    double var_floor = kDefaultVarFloor;

    double temperature_for(std::size_t dim) const
    {
        return temperature ? *temperature : static_cast<double>(dim);
    }

    /// Throws std::invalid_argument when the invariants do not hold.
    void validate() const;
};

/// Closed-form distance between diagonal Gaussians; one pass, O(1) extra space.
double fisher_rao_distance(const GaussianEmbedding& p, const GaussianEmbedding& q);

/// Square of fisher_rao_distance. The per-dimension terms are accumulated in
/// dimension order, so the value equals the in-order sum of the d = 1 values.
double fisher_rao_distance_squared(const GaussianEmbedding& p, const GaussianEmbedding& q);

/// mu = e, variance mapped from |e_k| / max_j |e_j| of the normalized vector.
GaussianEmbedding estimate_variance(std::span<const double> e, const SimilarityConfig& cfg = {});

/// exp(-(1/T) sum_k (mu_q - mu_m)^2 / var_m). Only the memory variance is used.
double fisher_score(const GaussianEmbedding& query, const GaussianEmbedding& memory,
                    const SimilarityConfig& cfg = {});

double cosine_score(std::span<const double> u, std::span<const double> v);

/// Blend weight of the Fisher score after n_access accesses.
double ramp_weight(std::uint64_t n_access, const SimilarityConfig& cfg = {});

double effective_score(const GaussianEmbedding& query, const GaussianEmbedding& memory,
                       std::uint64_t n_access, const SimilarityConfig& cfg = {});

enum class TieWinner { Tie, First, Second };

struct TieBreak {
    double distance_a = 0.0;
    double distance_b = 0.0;
    TieWinner winner = TieWinner::Tie;
    bool broken() const { return winner != TieWinner::Tie; }
};

/// Orders two cosine-tied memories by Fisher-Rao distance to the query.
/// Throws std::invalid_argument if the cosine scores differ by more than 1e-12.
TieBreak fisher_breaks_tie(const GaussianEmbedding& query, const GaussianEmbedding& a,
                           const GaussianEmbedding& b);

} // namespace mnemo::info
