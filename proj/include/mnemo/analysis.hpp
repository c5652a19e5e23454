#pragma once

// Scale-analysis numerics: spherical-cap concentration, cosine crowding,
// contradiction growth, hierarchical depth and modern Hopfield energy.
// Nothing here feeds retrieval.

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "mnemo/common.hpp"

namespace mnemo::analysis {

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double incomplete_beta(double x, double a, double b);

/// Fraction of S^{d-1} with 1 - <q, v> <= eps:
/// 1/2 I_{eps(2-eps)}((d-1)/2, 1/2) for eps <= 1, completed by symmetry above.
double cap_fraction(int d, double eps);

double expected_neighbor_count(std::uint64_t n, int d, double eps);

/// K_rel / max(K_rel, expected neighbour count).
double cosine_snr(std::uint64_t n, std::uint64_t k_rel, int d, double eps);

/// N (N - 1) / 2 * p_c
double expected_contradictions(std::uint64_t n, double p_c);

/// log N / (2 log r)
double optimal_depth(std::uint64_t n, double r);

/// Patterns are the columns of x (d x M), each of unit norm.
double hopfield_energy(const Eigen::MatrixXd& x, const Eigen::VectorXd& xi, double beta);

/// X softmax(beta X^T xi)
Eigen::VectorXd hopfield_update(const Eigen::MatrixXd& x, const Eigen::VectorXd& xi, double beta);

} // namespace mnemo::analysis
