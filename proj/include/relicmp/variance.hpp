#pragma once

#include <array>
#include <vector>

#include "relicmp/coefficients.hpp"
#include "relicmp/stats.hpp"
#include "relicmp/types.hpp"

namespace relicmp {

enum class VarianceKind { adf, normal_theory };

struct VarianceEstimate {
  double value = 0.0;                      // pooled estimate
  std::array<double, 2> per_group{0, 0};   // group components before pooling weights
  VarianceKind method = VarianceKind::adf;
};

/// Symmetric matrix view of a vecs-order gradient: diagonal entries carry the
/// diagonal derivatives, off-diagonal entries half the pair derivative, so
/// d' Delta d equals delta' vecs(d d').
Matrix delta_matrix(const std::vector<double>& delta, std::size_t k);

/// Single-group component of the pooled moment-based variance estimator:
/// (1/(n-1)) sum_i (delta'(S_i - S))^2 with S = vecs of the sample covariance
/// and S_i the vecs of the centered outer product of row i.
double adf_variance_component(const Matrix& data, const CovarianceSummary& cov,
                              const std::vector<double>& delta);

/// Pooled two-sample variance estimate (n2/N) comp1 + (n1/N) comp2 for the
/// difference statistic, with group-specific delta vectors evaluated at the
/// group sample covariances. Item counts may differ between groups.
VarianceEstimate pooled_adf_variance(const Matrix& data1, const Matrix& data2,
                                     const Coefficient& coef1 = {}, const Coefficient& coef2 = {});

/// Normality-based limit variance of sqrt(n) alpha-hat evaluated at a
/// covariance matrix: (2k^2/(k-1)^2) [S (tr Sigma^2 + T^2) - 2 T 1'Sigma^2 1] / S^3.
double normal_theory_variance(const CovarianceSummary& cov);

/// Pooled normal-theory variant with the same (n2/N, n1/N) weights.
VarianceEstimate pooled_normal_theory_variance(const Matrix& data1, const Matrix& data2);

/// Plug-in variance of sqrt(N)(coef(Sigma1) - coef(Sigma2)) for a paired
/// design: columns [0,k1) are occasion one, [k1,k1+k2) occasion two. The
/// stacked gradient has zeros on cross-block coordinates; the projection
/// variance is taken over the N paired rows.
double paired_plugin_variance(const Matrix& data, std::size_t k1, std::size_t k2,
                              const Coefficient& coef1 = {}, const Coefficient& coef2 = {});

}  // namespace relicmp
