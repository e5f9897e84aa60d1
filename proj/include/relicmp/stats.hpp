#pragma once

#include <vector>

#include "relicmp/types.hpp"

namespace relicmp {

/// Sample covariance of an item-response matrix with the cached quantities
/// every reliability functional needs: tr(Sigma), 1'Sigma 1, and the
/// half-vectorization in column-major lower-triangle order.
struct CovarianceSummary {
  Matrix matrix;                 // k x k, exactly symmetric
  double trace = 0.0;            // sum of diagonal
  double total = 0.0;            // 1' Sigma 1
  std::vector<double> halfvec;   // length k(k+1)/2, vecs order

  std::size_t k() const { return matrix.rows(); }
  bool zero_total() const { return total == 0.0; }
};

/// Position of (i,j), i >= j, in the column-major lower-triangle stacking
/// (s11, s21, ..., sk1, s22, ..., skk).
inline std::size_t vecs_index(std::size_t i, std::size_t j, std::size_t k) {
  // column j contributes k - j entries, starting at row j
  return j * k - j * (j - 1) / 2 + (i - j);
}

inline std::size_t vecs_length(std::size_t k) { return k * (k + 1) / 2; }

/// Column-major lower-triangle stacking of a symmetric matrix.
/// Throws NonSymmetric beyond a relative tolerance of 1e-12.
std::vector<double> vecs(const Matrix& sym);

/// Inverse of vecs: rebuilds the symmetric k x k matrix.
Matrix unvecs(const std::vector<double>& v, std::size_t k);

/// Covariance with divisor N-1 and column means subtracted.
/// Throws DegenerateInput for N < 2 or k < 2.
CovarianceSummary sample_covariance(const Matrix& data);

/// Builds the summary caches for an already-known covariance matrix.
CovarianceSummary summarize_covariance(const Matrix& sigma);

/// Coefficient alpha (k/(k-1)) (1 - tr/total). May be negative; never clamped.
/// Throws ZeroTotalVariance when total == 0.
double cronbach_alpha(const CovarianceSummary& cov);

}  // namespace relicmp
