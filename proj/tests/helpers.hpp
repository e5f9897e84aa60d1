#pragma once

#include <cmath>
#include <vector>

#include "relicmp/rng.hpp"
#include "relicmp/stats.hpp"
#include "relicmp/types.hpp"

namespace testutil {

using relicmp::Matrix;

inline Matrix random_matrix(std::size_t rows, std::size_t cols, relicmp::RngStream& rng) {
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.next_normal();
  return m;
}

/// Random PSD matrix B'B/k + ridge, comfortably away from singularity.
inline Matrix random_psd(std::size_t k, relicmp::RngStream& rng, double ridge = 0.2) {
  const Matrix b = random_matrix(k + 2, k, rng);
  Matrix s(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < k + 2; ++t) acc += b(t, i) * b(t, j);
      s(i, j) = acc / static_cast<double>(k);
    }
  for (std::size_t i = 0; i < k; ++i) s(i, i) += ridge;
  return s;
}

/// Straight-loop evaluation of the pooled two-sample variance estimator,
/// written independently of the library code paths: explicit vecs stacking,
/// explicit delta entries, naive summation.
inline double brute_pooled_alpha_variance(const Matrix& d1, const Matrix& d2) {
  auto component = [](const Matrix& d) {
    const std::size_t n = d.rows(), k = d.cols();
    std::vector<double> mean(k, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < k; ++c) mean[c] += d(r, c) / static_cast<double>(n);
    // covariance, divisor n-1
    std::vector<std::vector<double>> sig(k, std::vector<double>(k, 0.0));
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
          sig[i][j] += (d(r, i) - mean[i]) * (d(r, j) - mean[j]) / static_cast<double>(n - 1);
    double tr = 0.0, tot = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      tr += sig[i][i];
      for (std::size_t j = 0; j < k; ++j) tot += sig[i][j];
    }
    const double kk = static_cast<double>(k);
    const double off = 2.0 * kk / (kk - 1.0) * tr / (tot * tot);
    const double diag = -kk / (kk - 1.0) * (tot - tr) / (tot * tot);
    // delta' (S_i - S) with column-major lower-triangle stacking
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double w = 0.0;
      for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = j; i < k; ++i) {
          const double si = (d(r, i) - mean[i]) * (d(r, j) - mean[j]);
          const double entry = si - sig[i][j];
          w += (i == j ? diag : off) * entry;
        }
      acc += w * w;
    }
    return acc / static_cast<double>(n - 1);
  };
  const double n1 = static_cast<double>(d1.rows());
  const double n2 = static_cast<double>(d2.rows());
  return (n2 / (n1 + n2)) * component(d1) + (n1 / (n1 + n2)) * component(d2);
}

/// Central finite difference of a functional of the covariance matrix with
/// symmetric off-diagonal perturbation, stacked in vecs order.
template <typename F>
std::vector<double> finite_difference_gradient(const Matrix& sigma, F&& value, double h = 1e-5) {
  const std::size_t k = sigma.rows();
  std::vector<double> g;
  g.reserve(relicmp::vecs_length(k));
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = j; i < k; ++i) {
      Matrix up = sigma, down = sigma;
      up(i, j) += h;
      down(i, j) -= h;
      if (i != j) {
        up(j, i) += h;
        down(j, i) -= h;
      }
      g.push_back((value(up) - value(down)) / (2.0 * h));
    }
  return g;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace testutil
