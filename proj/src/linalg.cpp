#include "relicmp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace relicmp {

namespace {

void check_square_symmetric(const Matrix& a, double tol) {
  if (a.rows() != a.cols() || a.rows() == 0)
    fail(Errc::non_symmetric, "matrix must be square and non-empty");
  double scale = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      scale = std::max(scale, std::abs(a(i, j)));
      if (j > i) worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
    }
  if (worst > tol * std::max(scale, 1.0))
    fail(Errc::non_symmetric, "asymmetry " + std::to_string(worst) + " exceeds tolerance");
}

}  // namespace

EigenSym eigen_sym(const Matrix& input, double sym_tol) {
  check_square_symmetric(input, sym_tol);
  const std::size_t n = input.rows();
  Matrix a = input;
  // symmetrize exactly so rotations stay consistent
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double m = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = a(j, i) = m;
    }
  Matrix v = Matrix::identity(n);

  auto offdiag_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
  };
  double fro = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) fro += a(i, j) * a(i, j);
  fro = std::sqrt(fro);
  const double stop = 1e-15 * std::max(fro, 1e-300);

  for (int sweep = 0; sweep < 64 && offdiag_norm() > stop; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double api = a(p, i), aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  EigenSym out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return out.values[x] < out.values[y]; });
  EigenSym sorted;
  sorted.values.resize(n);
  sorted.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    sorted.values[j] = out.values[order[j]];
    for (std::size_t i = 0; i < n; ++i) sorted.vectors(i, j) = v(i, order[j]);
  }
  return sorted;
}

Matrix pseudoinverse(const Matrix& a) {
  const EigenSym eig = eigen_sym(a);
  const std::size_t n = a.rows();
  double max_abs = 0.0;
  for (double l : eig.values) max_abs = std::max(max_abs, std::abs(l));
  const double cut = 1e-10 * max_abs;
  Matrix out(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const double l = eig.values[j];
    if (std::abs(l) <= cut) continue;
    const double inv = 1.0 / l;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        out(r, c) += inv * eig.vectors(r, j) * eig.vectors(c, j);
  }
  return out;
}

Matrix cholesky_psd(const Matrix& input) {
  check_square_symmetric(input, 1e-12);
  const std::size_t n = input.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(input(i, i)));

  // plain Cholesky first; bail to the eigenvalue factor on a weak pivot
  Matrix l(n, n);
  bool ok = true;
  for (std::size_t j = 0; j < n && ok; ++j) {
    double d = input(j, j);
    for (std::size_t t = 0; t < j; ++t) d -= l(j, t) * l(j, t);
    if (d <= 1e-12 * std::max(max_diag, 1e-300)) {
      ok = false;
      break;
    }
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = input(i, j);
      for (std::size_t t = 0; t < j; ++t) s -= l(i, t) * l(j, t);
      l(i, j) = s / l(j, j);
    }
  }
  if (ok) return l;

  const EigenSym eig = eigen_sym(input);
  const double lambda_max = std::max(eig.values.back(), 0.0);
  if (eig.values.front() < -1e-8 * std::max(lambda_max, 1e-300))
    fail(Errc::not_psd, "smallest eigenvalue " + std::to_string(eig.values.front()) +
                            " below PSD tolerance");
  // eigenvalues at roundoff level are treated as exact zeros so the factor
  // does not leak sqrt(eps)-sized components into null directions
  const double cut = 1e-12 * lambda_max;
  Matrix f(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = eig.values[j] > cut ? std::sqrt(eig.values[j]) : 0.0;
    for (std::size_t i = 0; i < n; ++i) f(i, j) = eig.vectors(i, j) * s;
  }
  return f;
}

std::vector<double> inverse_diagonal(const Matrix& a) {
  const EigenSym eig = eigen_sym(a);
  const std::size_t n = a.rows();
  double max_abs = 0.0;
  for (double l : eig.values) max_abs = std::max(max_abs, std::abs(l));
  if (max_abs == 0.0 || std::abs(eig.values.front()) <= 1e-10 * max_abs ||
      eig.values.front() < 0.0)
    fail(Errc::invalid_request, "matrix is numerically singular or indefinite");
  std::vector<double> diag(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double inv = 1.0 / eig.values[j];
    for (std::size_t i = 0; i < n; ++i) diag[i] += inv * eig.vectors(i, j) * eig.vectors(i, j);
  }
  return diag;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t t = 0; t < a.cols(); ++t) {
      const double ait = a(i, t);
      if (ait == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += ait * b(t, j);
    }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

}  // namespace relicmp
