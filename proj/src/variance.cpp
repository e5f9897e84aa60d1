#include "relicmp/variance.hpp"

#include <cmath>

#include "relicmp/kernels.hpp"

namespace relicmp {

Matrix delta_matrix(const std::vector<double>& delta, std::size_t k) {
  Matrix m(k, k);
  std::size_t p = 0;
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = j; i < k; ++i, ++p) {
      if (i == j) {
        m(i, i) = delta[p];
      } else {
        m(i, j) = 0.5 * delta[p];
        m(j, i) = 0.5 * delta[p];
      }
    }
  return m;
}

namespace {

struct Projector {
  Matrix dm;
  std::vector<double> scratch;
  explicit Projector(const std::vector<double>& delta, std::size_t k)
      : dm(delta_matrix(delta, k)), scratch(k) {}
  double operator()(const double* d) {
    kernels::matvec(dm.data(), d, scratch.data(), dm.rows(), dm.cols());
    return kernels::dot(d, scratch.data(), dm.rows());
  }
};

std::vector<double> column_means(const Matrix& data) {
  std::vector<double> mean(data.cols(), 0.0);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const double* row = data.row(r);
    for (std::size_t c = 0; c < data.cols(); ++c) mean[c] += row[c];
  }
  for (auto& m : mean) m /= static_cast<double>(data.rows());
  return mean;
}

}  // namespace

double adf_variance_component(const Matrix& data, const CovarianceSummary& cov,
                              const std::vector<double>& delta) {
  const std::size_t n = data.rows(), k = data.cols();
  if (n < 2) fail(Errc::degenerate_input, "variance component: need at least 2 rows");
  Projector project(delta, k);
  const double center = kernels::dot(delta.data(), cov.halfvec.data(), delta.size());
  const std::vector<double> mean = column_means(data);
  std::vector<double> d(k);
  double acc = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = data.row(r);
    for (std::size_t c = 0; c < k; ++c) d[c] = row[c] - mean[c];
    const double w = project(d.data()) - center;
    acc += w * w;
  }
  return acc / static_cast<double>(n - 1);
}

VarianceEstimate pooled_adf_variance(const Matrix& data1, const Matrix& data2,
                                     const Coefficient& coef1, const Coefficient& coef2) {
  validate_item_matrix(data1, "group 1");
  validate_item_matrix(data2, "group 2");
  const CovarianceSummary cov1 = sample_covariance(data1);
  const CovarianceSummary cov2 = sample_covariance(data2);
  const double n1 = static_cast<double>(data1.rows());
  const double n2 = static_cast<double>(data2.rows());
  const double n = n1 + n2;
  VarianceEstimate out;
  out.method = VarianceKind::adf;
  out.per_group[0] = adf_variance_component(data1, cov1, coef1.gradient(cov1));
  out.per_group[1] = adf_variance_component(data2, cov2, coef2.gradient(cov2));
  out.value = (n2 / n) * out.per_group[0] + (n1 / n) * out.per_group[1];
  return out;
}

double normal_theory_variance(const CovarianceSummary& cov) {
  if (cov.zero_total()) fail(Errc::zero_total_variance, "normal-theory variance: total is zero");
  const std::size_t kk = cov.k();
  const double k = static_cast<double>(kk);
  const Matrix& s = cov.matrix;
  double frob2 = 0.0;  // tr(Sigma^2) for symmetric Sigma
  for (std::size_t i = 0; i < kk; ++i)
    for (std::size_t j = 0; j < kk; ++j) frob2 += s(i, j) * s(i, j);
  double rowsq = 0.0;  // 1' Sigma^2 1 = |Sigma 1|^2
  for (std::size_t i = 0; i < kk; ++i) {
    const double rs = kernels::sum(s.row(i), kk);
    rowsq += rs * rs;
  }
  const double total = cov.total, trace = cov.trace;
  const double ratio = k / (k - 1.0);
  return 2.0 * ratio * ratio *
         (total * (frob2 + trace * trace) - 2.0 * trace * rowsq) / (total * total * total);
}

VarianceEstimate pooled_normal_theory_variance(const Matrix& data1, const Matrix& data2) {
  const double n1 = static_cast<double>(data1.rows());
  const double n2 = static_cast<double>(data2.rows());
  const double n = n1 + n2;
  VarianceEstimate out;
  out.method = VarianceKind::normal_theory;
  out.per_group[0] = normal_theory_variance(sample_covariance(data1));
  out.per_group[1] = normal_theory_variance(sample_covariance(data2));
  out.value = (n2 / n) * out.per_group[0] + (n1 / n) * out.per_group[1];
  return out;
}

double paired_plugin_variance(const Matrix& data, std::size_t k1, std::size_t k2,
                              const Coefficient& coef1, const Coefficient& coef2) {
  const std::size_t n = data.rows();
  if (n < 2) fail(Errc::degenerate_input, "paired variance: need at least 2 rows");
  if (data.cols() != k1 + k2)
    fail(Errc::invalid_request, "paired variance: column count must be k1 + k2");
  if (k1 < 2 || k2 < 2) fail(Errc::degenerate_input, "paired variance: each occasion needs >= 2 items");

  Matrix block1(n, k1), block2(n, k2);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = data.row(r);
    for (std::size_t c = 0; c < k1; ++c) block1(r, c) = row[c];
    for (std::size_t c = 0; c < k2; ++c) block2(r, c) = row[k1 + c];
  }
  const CovarianceSummary cov1 = sample_covariance(block1);
  const CovarianceSummary cov2 = sample_covariance(block2);
  Projector p1(coef1.gradient(cov1), k1);
  Projector p2(coef2.gradient(cov2), k2);

  const std::vector<double> mean = column_means(data);
  std::vector<double> w(n);
  std::vector<double> d1(k1), d2(k2);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = data.row(r);
    for (std::size_t c = 0; c < k1; ++c) d1[c] = row[c] - mean[c];
    for (std::size_t c = 0; c < k2; ++c) d2[c] = row[k1 + c] - mean[k1 + c];
    w[r] = p1(d1.data()) - p2(d2.data());
  }
  const double wbar = kernels::sum(w.data(), n) / static_cast<double>(n);
  double acc = 0.0;
  for (double wi : w) acc += (wi - wbar) * (wi - wbar);
  return acc / static_cast<double>(n - 1);
}

}  // namespace relicmp
