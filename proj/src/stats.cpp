#include "relicmp/stats.hpp"

#include <cmath>

#include "relicmp/kernels.hpp"

namespace relicmp {

void validate_item_matrix(const Matrix& data, const std::string& label) {
  if (data.rows() < 2) fail(Errc::degenerate_input, label + ": need at least 2 rows");
  if (data.cols() < 2) fail(Errc::degenerate_input, label + ": need at least 2 items");
  for (std::size_t r = 0; r < data.rows(); ++r)
    for (std::size_t c = 0; c < data.cols(); ++c)
      if (!std::isfinite(data(r, c)))
        fail(Errc::missing_data, label + ": non-finite entry at row " + std::to_string(r + 1) +
                                     ", column " + std::to_string(c + 1));
}

std::vector<double> vecs(const Matrix& sym) {
  const std::size_t k = sym.rows();
  if (k != sym.cols() || k == 0) fail(Errc::non_symmetric, "vecs: matrix must be square");
  double scale = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      scale = std::max({scale, std::abs(sym(i, j)), std::abs(sym(i, i))});
      worst = std::max(worst, std::abs(sym(i, j) - sym(j, i)));
    }
  if (worst > 1e-12 * std::max(scale, 1.0))
    fail(Errc::non_symmetric, "vecs: asymmetry exceeds tolerance");
  std::vector<double> out;
  out.reserve(vecs_length(k));
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = j; i < k; ++i) out.push_back(sym(i, j));
  return out;
}

Matrix unvecs(const std::vector<double>& v, std::size_t k) {
  if (v.size() != vecs_length(k)) fail(Errc::invalid_request, "unvecs: length mismatch");
  Matrix m(k, k);
  std::size_t p = 0;
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = j; i < k; ++i) {
      m(i, j) = v[p];
      m(j, i) = v[p];
      ++p;
    }
  return m;
}

namespace {

CovarianceSummary finish_summary(Matrix sigma) {
  CovarianceSummary out;
  const std::size_t k = sigma.rows();
  out.trace = 0.0;
  out.total = 0.0;
  for (std::size_t i = 0; i < k; ++i) out.trace += sigma(i, i);
  out.total = kernels::sum(sigma.data(), k * k);
  out.halfvec.reserve(vecs_length(k));
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = j; i < k; ++i) out.halfvec.push_back(sigma(i, j));
  out.matrix = std::move(sigma);
  return out;
}

}  // namespace

CovarianceSummary sample_covariance(const Matrix& data) {
  const std::size_t n = data.rows(), k = data.cols();
  if (n < 2) fail(Errc::degenerate_input, "sample_covariance: need at least 2 rows");
  if (k < 2) fail(Errc::degenerate_input, "sample_covariance: need at least 2 items");

  std::vector<double> mean(k, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = data.row(r);
    for (std::size_t c = 0; c < k; ++c) mean[c] += row[c];
  }
  for (auto& m : mean) m /= static_cast<double>(n);

  Matrix sigma(k, k);
  std::vector<double> d(k);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = data.row(r);
    for (std::size_t c = 0; c < k; ++c) d[c] = row[c] - mean[c];
    for (std::size_t i = 0; i < k; ++i) {
      const double di = d[i];
      double* out = sigma.row(i);
      for (std::size_t j = 0; j <= i; ++j) out[j] += di * d[j];
    }
  }
  const double inv = 1.0 / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = sigma(i, j) * inv;
      sigma(i, j) = v;
      sigma(j, i) = v;
    }
  return finish_summary(std::move(sigma));
}

CovarianceSummary summarize_covariance(const Matrix& input) {
  const std::size_t k = input.rows();
  if (k != input.cols() || k == 0)
    fail(Errc::non_symmetric, "summarize_covariance: matrix must be square");
  Matrix sigma = input;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      if (std::abs(sigma(i, j) - sigma(j, i)) >
          1e-12 * std::max(1.0, std::abs(sigma(i, j))))
        fail(Errc::non_symmetric, "summarize_covariance: asymmetric input");
      const double m = 0.5 * (sigma(i, j) + sigma(j, i));
      sigma(i, j) = sigma(j, i) = m;
    }
  return finish_summary(std::move(sigma));
}

double cronbach_alpha(const CovarianceSummary& cov) {
  if (cov.zero_total()) fail(Errc::zero_total_variance, "cronbach_alpha: 1'Sigma 1 is zero");
  const double k = static_cast<double>(cov.k());
  return k / (k - 1.0) * (1.0 - cov.trace / cov.total);
}

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::degenerate_input: return "DegenerateInput";
    case Errc::zero_total_variance: return "ZeroTotalVariance";
    case Errc::zero_variance: return "ZeroVariance";
    case Errc::non_symmetric: return "NonSymmetric";
    case Errc::not_psd: return "NotPSD";
    case Errc::unequal_item_counts: return "UnequalItemCounts";
    case Errc::cap_exceeded: return "CapExceeded";
    case Errc::missing_split: return "MissingSplit";
    case Errc::missing_error_variances: return "MissingErrorVariances";
    case Errc::singular_gradient: return "SingularGradient";
    case Errc::unsorted_thresholds: return "UnsortedThresholds";
    case Errc::parse_error: return "ParseError";
    case Errc::missing_data: return "MissingData";
    case Errc::non_rectangular: return "NonRectangular";
    case Errc::invalid_request: return "InvalidRequest";
  }
  return "Error";
}

bool Error::statistical() const {
  switch (code_) {
    case Errc::degenerate_input:
    case Errc::zero_total_variance:
    case Errc::zero_variance:
    case Errc::not_psd:
    case Errc::unequal_item_counts:
    case Errc::singular_gradient:
    case Errc::missing_split:
    case Errc::missing_error_variances:
      return true;
    default:
      return false;
  }
}

}  // namespace relicmp
