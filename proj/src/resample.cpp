#include "relicmp/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "relicmp/linalg.hpp"

namespace relicmp {

void permute_pooled(const Matrix& pooled, std::size_t n1, RngStream& stream, Matrix& group1,
                    Matrix& group2) {
  const std::size_t n = pooled.rows(), k = pooled.cols();
  if (n1 == 0 || n1 >= n) fail(Errc::degenerate_input, "permute_pooled: bad group size");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = stream.next_below(i + 1);
    std::swap(idx[i], idx[j]);
  }
  // Rows are assembled in original order within each group: the statistic is
  // a symmetric function of the rows, so a replicate's value depends only on
  // the drawn index set. This keeps replicate values bit-identical to the
  // enumeration path, so ties are counted consistently.
  std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n1));
  std::sort(idx.begin() + static_cast<std::ptrdiff_t>(n1), idx.end());
  if (group1.rows() != n1 || group1.cols() != k) group1 = Matrix(n1, k);
  if (group2.rows() != n - n1 || group2.cols() != k) group2 = Matrix(n - n1, k);
  for (std::size_t r = 0; r < n1; ++r)
    for (std::size_t c = 0; c < k; ++c) group1(r, c) = pooled(idx[r], c);
  for (std::size_t r = n1; r < n; ++r)
    for (std::size_t c = 0; c < k; ++c) group2(r - n1, c) = pooled(idx[r], c);
}

double assignment_count(std::size_t n, std::size_t n1) {
  if (n1 > n) return 0.0;
  long double c = 1.0L;
  const std::size_t m = std::min(n1, n - n1);
  for (std::size_t i = 1; i <= m; ++i) c = c * static_cast<long double>(n - m + i) / i;
  return static_cast<double>(c + 0.5L);
}

AssignmentEnumerator::AssignmentEnumerator(std::size_t n, std::size_t n1, long cap)
    : n_(n), n1_(n1) {
  if (n1 == 0 || n1 >= n) fail(Errc::degenerate_input, "enumeration: bad group size");
  const double count = assignment_count(n, n1);
  if (count > static_cast<double>(cap))
    fail(Errc::cap_exceeded, "C(" + std::to_string(n) + "," + std::to_string(n1) + ") = " +
                                 std::to_string(static_cast<long long>(count)) +
                                 " exceeds the enumeration cap");
  total_ = static_cast<long>(count);
  current_.resize(n1);
  std::iota(current_.begin(), current_.end(), 0);
}

bool AssignmentEnumerator::next(std::vector<std::size_t>& indices) {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    indices = current_;
    return true;
  }
  // advance to the lexicographically next n1-subset of {0..n-1}
  std::size_t i = n1_;
  while (i > 0) {
    --i;
    if (current_[i] != i + n_ - n1_) {
      ++current_[i];
      for (std::size_t j = i + 1; j < n1_; ++j) current_[j] = current_[j - 1] + 1;
      indices = current_;
      return true;
    }
  }
  done_ = true;
  return false;
}

MvnSampler::MvnSampler(const Matrix& covariance) : factor_(cholesky_psd(covariance)) {}

Matrix MvnSampler::draw(std::size_t n, RngStream& stream) const {
  const std::size_t k = factor_.rows();
  Matrix out(n, k);
  std::vector<double> z(k);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < k; ++c) z[c] = stream.next_normal();
    double* row = out.row(r);
    for (std::size_t i = 0; i < k; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) acc += factor_(i, j) * z[j];
      row[i] = acc;
    }
  }
  return out;
}

std::pair<Matrix, Matrix> bootstrap_sample(const CovarianceSummary& cov1, std::size_t n1,
                                           const CovarianceSummary& cov2, std::size_t n2,
                                           RngStream& stream) {
  const MvnSampler s1(cov1.matrix), s2(cov2.matrix);
  Matrix g1 = s1.draw(n1, stream);
  Matrix g2 = s2.draw(n2, stream);
  return {std::move(g1), std::move(g2)};
}

Matrix paired_bootstrap_sample(const CovarianceSummary& joint_cov, std::size_t n,
                               RngStream& stream) {
  return MvnSampler(joint_cov.matrix).draw(n, stream);
}

}  // namespace relicmp
