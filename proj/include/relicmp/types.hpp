#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace relicmp {

enum class Errc {
  degenerate_input,
  zero_total_variance,
  zero_variance,
  non_symmetric,
  not_psd,
  unequal_item_counts,
  cap_exceeded,
  missing_split,
  missing_error_variances,
  singular_gradient,
  unsorted_thresholds,
  parse_error,
  missing_data,
  non_rectangular,
  invalid_request,
};

const char* errc_name(Errc c);

/// Library error carrying a machine-readable code. Statistical degeneracies
/// (zero variance, non-PSD input, ...) and I/O problems use distinct codes so
/// the CLI can map them to different exit statuses.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

  /// True for codes describing a statistical degeneracy of otherwise valid input.
  bool statistical() const;

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

/// Dense row-major matrix of doubles. Rows are examinees, columns are items
/// when used as an item-response matrix; also used for small symmetric k x k
/// covariance blocks. No expression templates, no views -- sizes here are
/// tiny (k <= ~50) and N rarely exceeds a few thousand.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static Matrix ones(std::size_t n) { return Matrix(n, n, 1.0); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return v_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return v_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return v_[r * cols_ + c]; }

  double* row(std::size_t r) { return v_.data() + r * cols_; }
  const double* row(std::size_t r) const { return v_.data() + r * cols_; }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }

  bool operator==(const Matrix& o) const = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> v_;
};

/// Checks the item-response invariants: N >= 2, k >= 2, every entry finite.
/// Throws DegenerateInput / MissingData accordingly.
void validate_item_matrix(const Matrix& data, const std::string& label = "data");

}  // namespace relicmp
