#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "relicmp/rng.hpp"
#include "relicmp/stats.hpp"
#include "relicmp/types.hpp"

namespace relicmp {

enum class ResampleMethod { permutation, exact_permutation, parametric_bootstrap };

struct ResamplingPlan {
  ResampleMethod method = ResampleMethod::permutation;
  long replicates = 10000;           // B; ignored by exact enumeration
  std::uint64_t seed = 0;
  int workers = 0;                   // 0 = auto (RELICMP_WORKERS, then hardware)
  long max_exact = 2'000'000;        // enumeration cap on C(N, n1)
  bool keep_replicates = false;      // retain replicate statistics in the result
};

/// Uniformly random split of the pooled rows into groups of n1 and N-n1 rows
/// (Fisher-Yates on the stream; rows move whole).
void permute_pooled(const Matrix& pooled, std::size_t n1, RngStream& stream, Matrix& group1,
                    Matrix& group2);

/// Number of group-1 assignments C(N, n1), computed in floating point.
double assignment_count(std::size_t n, std::size_t n1);

/// Lexicographic enumeration of all C(N, n1) group-1 index sets.
/// Construction throws CapExceeded when the count is over the cap.
class AssignmentEnumerator {
 public:
  AssignmentEnumerator(std::size_t n, std::size_t n1, long cap = 2'000'000);

  /// Fills `indices` with the next subset (ascending). Returns false when done.
  bool next(std::vector<std::size_t>& indices);

  long total() const { return total_; }

 private:
  std::size_t n_, n1_;
  long total_;
  bool started_ = false, done_ = false;
  std::vector<std::size_t> current_;
};

/// Zero-mean multivariate normal sampler for a fixed covariance. The factor
/// is computed once so replicate loops do not refactorize.
class MvnSampler {
 public:
  explicit MvnSampler(const Matrix& covariance);
  Matrix draw(std::size_t n, RngStream& stream) const;
  std::size_t dim() const { return factor_.rows(); }

 private:
  Matrix factor_;
};

/// One parametric-bootstrap replicate: group g is n_g i.i.d. draws from
/// N(0, Sigma_g). Item counts may differ between groups.
std::pair<Matrix, Matrix> bootstrap_sample(const CovarianceSummary& cov1, std::size_t n1,
                                           const CovarianceSummary& cov2, std::size_t n2,
                                           RngStream& stream);

/// Paired-design replicate: N i.i.d. rows from the joint (k1+k2)-dimensional
/// normal with the full blocked covariance.
Matrix paired_bootstrap_sample(const CovarianceSummary& joint_cov, std::size_t n,
                               RngStream& stream);

}  // namespace relicmp
