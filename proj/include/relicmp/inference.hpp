#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relicmp/coefficients.hpp"
#include "relicmp/resample.hpp"
#include "relicmp/types.hpp"
#include "relicmp/variance.hpp"

namespace relicmp {

enum class TestMethod { asymptotic, permutation, exact_permutation, parametric_bootstrap };
enum class Alternative { two_sided, greater, less };
enum class Adjust { none, bonferroni };

const char* test_method_name(TestMethod m);
const char* alternative_name(Alternative a);
std::optional<TestMethod> parse_test_method(const std::string& s);
std::optional<Alternative> parse_alternative(const std::string& s);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
};

/// The p-value arithmetic every resampling test shares. With
/// p1 = #{statistic <= A_l}/B: right tail p1, left tail #{statistic >= A_l}/B,
/// two-sided min(2 p1, 2 - 2 p1).
struct TailPvalues {
  double p_right = 1.0;
  double p_left = 1.0;
  double p_two = 1.0;
};
TailPvalues tail_pvalues(double statistic, const std::vector<double>& replicates);

struct TestResult {
  TestMethod method = TestMethod::asymptotic;
  Alternative alternative = Alternative::two_sided;
  std::string coefficient = "alpha";
  double statistic = 0.0;        // studentized statistic on the observed data
  double diff = 0.0;             // coef1 - coef2
  double p_right = 1.0;          // tail mass of replicates >= statistic (or 1 - Phi)
  double p_left = 1.0;           // tail mass of replicates <= statistic (or Phi)
  double p_two = 1.0;            // min(2 p1, 2 - 2 p1)
  std::optional<Interval> ci;
  std::vector<double> coefficient_estimates;  // per group
  double pooled_variance = 0.0;  // sigma-hat^2 (or b-hat^2 for paired designs)
  long replicates_used = 0;
  long degenerate_redraws = 0;   // resampled replicates with undefined statistic
  std::uint64_t seed = 0;
  std::vector<double> replicate_values;  // filled when plan.keep_replicates is set

  /// p-value for the requested alternative.
  double p() const;
};

struct TwoSampleOptions {
  Coefficient coef1{};
  Coefficient coef2{};
  VarianceKind variance = VarianceKind::adf;
  Alternative alternative = Alternative::two_sided;
  double level = 0.95;
};

/// T_n = sqrt(n1 n2 / N) (coef1 - coef2) / sigma-hat. Throws ZeroVariance
/// when the pooled variance estimate vanishes.
double studentized_statistic(const Matrix& data1, const Matrix& data2,
                             const TwoSampleOptions& opts = {});

/// Large-sample test against the standard normal reference.
TestResult asymptotic_test(const Matrix& data1, const Matrix& data2,
                           const TwoSampleOptions& opts = {});

/// Studentized permutation test. Requires equal item counts. Every replicate
/// recomputes both the difference and its variance estimate on the permuted
/// split. plan.method selects Monte Carlo sampling or full enumeration.
TestResult permutation_test(const Matrix& data1, const Matrix& data2, const ResamplingPlan& plan,
                            const TwoSampleOptions& opts = {});

/// Two-sided permutation confidence interval for the coefficient difference.
Interval permutation_ci(const Matrix& data1, const Matrix& data2, const ResamplingPlan& plan,
                        double level = 0.95);

/// Parametric (model-based) bootstrap test: replicates are drawn from
/// zero-mean normals with the group sample covariances. Item counts may
/// differ between groups. The drawn groups carry the sample covariances as
/// their truth, so replicate statistics are formed from the difference to
/// the observed coefficient difference and centered at their conditional
/// mean; without this the replicate law sits at the observed statistic
/// instead of approximating the null.
TestResult bootstrap_test(const Matrix& data1, const Matrix& data2, const ResamplingPlan& plan,
                          const TwoSampleOptions& opts = {});

struct KSampleResult {
  TestMethod method = TestMethod::asymptotic;
  std::string coefficient = "alpha";
  double statistic = 0.0;  // Q_N >= 0
  double p_value = 1.0;
  int df = 0;  // chi-square reference degrees of freedom (K-1)
  std::vector<double> coefficient_estimates;
  std::vector<double> variance_components;
  long replicates_used = 0;
  long degenerate_redraws = 0;
  std::uint64_t seed = 0;
  std::vector<TestResult> pairwise;
};

struct KSampleOptions {
  Coefficient coef{};
  double level = 0.95;
};

/// Wald-type K-sample test Q_N = N a' H (H Sigma H)^+ H a with
/// Sigma = diag(N/n_j sigma_j^2). With use_resampling the reference
/// distribution comes from plan.method (pooled-row permutation for equal item
/// counts, per-group parametric bootstrap otherwise); without it the
/// chi-square(K-1) tail is used.
KSampleResult ksample_test(const std::vector<Matrix>& groups, const ResamplingPlan& plan,
                           bool use_resampling, const KSampleOptions& opts = {});

/// All K(K-1)/2 pairwise two-sample tests, optionally Bonferroni-adjusted.
std::vector<TestResult> pairwise_posthoc(const std::vector<Matrix>& groups,
                                         const ResamplingPlan& plan, TestMethod method,
                                         const TwoSampleOptions& opts = {},
                                         Adjust adjust = Adjust::none);

/// Paired-design test: columns [0,k1) are occasion one, [k1,k1+k2) occasion
/// two. T_N = sqrt(N) (coef1 - coef2) / b-hat; the bootstrap draws whole rows
/// from the joint normal with the full blocked sample covariance.
TestResult paired_test(const Matrix& data, std::size_t k1, std::size_t k2,
                       const ResamplingPlan& plan, TestMethod method,
                       const TwoSampleOptions& opts = {});

}  // namespace relicmp
