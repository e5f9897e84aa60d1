#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "relicmp/dist.hpp"
#include "relicmp/inference.hpp"
#include "relicmp/resample.hpp"
#include "relicmp/simulate.hpp"

using namespace relicmp;

namespace {

Matrix ordinal_data(std::size_t n, std::size_t k, std::uint64_t seed) {
  RngStream rng(seed, 0);
  Matrix m(n, k);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < k; ++c)
      m(r, c) = static_cast<double>(discretize_value(rng.next_normal(), tau1()));
  return m;
}

}  // namespace

TEST_CASE("tail p-value arithmetic") {
  SUBCASE("worked example") {
    const TailPvalues p = tail_pvalues(0.5, {-1.0, 0.0, 1.0, 2.0});
    CHECK(p.p_right == doctest::Approx(0.5));
    CHECK(p.p_left == doctest::Approx(0.5));
    CHECK(p.p_two == doctest::Approx(1.0));
  }
  SUBCASE("tie accounting on random multisets") {
    RngStream rng(42, 0);
    for (int rep = 0; rep < 200; ++rep) {
      const std::size_t b = 1 + rng.next_below(40);
      std::vector<double> reps(b);
      for (auto& v : reps) v = static_cast<double>(rng.next_below(7)) - 3.0;
      const double t = static_cast<double>(rng.next_below(7)) - 3.0;
      const TailPvalues p = tail_pvalues(t, reps);
      long ties = 0;
      for (double v : reps)
        if (v == t) ++ties;
      CHECK(p.p_right + p.p_left ==
            doctest::Approx(1.0 + static_cast<double>(ties) / static_cast<double>(b)));
      CHECK(p.p_two >= 0.0);
      CHECK(p.p_two <= 1.0);
    }
  }
}

TEST_CASE("identical groups give a zero statistic and p_two = 1") {
  const Matrix d = ordinal_data(12, 4, 5);
  CHECK(studentized_statistic(d, d) == 0.0);
  const TestResult r = asymptotic_test(d, d);
  CHECK(r.p_two == doctest::Approx(1.0));
  CHECK(r.diff == 0.0);
}

TEST_CASE("swapping group labels flips the statistic sign exactly") {
  const Matrix a = ordinal_data(10, 3, 7);
  const Matrix b = ordinal_data(10, 3, 8);
  CHECK(studentized_statistic(a, b) == -studentized_statistic(b, a));
}

TEST_CASE("asymptotic p-values follow the normal reference") {
  const Matrix a = ordinal_data(15, 4, 11);
  const Matrix b = ordinal_data(18, 4, 12);
  const TestResult r = asymptotic_test(a, b);
  CHECK(r.p_right == doctest::Approx(normal_sf(r.statistic)).epsilon(1e-15));
  CHECK(r.p_left == doctest::Approx(normal_cdf(r.statistic)).epsilon(1e-15));
  CHECK(r.p_two == doctest::Approx(2.0 * normal_sf(std::abs(r.statistic))).epsilon(1e-15));
  CHECK(r.p_right + r.p_left == doctest::Approx(1.0));
}

TEST_CASE("permutation test input guards") {
  SUBCASE("unequal item counts") {
    const Matrix a = ordinal_data(10, 3, 1);
    const Matrix b = ordinal_data(10, 4, 2);
    ResamplingPlan plan;
    try {
      permutation_test(a, b, plan);
      FAIL("expected UnequalItemCounts");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::unequal_item_counts);
      CHECK(std::string(e.what()).find("equal number of items") != std::string::npos);
    }
  }
  SUBCASE("constant data has no total variance") {
    Matrix a(5, 3, 2.0);
    ResamplingPlan plan;
    CHECK_THROWS_AS(permutation_test(a, a, plan), Error);
  }
  SUBCASE("zero projection variance is reported as ZeroVariance") {
    // perfectly collinear items: delta'(S_i - S) is identically zero
    Matrix a(3, 2), b(3, 2);
    for (int r = 0; r < 3; ++r) a(r, 0) = a(r, 1) = r;
    for (int r = 0; r < 3; ++r) b(r, 0) = b(r, 1) = 2 * r;
    try {
      studentized_statistic(a, b);
      FAIL("expected ZeroVariance");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::zero_variance);
    }
  }
}

TEST_CASE("Monte Carlo permutation p-value approaches the enumerated one") {
  // dataset chosen with no degenerate splits: the enumeration counts those as
  // ties at +infinity while Monte Carlo redraws them, so the two conventions
  // only coincide when none occur
  const Matrix a = ordinal_data(4, 3, 22);
  const Matrix b = ordinal_data(4, 3, 23);
  ResamplingPlan exact;
  exact.method = ResampleMethod::exact_permutation;
  const TestResult full = permutation_test(a, b, exact);
  CHECK(full.replicates_used == 70);  // C(8,4)
  CHECK(full.degenerate_redraws == 0);

  ResamplingPlan mc;
  mc.method = ResampleMethod::permutation;
  mc.replicates = 10000;
  mc.seed = 99;
  const TestResult approx = permutation_test(a, b, mc);
  CHECK(std::abs(approx.p_two - full.p_two) < 0.01 + 1e-12);
}

TEST_CASE("enumerated label swap exchanges the tails exactly") {
  const Matrix a = ordinal_data(6, 3, 31);
  const Matrix b = ordinal_data(6, 3, 32);
  ResamplingPlan plan;
  plan.method = ResampleMethod::exact_permutation;
  const TestResult ab = permutation_test(a, b, plan);
  const TestResult ba = permutation_test(b, a, plan);
  CHECK(ab.p_right == ba.p_left);
  CHECK(ab.p_left == ba.p_right);
}

TEST_CASE("confidence interval is centered at the estimate difference") {
  const Matrix a = ordinal_data(12, 4, 41);
  const Matrix b = ordinal_data(14, 4, 42);
  ResamplingPlan plan;
  plan.replicates = 2000;
  plan.seed = 7;
  plan.keep_replicates = true;
  const TestResult r = permutation_test(a, b, plan);
  REQUIRE(r.ci.has_value());
  CHECK(0.5 * (r.ci->lower + r.ci->upper) == doctest::Approx(r.diff).epsilon(1e-12));
  CHECK(r.ci->level == doctest::Approx(0.95));
  CHECK(r.ci->lower <= r.ci->upper);

  // construction identity: width = 2 c sigma-hat / sqrt(n1 n2 / N) with c the
  // upper 2.5% type-1 quantile of the replicate statistics
  std::vector<double> reps = r.replicate_values;
  std::sort(reps.begin(), reps.end());
  const std::size_t idx =
      static_cast<std::size_t>(std::ceil(0.975 * static_cast<double>(reps.size())));
  const double c = reps[idx - 1];
  const double half = std::sqrt(r.pooled_variance) / std::sqrt(12.0 * 14.0 / 26.0);
  CHECK(r.ci->upper - r.ci->lower == doctest::Approx(2.0 * c * half).epsilon(1e-12));

  const Interval direct = permutation_ci(a, b, plan, 0.95);
  CHECK(direct.lower == r.ci->lower);
  CHECK(direct.upper == r.ci->upper);
}

TEST_CASE("two-sided decision agrees with the interval away from the boundary") {
  RngStream meta(2025, 0);
  int compared = 0, agreed = 0;
  for (int rep = 0; rep < 30; ++rep) {
    const Matrix a = testutil::random_matrix(8, 3, meta);
    const Matrix b = testutil::random_matrix(8, 3, meta);
    ResamplingPlan plan;
    plan.method = ResampleMethod::exact_permutation;
    TestResult r;
    try {
      r = permutation_test(a, b, plan);
    } catch (const Error&) {
      continue;
    }
    if (std::abs(r.p_two - 0.05) < 0.03) continue;
    const bool reject = r.p_two <= 0.05;
    const bool excluded = 0.0 < r.ci->lower || 0.0 > r.ci->upper;
    ++compared;
    if (reject == excluded) ++agreed;
  }
  CHECK(compared > 10);
  CHECK(agreed == compared);
}

TEST_CASE("degenerate enumerated splits enter as ties at infinity and are counted") {
  // three copies of one row across the pooled sample: exactly the two splits
  // that isolate them produce a constant group
  Matrix a(3, 2), b(3, 2);
  a(0, 0) = 0; a(0, 1) = 0;
  a(1, 0) = 0; a(1, 1) = 0;
  a(2, 0) = 1; a(2, 1) = 2;
  b(0, 0) = 0; b(0, 1) = 0;
  b(1, 0) = 3; b(1, 1) = 1;
  b(2, 0) = 2; b(2, 1) = 4;
  ResamplingPlan plan;
  plan.method = ResampleMethod::exact_permutation;
  const TestResult r = permutation_test(a, b, plan);
  CHECK(r.replicates_used == 20);
  CHECK(r.degenerate_redraws == 2);
  CHECK(r.p_two >= 0.0);
  CHECK(r.p_two <= 1.0);
}

TEST_CASE("bootstrap test accepts unequal item counts and reports estimates") {
  const Matrix a = ordinal_data(15, 5, 51);
  const Matrix b = ordinal_data(12, 3, 52);
  ResamplingPlan plan;
  plan.method = ResampleMethod::parametric_bootstrap;
  plan.replicates = 500;
  plan.seed = 13;
  const TestResult r = bootstrap_test(a, b, plan);
  CHECK(r.coefficient_estimates.size() == 2);
  CHECK(r.replicates_used == 500);
  CHECK(r.p_two >= 0.0);
  CHECK(r.p_two <= 1.0);
  REQUIRE(r.ci.has_value());
}

TEST_CASE("resampling runs are reproducible") {
  const Matrix a = ordinal_data(10, 4, 61);
  const Matrix b = ordinal_data(10, 4, 62);
  ResamplingPlan plan;
  plan.replicates = 400;
  plan.seed = 2024;
  const TestResult r1 = permutation_test(a, b, plan);
  const TestResult r2 = permutation_test(a, b, plan);
  CHECK(r1.p_two == r2.p_two);
  CHECK(r1.ci->lower == r2.ci->lower);
  plan.workers = 4;
  const TestResult r4 = permutation_test(a, b, plan);
  CHECK(r1.p_two == r4.p_two);
  CHECK(r1.ci->upper == r4.ci->upper);
}

TEST_CASE("Q_N reduces to the squared two-sample statistic for K = 2") {
  RngStream meta(77, 0);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix a = testutil::random_matrix(15, 4, meta);
    const Matrix b = testutil::random_matrix(20, 4, meta);
    const double t = studentized_statistic(a, b);
    ResamplingPlan plan;
    const KSampleResult q = ksample_test({a, b}, plan, false);
    CHECK(std::abs(q.statistic - t * t) <= 1e-10 * std::max(1.0, t * t));
    const double p_norm = 2.0 * normal_sf(std::abs(t));
    CHECK(std::abs(q.p_value - p_norm) <= 1e-10);
  }
}

TEST_CASE("equal groups give Q_N = 0") {
  const Matrix a = ordinal_data(12, 4, 71);
  ResamplingPlan plan;
  const KSampleResult q = ksample_test({a, a, a}, plan, false);
  CHECK(q.statistic == doctest::Approx(0.0));
  CHECK(q.df == 2);
}

TEST_CASE("K-sample permutation variant needs equal item counts") {
  const Matrix a = ordinal_data(10, 3, 81);
  const Matrix b = ordinal_data(10, 4, 82);
  const Matrix c = ordinal_data(10, 3, 83);
  ResamplingPlan plan;
  plan.method = ResampleMethod::permutation;
  plan.replicates = 50;
  CHECK_THROWS_AS(ksample_test({a, b, c}, plan, true), Error);
  plan.method = ResampleMethod::parametric_bootstrap;
  const KSampleResult ok = ksample_test({a, b, c}, plan, true);
  CHECK(ok.replicates_used == 50);
}

TEST_CASE("asymptotic chi-square reference attains its level under the null") {
  const Matrix p2 = build_correlation({2, 5});
  const MvnSampler sampler(p2);
  const int trials = 2000;
  int rejects = 0;
  RngStream rng(1234, 0);
  ResamplingPlan plan;
  for (int t = 0; t < trials; ++t) {
    const Matrix g1 = sampler.draw(200, rng);
    const Matrix g2 = sampler.draw(200, rng);
    const Matrix g3 = sampler.draw(200, rng);
    const KSampleResult q = ksample_test({g1, g2, g3}, plan, false);
    if (q.p_value <= 0.05) ++rejects;
  }
  const double rate = rejects / static_cast<double>(trials);
  CHECK(rate > 0.04);
  CHECK(rate < 0.06);
}

TEST_CASE("pairwise post-hoc comparisons") {
  const Matrix a = ordinal_data(12, 4, 91);
  const Matrix b = ordinal_data(12, 4, 92);
  const Matrix c = ordinal_data(12, 4, 93);
  ResamplingPlan plan;
  plan.replicates = 200;
  plan.seed = 5;
  const std::vector<TestResult> raw =
      pairwise_posthoc({a, b, c}, plan, TestMethod::asymptotic);
  REQUIRE(raw.size() == 3);
  const std::vector<TestResult> adj =
      pairwise_posthoc({a, b, c}, plan, TestMethod::asymptotic, {}, Adjust::bonferroni);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(adj[i].p_two == doctest::Approx(std::min(1.0, 3.0 * raw[i].p_two)).epsilon(1e-15));
    CHECK(adj[i].p_two >= raw[i].p_two);
  }
  CHECK_THROWS_AS(pairwise_posthoc({a, b}, plan, TestMethod::asymptotic), Error);
}

TEST_CASE("paired test guards and asymptotic reference") {
  RngStream rng(2001, 0);
  const Matrix block = testutil::random_matrix(25, 3, rng);
  SUBCASE("copied occasion is degenerate") {
    Matrix data(25, 6);
    for (std::size_t r = 0; r < 25; ++r)
      for (std::size_t c = 0; c < 3; ++c) data(r, c) = data(r, c + 3) = block(r, c);
    ResamplingPlan plan;
    try {
      paired_test(data, 3, 3, plan, TestMethod::asymptotic);
      FAIL("expected a degeneracy error");
    } catch (const Error& e) {
      CHECK(e.statistical());
    }
  }
  SUBCASE("asymptotic p uses the normal tail") {
    Matrix data(25, 6);
    for (std::size_t r = 0; r < 25; ++r)
      for (std::size_t c = 0; c < 3; ++c) {
        data(r, c) = block(r, c);
        data(r, c + 3) = block(r, c) + 0.4 * rng.next_normal();
      }
    ResamplingPlan plan;
    const TestResult r = paired_test(data, 3, 3, plan, TestMethod::asymptotic);
    CHECK(r.p_two == doctest::Approx(2.0 * normal_sf(std::abs(r.statistic))).epsilon(1e-14));
  }
  SUBCASE("permutation is not a paired method") {
    Matrix data(25, 6);
    for (std::size_t r = 0; r < 25; ++r)
      for (std::size_t c = 0; c < 6; ++c) data(r, c) = rng.next_normal();
    ResamplingPlan plan;
    CHECK_THROWS_AS(paired_test(data, 3, 3, plan, TestMethod::permutation), Error);
  }
}

TEST_CASE("independent occasions: paired bootstrap tracks the two-sample bootstrap") {
  RngStream rng(3003, 0);
  const std::size_t n = 150;
  Matrix data(n, 6);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < 6; ++c) data(r, c) = rng.next_normal();
  Matrix b1(n, 3), b2(n, 3);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < 3; ++c) {
      b1(r, c) = data(r, c);
      b2(r, c) = data(r, c + 3);
    }
  ResamplingPlan plan;
  plan.replicates = 1500;
  plan.seed = 71;
  plan.method = ResampleMethod::parametric_bootstrap;
  const TestResult paired = paired_test(data, 3, 3, plan, TestMethod::parametric_bootstrap);
  const TestResult unpaired = bootstrap_test(b1, b2, plan);
  CHECK(std::abs(paired.p_two - unpaired.p_two) < 0.1);
}
