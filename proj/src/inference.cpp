#include "relicmp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "relicmp/dist.hpp"
#include "relicmp/kernels.hpp"
#include "relicmp/linalg.hpp"
#include "relicmp/parallel.hpp"

namespace relicmp {

const char* test_method_name(TestMethod m) {
  switch (m) {
    case TestMethod::asymptotic: return "asymptotic";
    case TestMethod::permutation: return "permutation";
    case TestMethod::exact_permutation: return "exact-permutation";
    case TestMethod::parametric_bootstrap: return "parametric-bootstrap";
  }
  return "?";
}

const char* alternative_name(Alternative a) {
  switch (a) {
    case Alternative::two_sided: return "two-sided";
    case Alternative::greater: return "greater";
    case Alternative::less: return "less";
  }
  return "?";
}

std::optional<TestMethod> parse_test_method(const std::string& s) {
  if (s == "asymptotic") return TestMethod::asymptotic;
  if (s == "permutation") return TestMethod::permutation;
  if (s == "exact-permutation") return TestMethod::exact_permutation;
  if (s == "bootstrap" || s == "parametric-bootstrap") return TestMethod::parametric_bootstrap;
  return std::nullopt;
}

std::optional<Alternative> parse_alternative(const std::string& s) {
  if (s == "two-sided" || s == "two.sided") return Alternative::two_sided;
  if (s == "greater") return Alternative::greater;
  if (s == "less") return Alternative::less;
  return std::nullopt;
}

double TestResult::p() const {
  switch (alternative) {
    case Alternative::greater: return p_right;
    case Alternative::less: return p_left;
    case Alternative::two_sided: return p_two;
  }
  return p_two;
}

TailPvalues tail_pvalues(double statistic, const std::vector<double>& replicates) {
  if (replicates.empty()) fail(Errc::invalid_request, "no replicates");
  long ge = 0, le = 0;
  for (double a : replicates) {
    if (a >= statistic) ++ge;
    if (a <= statistic) ++le;
  }
  const double b = static_cast<double>(replicates.size());
  TailPvalues out;
  out.p_right = static_cast<double>(ge) / b;
  out.p_left = static_cast<double>(le) / b;
  // both tails enter non-strictly; with ties this is what keeps the level
  // under exchangeability (2 - 2 p1 would count the lower tail strictly)
  out.p_two = std::min(1.0, 2.0 * std::min(out.p_right, out.p_left));
  return out;
}

namespace {

constexpr std::uint64_t kPermSalt = 0x7065726dULL;
constexpr std::uint64_t kBootSalt = 0x626f6f74ULL;
constexpr std::uint64_t kPairSalt = 0x70616972ULL;
constexpr std::uint64_t kGroupSalt = 0x6b73616dULL;
constexpr int kMaxRedraws = 1000;
constexpr std::size_t kEnumChunk = 8192;
const double kInf = std::numeric_limits<double>::infinity();

struct Eval {
  bool ok = false;
  Errc why = Errc::zero_variance;
  double t = 0.0;
  double diff = 0.0;
  double c1 = 0.0, c2 = 0.0;
  double sigma2 = 0.0;
};

double scale_factor(double n1, double n2) { return std::sqrt(n1 * n2 / (n1 + n2)); }

Eval try_eval_two_sample(const Matrix& d1, const Matrix& d2, const TwoSampleOptions& o) {
  Eval e;
  try {
    const CovarianceSummary cov1 = sample_covariance(d1);
    const CovarianceSummary cov2 = sample_covariance(d2);
    if (cov1.zero_total() || cov2.zero_total()) {
      e.why = Errc::zero_total_variance;
      return e;
    }
    e.c1 = o.coef1.value(cov1);
    e.c2 = o.coef2.value(cov2);
    double comp1, comp2;
    if (o.variance == VarianceKind::adf) {
      comp1 = adf_variance_component(d1, cov1, o.coef1.gradient(cov1));
      comp2 = adf_variance_component(d2, cov2, o.coef2.gradient(cov2));
    } else {
      comp1 = normal_theory_variance(cov1);
      comp2 = normal_theory_variance(cov2);
    }
    const double n1 = static_cast<double>(d1.rows());
    const double n2 = static_cast<double>(d2.rows());
    e.sigma2 = (n2 / (n1 + n2)) * comp1 + (n1 / (n1 + n2)) * comp2;
    e.diff = e.c1 - e.c2;
    if (!(e.sigma2 > 0.0) || !std::isfinite(e.sigma2)) {
      e.why = Errc::zero_variance;
      return e;
    }
    e.t = scale_factor(n1, n2) * e.diff / std::sqrt(e.sigma2);
    if (!std::isfinite(e.t)) {
      e.why = Errc::zero_variance;
      return e;
    }
    e.ok = true;
  } catch (const Error& err) {
    e.why = err.code();
  }
  return e;
}

Eval eval_observed(const Matrix& d1, const Matrix& d2, const TwoSampleOptions& o) {
  validate_item_matrix(d1, "group 1");
  validate_item_matrix(d2, "group 2");
  if (o.variance == VarianceKind::normal_theory &&
      (o.coef1.kind != CoefKind::alpha || o.coef2.kind != CoefKind::alpha))
    fail(Errc::invalid_request, "normal-theory variance is defined for alpha only");
  Eval e = try_eval_two_sample(d1, d2, o);
  if (!e.ok) fail(e.why, "statistic undefined on the observed data");
  return e;
}

void fill_tail_pvalues(TestResult& r, const std::vector<double>& reps) {
  const TailPvalues p = tail_pvalues(r.statistic, reps);
  r.p_right = p.p_right;
  r.p_left = p.p_left;
  r.p_two = p.p_two;
}

/// Upper-q empirical quantile, type 1 (ceiling index) on a copy of the values.
double upper_quantile(std::vector<double> reps, double prob) {
  std::sort(reps.begin(), reps.end());
  const double pos = prob * static_cast<double>(reps.size());
  std::size_t idx = static_cast<std::size_t>(std::ceil(pos));
  idx = std::clamp<std::size_t>(idx, 1, reps.size());
  return reps[idx - 1];
}

Interval replicate_interval(double diff, double half_scale, const std::vector<double>& reps,
                            double level) {
  const double c = upper_quantile(reps, 1.0 - (1.0 - level) / 2.0);
  double lo = diff - c * half_scale;
  double hi = diff + c * half_scale;
  if (lo > hi) std::swap(lo, hi);
  return {lo, hi, level};
}

Matrix vstack(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() + b.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c);
  for (std::size_t r = 0; r < b.rows(); ++r)
    for (std::size_t c = 0; c < b.cols(); ++c) out(a.rows() + r, c) = b(r, c);
  return out;
}

/// Monte Carlo replicate loop. make(stream) produces one attempt; degenerate
/// attempts are redrawn from the same substream and counted. A replicate that
/// stays degenerate past the redraw cap is returned with ok = false and
/// enters the p-value as a tie at +infinity.
template <typename Fn>
std::vector<Eval> run_replicate_evals(long b, std::uint64_t seed, std::uint64_t salt, int workers,
                                      long& total_redraws, Fn&& make) {
  if (b < 1) fail(Errc::invalid_request, "replicate count must be >= 1");
  std::vector<Eval> evals(static_cast<std::size_t>(b));
  std::vector<long> redraws(static_cast<std::size_t>(b), 0);
  const std::uint64_t subseed = RngStream::derive(seed, salt);
  parallel_for(static_cast<std::size_t>(b), workers, [&](std::size_t ell) {
    RngStream stream(subseed, ell);
    for (int attempt = 0;; ++attempt) {
      const Eval e = make(stream);
      if (e.ok) {
        evals[ell] = e;
        break;
      }
      ++redraws[ell];
      if (attempt + 1 >= kMaxRedraws) {
        evals[ell] = e;  // stays degenerate
        break;
      }
    }
  });
  total_redraws = 0;
  for (long r : redraws) total_redraws += r;
  return evals;
}

template <typename Fn>
std::vector<double> run_replicates(long b, std::uint64_t seed, std::uint64_t salt, int workers,
                                   long& total_redraws, Fn&& make) {
  const std::vector<Eval> evals =
      run_replicate_evals(b, seed, salt, workers, total_redraws, std::forward<Fn>(make));
  std::vector<double> values(evals.size());
  for (std::size_t i = 0; i < evals.size(); ++i) values[i] = evals[i].ok ? evals[i].t : kInf;
  return values;
}

}  // namespace

double studentized_statistic(const Matrix& data1, const Matrix& data2,
                             const TwoSampleOptions& opts) {
  return eval_observed(data1, data2, opts).t;
}

TestResult asymptotic_test(const Matrix& data1, const Matrix& data2,
                           const TwoSampleOptions& opts) {
  const Eval obs = eval_observed(data1, data2, opts);
  TestResult r;
  r.method = TestMethod::asymptotic;
  r.alternative = opts.alternative;
  r.coefficient = opts.coef1.name();
  r.statistic = obs.t;
  r.diff = obs.diff;
  r.coefficient_estimates = {obs.c1, obs.c2};
  r.pooled_variance = obs.sigma2;
  r.p_right = normal_sf(obs.t);
  r.p_left = normal_cdf(obs.t);
  r.p_two = 2.0 * normal_sf(std::abs(obs.t));
  const double half = std::sqrt(obs.sigma2) /
                      scale_factor(static_cast<double>(data1.rows()),
                                   static_cast<double>(data2.rows()));
  const double z = normal_quantile(1.0 - (1.0 - opts.level) / 2.0);
  r.ci = Interval{obs.diff - z * half, obs.diff + z * half, opts.level};
  return r;
}

TestResult permutation_test(const Matrix& data1, const Matrix& data2, const ResamplingPlan& plan,
                            const TwoSampleOptions& opts) {
  if (data1.cols() != data2.cols())
    fail(Errc::unequal_item_counts,
         "the permutation test needs an equal number of items in both groups");
  if (plan.method == ResampleMethod::parametric_bootstrap)
    fail(Errc::invalid_request, "plan method conflicts with the permutation test");
  const Eval obs = eval_observed(data1, data2, opts);
  const std::size_t n1 = data1.rows();
  const Matrix pooled = vstack(data1, data2);

  TestResult r;
  r.alternative = opts.alternative;
  r.coefficient = opts.coef1.name();
  r.statistic = obs.t;
  r.diff = obs.diff;
  r.coefficient_estimates = {obs.c1, obs.c2};
  r.pooled_variance = obs.sigma2;
  r.seed = plan.seed;

  std::vector<double> values;
  if (plan.method == ResampleMethod::exact_permutation) {
    r.method = TestMethod::exact_permutation;
    AssignmentEnumerator en(pooled.rows(), n1, plan.max_exact);
    values.reserve(static_cast<std::size_t>(en.total()));
    long degenerate = 0;
    std::vector<std::vector<std::size_t>> chunk;
    std::vector<double> chunk_values;
    std::vector<std::size_t> subset;
    auto flush = [&]() {
      chunk_values.assign(chunk.size(), 0.0);
      parallel_for(chunk.size(), plan.workers, [&](std::size_t i) {
        const std::vector<std::size_t>& pick = chunk[i];
        Matrix g1(n1, pooled.cols());
        Matrix g2(pooled.rows() - n1, pooled.cols());
        std::vector<char> in_first(pooled.rows(), 0);
        for (std::size_t t = 0; t < pick.size(); ++t) {
          in_first[pick[t]] = 1;
          for (std::size_t c = 0; c < pooled.cols(); ++c) g1(t, c) = pooled(pick[t], c);
        }
        std::size_t w = 0;
        for (std::size_t row = 0; row < pooled.rows(); ++row) {
          if (in_first[row]) continue;
          for (std::size_t c = 0; c < pooled.cols(); ++c) g2(w, c) = pooled(row, c);
          ++w;
        }
        const Eval e = try_eval_two_sample(g1, g2, opts);
        // a degenerate split enters the enumeration as a tie at +infinity
        chunk_values[i] = e.ok ? e.t : kInf;
      });
      for (double v : chunk_values) {
        if (v == kInf) ++degenerate;
        values.push_back(v);
      }
      chunk.clear();
    };
    while (en.next(subset)) {
      chunk.push_back(subset);
      if (chunk.size() >= kEnumChunk) flush();
    }
    if (!chunk.empty()) flush();
    r.degenerate_redraws = degenerate;
  } else {
    r.method = TestMethod::permutation;
    values = run_replicates(plan.replicates, plan.seed, kPermSalt, plan.workers,
                            r.degenerate_redraws, [&](RngStream& stream) {
                              Matrix g1, g2;
                              permute_pooled(pooled, n1, stream, g1, g2);
                              return try_eval_two_sample(g1, g2, opts);
                            });
  }

  r.replicates_used = static_cast<long>(values.size());
  fill_tail_pvalues(r, values);
  const double half = std::sqrt(obs.sigma2) /
                      scale_factor(static_cast<double>(data1.rows()),
                                   static_cast<double>(data2.rows()));
  r.ci = replicate_interval(obs.diff, half, values, opts.level);
  if (plan.keep_replicates) r.replicate_values = values;
  return r;
}

Interval permutation_ci(const Matrix& data1, const Matrix& data2, const ResamplingPlan& plan,
                        double level) {
  TwoSampleOptions opts;
  opts.level = level;
  return *permutation_test(data1, data2, plan, opts).ci;
}

TestResult bootstrap_test(const Matrix& data1, const Matrix& data2, const ResamplingPlan& plan,
                          const TwoSampleOptions& opts) {
  const Eval obs = eval_observed(data1, data2, opts);
  const CovarianceSummary cov1 = sample_covariance(data1);
  const CovarianceSummary cov2 = sample_covariance(data2);
  const MvnSampler sampler1(cov1.matrix);
  const MvnSampler sampler2(cov2.matrix);
  const std::size_t n1 = data1.rows(), n2 = data2.rows();

  TestResult r;
  r.method = TestMethod::parametric_bootstrap;
  r.alternative = opts.alternative;
  r.coefficient = opts.coef1.name();
  r.statistic = obs.t;
  r.diff = obs.diff;
  r.coefficient_estimates = {obs.c1, obs.c2};
  r.pooled_variance = obs.sigma2;
  r.seed = plan.seed;

  // The sampled groups carry the observed covariances as their truth, so the
  // raw recomputed statistic sits at the observed statistic rather than at
  // zero. Replicates are therefore formed from the difference to the observed
  // coefficient difference and then centered at their own conditional mean,
  // which strips the second-order offset of the studentized functional at
  // small n. All three steps vanish asymptotically.
  const double scale = scale_factor(static_cast<double>(n1), static_cast<double>(n2));
  const std::vector<Eval> evals = run_replicate_evals(
      plan.replicates, plan.seed, kBootSalt, plan.workers, r.degenerate_redraws,
      [&](RngStream& stream) {
        Matrix g1 = sampler1.draw(n1, stream);
        Matrix g2 = sampler2.draw(n2, stream);
        return try_eval_two_sample(g1, g2, opts);
      });
  std::vector<double> values(evals.size(), kInf);
  double mean_stat = 0.0;
  long ok_count = 0;
  for (std::size_t i = 0; i < evals.size(); ++i)
    if (evals[i].ok) {
      values[i] = scale * (evals[i].diff - obs.diff) / std::sqrt(evals[i].sigma2);
      mean_stat += values[i];
      ++ok_count;
    }
  if (ok_count > 0) {
    mean_stat /= static_cast<double>(ok_count);
    for (std::size_t i = 0; i < evals.size(); ++i)
      if (evals[i].ok) values[i] -= mean_stat;
  }
  r.replicates_used = static_cast<long>(values.size());
  fill_tail_pvalues(r, values);
  const double half = std::sqrt(obs.sigma2) / scale;
  r.ci = replicate_interval(obs.diff, half, values, opts.level);
  if (plan.keep_replicates) r.replicate_values = values;
  return r;
}

namespace {

struct KEval {
  bool ok = false;
  Errc why = Errc::zero_variance;
  double q = 0.0;
  std::vector<double> coefs;
  std::vector<double> comps;
};

double qn_statistic(const std::vector<double>& coefs, const std::vector<double>& comps,
                    const std::vector<std::size_t>& sizes) {
  const std::size_t kgroups = coefs.size();
  double n = 0.0;
  for (std::size_t s : sizes) n += static_cast<double>(s);
  Matrix h(kgroups, kgroups, -1.0 / static_cast<double>(kgroups));
  for (std::size_t i = 0; i < kgroups; ++i) h(i, i) += 1.0;
  Matrix sig(kgroups, kgroups);
  for (std::size_t j = 0; j < kgroups; ++j)
    sig(j, j) = n / static_cast<double>(sizes[j]) * comps[j];
  const Matrix core = pseudoinverse(matmul(matmul(h, sig), h));
  std::vector<double> centered(kgroups);
  kernels::matvec(h.data(), coefs.data(), centered.data(), kgroups, kgroups);
  std::vector<double> tmp(kgroups);
  kernels::matvec(core.data(), centered.data(), tmp.data(), kgroups, kgroups);
  return n * kernels::dot(centered.data(), tmp.data(), kgroups);
}

KEval try_eval_ksample(const std::vector<Matrix>& groups, const Coefficient& coef) {
  KEval e;
  try {
    const std::size_t kgroups = groups.size();
    e.coefs.resize(kgroups);
    e.comps.resize(kgroups);
    std::vector<std::size_t> sizes(kgroups);
    for (std::size_t j = 0; j < kgroups; ++j) {
      const CovarianceSummary cov = sample_covariance(groups[j]);
      if (cov.zero_total()) {
        e.why = Errc::zero_total_variance;
        return e;
      }
      e.coefs[j] = coef.value(cov);
      e.comps[j] = adf_variance_component(groups[j], cov, coef.gradient(cov));
      if (!(e.comps[j] > 0.0)) {
        e.why = Errc::zero_variance;
        return e;
      }
      sizes[j] = groups[j].rows();
    }
    e.q = qn_statistic(e.coefs, e.comps, sizes);
    if (!std::isfinite(e.q)) {
      e.why = Errc::zero_variance;
      return e;
    }
    e.ok = true;
  } catch (const Error& err) {
    e.why = err.code();
  }
  return e;
}

}  // namespace

KSampleResult ksample_test(const std::vector<Matrix>& groups, const ResamplingPlan& plan,
                           bool use_resampling, const KSampleOptions& opts) {
  if (groups.size() < 2) fail(Errc::invalid_request, "need at least two groups");
  for (std::size_t j = 0; j < groups.size(); ++j)
    validate_item_matrix(groups[j], "group " + std::to_string(j + 1));

  const KEval obs = try_eval_ksample(groups, opts.coef);
  if (!obs.ok) fail(obs.why, "statistic undefined on the observed data");

  KSampleResult r;
  r.coefficient = opts.coef.name();
  r.statistic = obs.q;
  r.df = static_cast<int>(groups.size()) - 1;
  r.coefficient_estimates = obs.coefs;
  r.variance_components = obs.comps;
  r.seed = plan.seed;

  if (!use_resampling) {
    r.method = TestMethod::asymptotic;
    r.p_value = chisq_sf(obs.q, r.df);
    return r;
  }

  std::vector<std::size_t> sizes(groups.size());
  for (std::size_t j = 0; j < groups.size(); ++j) sizes[j] = groups[j].rows();

  std::vector<double> values;
  if (plan.method == ResampleMethod::parametric_bootstrap) {
    r.method = TestMethod::parametric_bootstrap;
    std::vector<MvnSampler> samplers;
    samplers.reserve(groups.size());
    for (const Matrix& g : groups) samplers.emplace_back(sample_covariance(g).matrix);
    // two passes: evaluate replicates, then recenter the coefficient vectors
    // at their conditional means before forming the quadratic form
    const long b = plan.replicates;
    if (b < 1) fail(Errc::invalid_request, "replicate count must be >= 1");
    std::vector<KEval> kevals(static_cast<std::size_t>(b));
    std::vector<long> redraws(static_cast<std::size_t>(b), 0);
    const std::uint64_t subseed = RngStream::derive(plan.seed, kGroupSalt);
    parallel_for(static_cast<std::size_t>(b), plan.workers, [&](std::size_t ell) {
      RngStream stream(subseed, ell);
      for (int attempt = 0;; ++attempt) {
        std::vector<Matrix> rep(groups.size());
        for (std::size_t j = 0; j < groups.size(); ++j)
          rep[j] = samplers[j].draw(sizes[j], stream);
        const KEval e = try_eval_ksample(rep, opts.coef);
        if (e.ok) {
          kevals[ell] = e;
          break;
        }
        ++redraws[ell];
        if (attempt + 1 >= kMaxRedraws) {
          kevals[ell] = e;
          break;
        }
      }
    });
    for (long rd : redraws) r.degenerate_redraws += rd;
    std::vector<double> center(groups.size(), 0.0);
    long ok_count = 0;
    for (const KEval& e : kevals)
      if (e.ok) {
        for (std::size_t j = 0; j < groups.size(); ++j) center[j] += e.coefs[j];
        ++ok_count;
      }
    if (ok_count > 0)
      for (double& c : center) c /= static_cast<double>(ok_count);
    else
      center = obs.coefs;
    values.assign(static_cast<std::size_t>(b), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < kevals.size(); ++i) {
      if (!kevals[i].ok) continue;
      std::vector<double> shifted = kevals[i].coefs;
      for (std::size_t j = 0; j < shifted.size(); ++j) shifted[j] -= center[j];
      const double q = qn_statistic(shifted, kevals[i].comps, sizes);
      if (std::isfinite(q)) values[i] = q;
    }
  } else {
    r.method = TestMethod::permutation;
    const std::size_t items = groups.front().cols();
    for (const Matrix& g : groups)
      if (g.cols() != items)
        fail(Errc::unequal_item_counts,
             "the permutation variant needs equal item counts in all groups");
    Matrix pooled = groups.front();
    for (std::size_t j = 1; j < groups.size(); ++j) pooled = vstack(pooled, groups[j]);
    values = run_replicates(
        plan.replicates, plan.seed, kGroupSalt, plan.workers, r.degenerate_redraws,
        [&](RngStream& stream) {
          // one Fisher-Yates pass, then consecutive slices of the permuted rows
          std::vector<std::size_t> idx(pooled.rows());
          for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
          for (std::size_t i = idx.size() - 1; i > 0; --i) {
            const std::size_t j = stream.next_below(i + 1);
            std::swap(idx[i], idx[j]);
          }
          std::vector<Matrix> rep(groups.size());
          std::size_t offset = 0;
          for (std::size_t j = 0; j < groups.size(); ++j) {
            rep[j] = Matrix(sizes[j], items);
            for (std::size_t t = 0; t < sizes[j]; ++t)
              for (std::size_t c = 0; c < items; ++c) rep[j](t, c) = pooled(idx[offset + t], c);
            offset += sizes[j];
          }
          const KEval e = try_eval_ksample(rep, opts.coef);
          Eval wrap;
          wrap.ok = e.ok;
          wrap.why = e.why;
          wrap.t = e.q;
          return wrap;
        });
  }

  r.replicates_used = static_cast<long>(values.size());
  long ge = 0;
  for (double v : values)
    if (v >= obs.q) ++ge;
  r.p_value = static_cast<double>(ge) / static_cast<double>(values.size());
  return r;
}

std::vector<TestResult> pairwise_posthoc(const std::vector<Matrix>& groups,
                                         const ResamplingPlan& plan, TestMethod method,
                                         const TwoSampleOptions& opts, Adjust adjust) {
  if (groups.size() < 3) fail(Errc::invalid_request, "post-hoc comparisons need K >= 3 groups");
  std::vector<TestResult> out;
  const double m = static_cast<double>(groups.size() * (groups.size() - 1) / 2);
  std::size_t pair_index = 0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j, ++pair_index) {
      ResamplingPlan sub = plan;
      sub.seed = RngStream::derive(plan.seed, pair_index + 1);
      TestResult r;
      switch (method) {
        case TestMethod::asymptotic:
          r = asymptotic_test(groups[i], groups[j], opts);
          break;
        case TestMethod::permutation:
          sub.method = ResampleMethod::permutation;
          r = permutation_test(groups[i], groups[j], sub, opts);
          break;
        case TestMethod::exact_permutation:
          sub.method = ResampleMethod::exact_permutation;
          r = permutation_test(groups[i], groups[j], sub, opts);
          break;
        case TestMethod::parametric_bootstrap:
          sub.method = ResampleMethod::parametric_bootstrap;
          r = bootstrap_test(groups[i], groups[j], sub, opts);
          break;
      }
      if (adjust == Adjust::bonferroni) {
        r.p_right = std::min(1.0, m * r.p_right);
        r.p_left = std::min(1.0, m * r.p_left);
        r.p_two = std::min(1.0, m * r.p_two);
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

namespace {

Eval try_eval_paired(const Matrix& data, std::size_t k1, std::size_t k2,
                     const TwoSampleOptions& o) {
  Eval e;
  try {
    const std::size_t n = data.rows();
    Matrix block1(n, k1), block2(n, k2);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < k1; ++c) block1(r, c) = data(r, c);
      for (std::size_t c = 0; c < k2; ++c) block2(r, c) = data(r, k1 + c);
    }
    const CovarianceSummary cov1 = sample_covariance(block1);
    const CovarianceSummary cov2 = sample_covariance(block2);
    if (cov1.zero_total() || cov2.zero_total()) {
      e.why = Errc::zero_total_variance;
      return e;
    }
    e.c1 = o.coef1.value(cov1);
    e.c2 = o.coef2.value(cov2);
    e.diff = e.c1 - e.c2;
    e.sigma2 = paired_plugin_variance(data, k1, k2, o.coef1, o.coef2);
    if (!(e.sigma2 > 0.0) || !std::isfinite(e.sigma2)) {
      e.why = Errc::zero_variance;
      return e;
    }
    e.t = std::sqrt(static_cast<double>(n)) * e.diff / std::sqrt(e.sigma2);
    if (!std::isfinite(e.t)) {
      e.why = Errc::zero_variance;
      return e;
    }
    e.ok = true;
  } catch (const Error& err) {
    e.why = err.code();
  }
  return e;
}

}  // namespace

TestResult paired_test(const Matrix& data, std::size_t k1, std::size_t k2,
                       const ResamplingPlan& plan, TestMethod method,
                       const TwoSampleOptions& opts) {
  if (data.cols() != k1 + k2)
    fail(Errc::invalid_request, "paired data must have k1 + k2 columns");
  if (k1 < 2 || k2 < 2) fail(Errc::degenerate_input, "each occasion needs at least 2 items");
  validate_item_matrix(data, "paired data");
  if (method != TestMethod::asymptotic && method != TestMethod::parametric_bootstrap)
    fail(Errc::invalid_request, "paired design supports asymptotic or bootstrap inference");

  const Eval obs = try_eval_paired(data, k1, k2, opts);
  if (!obs.ok) fail(obs.why, "statistic undefined on the observed paired data");

  TestResult r;
  r.method = method;
  r.alternative = opts.alternative;
  r.coefficient = opts.coef1.name();
  r.statistic = obs.t;
  r.diff = obs.diff;
  r.coefficient_estimates = {obs.c1, obs.c2};
  r.pooled_variance = obs.sigma2;
  r.seed = plan.seed;

  const double half = std::sqrt(obs.sigma2) / std::sqrt(static_cast<double>(data.rows()));
  if (method == TestMethod::asymptotic) {
    r.p_right = normal_sf(obs.t);
    r.p_left = normal_cdf(obs.t);
    r.p_two = 2.0 * normal_sf(std::abs(obs.t));
    const double z = normal_quantile(1.0 - (1.0 - opts.level) / 2.0);
    r.ci = Interval{obs.diff - z * half, obs.diff + z * half, opts.level};
    return r;
  }

  const CovarianceSummary joint = sample_covariance(data);
  const MvnSampler sampler(joint.matrix);
  const double root_n = std::sqrt(static_cast<double>(data.rows()));
  // same replicate construction as the two-sample bootstrap: difference to
  // the observed difference, studentized, then centered at the replicate mean
  const std::vector<Eval> evals = run_replicate_evals(
      plan.replicates, plan.seed, kPairSalt, plan.workers, r.degenerate_redraws,
      [&](RngStream& stream) {
        const Matrix rep = sampler.draw(data.rows(), stream);
        return try_eval_paired(rep, k1, k2, opts);
      });
  std::vector<double> values(evals.size(), kInf);
  double mean_stat = 0.0;
  long ok_count = 0;
  for (std::size_t i = 0; i < evals.size(); ++i)
    if (evals[i].ok) {
      values[i] = root_n * (evals[i].diff - obs.diff) / std::sqrt(evals[i].sigma2);
      mean_stat += values[i];
      ++ok_count;
    }
  if (ok_count > 0) {
    mean_stat /= static_cast<double>(ok_count);
    for (std::size_t i = 0; i < evals.size(); ++i)
      if (evals[i].ok) values[i] -= mean_stat;
  }
  r.replicates_used = static_cast<long>(values.size());
  fill_tail_pvalues(r, values);
  r.ci = replicate_interval(obs.diff, half, values, opts.level);
  if (plan.keep_replicates) r.replicate_values = values;
  return r;
}

}  // namespace relicmp
