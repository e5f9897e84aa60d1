#include "relicmp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "relicmp/parallel.hpp"
#include "relicmp/resample.hpp"

namespace relicmp {

namespace {

std::vector<double> loading_vector(std::size_t k) {
  std::vector<double> lambda(k);
  if (k == 5) {
    lambda = {0.3, 0.4, 0.5, 0.6, 0.7};
  } else {
    for (std::size_t i = 0; i < k; ++i) lambda[i] = 0.32 + 0.02 * static_cast<double>(i);
  }
  return lambda;
}

Matrix compound_symmetric(std::size_t k, double rho) {
  Matrix m(k, k, rho);
  for (std::size_t i = 0; i < k; ++i) m(i, i) = 1.0;
  return m;
}

Matrix uniform_offdiag_with_diag(std::size_t k, double rho, const std::vector<double>& diag_add) {
  Matrix m(k, k, rho);
  for (std::size_t i = 0; i < k; ++i) m(i, i) = rho + diag_add[i];
  return m;
}

std::vector<double> arithmetic(std::size_t k, double start, double step) {
  std::vector<double> v(k);
  for (std::size_t i = 0; i < k; ++i) v[i] = start - step * static_cast<double>(i);
  return v;
}

}  // namespace

Matrix build_correlation(const CorrelationSpec& spec) {
  const std::size_t k = spec.k;
  if (k != 5 && k != 20) fail(Errc::invalid_request, "correlation specs are defined for k = 5 or 20");
  switch (spec.id) {
    case 1: return compound_symmetric(k, 0.16);
    case 2: return compound_symmetric(k, 0.36);
    case 3: return compound_symmetric(k, 0.64);
    case 4: {
      const std::vector<double> lambda = loading_vector(k);
      Matrix m(k, k);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) m(i, j) = (i == j) ? 1.0 : lambda[i] * lambda[j];
      return m;
    }
    case 5:
      return uniform_offdiag_with_diag(
          k, 0.16, k == 5 ? std::vector<double>{0.84, 0.74, 0.64, 0.54, 0.44}
                          : arithmetic(k, 0.82, 0.02));
    case 6:
      return uniform_offdiag_with_diag(
          k, 0.36, k == 5 ? std::vector<double>{0.64, 0.54, 0.44, 0.34, 0.24}
                          : arithmetic(k, 0.62, 0.02));
    case 7:
      return uniform_offdiag_with_diag(
          k, 0.64, k == 5 ? std::vector<double>{0.36, 0.31, 0.26, 0.21, 0.16}
                          : arithmetic(k, 0.35, 0.01));
    case 8: {
      const std::vector<double> lambda = loading_vector(k);
      const std::vector<double> diag =
          k == 5 ? std::vector<double>{1.0, 0.9, 0.8, 0.7, 0.6} : arithmetic(k, 0.98, 0.02);
      Matrix m(k, k);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) m(i, j) = (i == j) ? diag[i] : lambda[i] * lambda[j];
      return m;
    }
    default:
      fail(Errc::invalid_request, "correlation id must be 1..8");
  }
}

const std::vector<double>& tau1() {
  static const std::vector<double> t{-1.8, -0.6, 0.6, 1.8};
  return t;
}

const std::vector<double>& tau2() {
  static const std::vector<double> t{-0.4, 0.5, 1.2, 2.0};
  return t;
}

int discretize_value(double value, const std::vector<double>& thresholds) {
  int score = 0;
  for (double t : thresholds) {
    if (t < value) ++score;
  }
  return score;
}

std::vector<int> discretize(const std::vector<double>& values,
                            const std::vector<double>& thresholds) {
  for (std::size_t i = 1; i < thresholds.size(); ++i)
    if (!(thresholds[i - 1] < thresholds[i]))
      fail(Errc::unsorted_thresholds, "thresholds must be strictly increasing");
  std::vector<int> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = discretize_value(values[i], thresholds);
  return out;
}

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::ordinal_tau1: return "tau1";
    case Scenario::ordinal_tau2: return "tau2";
    case Scenario::t4: return "t4";
    case Scenario::lognormal: return "lognormal";
  }
  return "?";
}

std::string SimulationCondition::id() const {
  std::ostringstream os;
  os << "n" << n1 << "-" << n2 << "_k" << corr.k;
  if (scenario != Scenario::lognormal) os << "_P" << corr.id;
  os << "_" << scenario_name(scenario);
  return os.str();
}

namespace {

Matrix draw_group(const SimulationCondition& cond, const MvnSampler* sampler, std::size_t n,
                  RngStream& stream) {
  const std::size_t k = cond.corr.k;
  switch (cond.scenario) {
    case Scenario::ordinal_tau1:
    case Scenario::ordinal_tau2: {
      const std::vector<double>& tau =
          cond.scenario == Scenario::ordinal_tau1 ? tau1() : tau2();
      Matrix z = sampler->draw(n, stream);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < k; ++c)
          z(r, c) = static_cast<double>(discretize_value(z(r, c), tau));
      return z;
    }
    case Scenario::t4: {
      Matrix z = sampler->draw(n, stream);
      for (std::size_t r = 0; r < n; ++r) {
        double chi2 = 0.0;
        for (int d = 0; d < 4; ++d) {
          const double g = stream.next_normal();
          chi2 += g * g;
        }
        const double s = std::sqrt(4.0 / chi2);
        for (std::size_t c = 0; c < k; ++c) z(r, c) *= s;
      }
      return z;
    }
    case Scenario::lognormal: {
      // standardized LN(0,1) coordinates: mean e^{1/2}, variance (e-1)e
      const double mean = std::exp(0.5);
      const double sd = std::sqrt((std::exp(1.0) - 1.0) * std::exp(1.0));
      Matrix z(n, k);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < k; ++c)
          z(r, c) = (std::exp(stream.next_normal()) - mean) / sd;
      return z;
    }
  }
  fail(Errc::invalid_request, "unknown scenario");
}

}  // namespace

std::pair<Matrix, Matrix> generate_condition_data(const SimulationCondition& cond,
                                                  RngStream& stream) {
  std::unique_ptr<MvnSampler> sampler;
  if (cond.scenario != Scenario::lognormal)
    sampler = std::make_unique<MvnSampler>(build_correlation(cond.corr));
  Matrix g1 = draw_group(cond, sampler.get(), cond.n1, stream);
  Matrix g2 = draw_group(cond, sampler.get(), cond.n2, stream);
  return {std::move(g1), std::move(g2)};
}

std::vector<RateRow> run_type1_study(const std::vector<SimulationCondition>& conds,
                                     const std::vector<TestMethod>& methods,
                                     std::uint64_t master_seed, int workers) {
  if (conds.empty() || methods.empty())
    fail(Errc::invalid_request, "need at least one condition and one method");
  std::vector<RateRow> out;
  for (std::size_t ci = 0; ci < conds.size(); ++ci) {
    const SimulationCondition& cond = conds[ci];
    const std::uint64_t cond_key = RngStream::derive(master_seed, 1000003ULL + ci);
    // outcome per (trial, method): 1 reject, 0 accept, -1 undefined
    std::vector<std::vector<signed char>> outcome(
        methods.size(), std::vector<signed char>(static_cast<std::size_t>(cond.trials), 0));

    parallel_for(static_cast<std::size_t>(cond.trials), workers, [&](std::size_t trial) {
      const std::uint64_t trial_key = RngStream::derive(cond_key, trial);
      RngStream data_stream(trial_key, 0);
      const auto [g1, g2] = generate_condition_data(cond, data_stream);
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        TwoSampleOptions opts;
        opts.level = 1.0 - cond.level;
        double p = 1.0;
        try {
          switch (methods[mi]) {
            case TestMethod::asymptotic:
              p = asymptotic_test(g1, g2, opts).p_two;
              break;
            case TestMethod::permutation: {
              ResamplingPlan plan;
              plan.method = ResampleMethod::permutation;
              plan.replicates = cond.replicates;
              plan.seed = RngStream::derive(trial_key, 101);
              plan.workers = 1;
              p = permutation_test(g1, g2, plan, opts).p_two;
              break;
            }
            case TestMethod::exact_permutation: {
              ResamplingPlan plan;
              plan.method = ResampleMethod::exact_permutation;
              plan.workers = 1;
              p = permutation_test(g1, g2, plan, opts).p_two;
              break;
            }
            case TestMethod::parametric_bootstrap: {
              ResamplingPlan plan;
              plan.method = ResampleMethod::parametric_bootstrap;
              plan.replicates = cond.replicates;
              plan.seed = RngStream::derive(trial_key, 202);
              plan.workers = 1;
              p = bootstrap_test(g1, g2, plan, opts).p_two;
              break;
            }
          }
          outcome[mi][trial] = (p <= cond.level) ? 1 : 0;
        } catch (const Error&) {
          outcome[mi][trial] = -1;
        }
      }
    });

    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      RateRow row;
      row.condition_id = cond.id();
      row.method = test_method_name(methods[mi]);
      for (signed char oc : outcome[mi]) {
        if (oc < 0) {
          ++row.failures;
        } else {
          ++row.trials;
          if (oc == 1) ++row.rejections;
        }
      }
      row.rate = row.trials > 0 ? static_cast<double>(row.rejections) /
                                      static_cast<double>(row.trials)
                                : 0.0;
      row.half_width = row.trials > 0
                           ? 1.96 * std::sqrt(row.rate * (1.0 - row.rate) /
                                              static_cast<double>(row.trials))
                           : 0.0;
      out.push_back(std::move(row));
    }
  }
  return out;
}

std::string rates_to_csv(const std::vector<RateRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "condition_id,method,trials,rejections,rate,mc_half_width\n";
  for (const RateRow& r : rows)
    os << r.condition_id << "," << r.method << "," << r.trials << "," << r.rejections << ","
       << r.rate << "," << r.half_width << "\n";
  return os.str();
}

std::string rates_to_svg(const std::vector<RateRow>& rows, double level) {
  // collect condition order and the methods present
  std::vector<std::string> conds, methods;
  for (const RateRow& r : rows) {
    if (std::find(conds.begin(), conds.end(), r.condition_id) == conds.end())
      conds.push_back(r.condition_id);
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
      methods.push_back(r.method);
  }
  const double w = 720, h = 360, ml = 60, mr = 20, mt = 20, mb = 80;
  double ymax = 2.0 * level;
  for (const RateRow& r : rows) ymax = std::max(ymax, r.rate * 1.15);
  auto xpos = [&](std::size_t i) {
    return conds.size() == 1
               ? ml + (w - ml - mr) / 2.0
               : ml + (w - ml - mr) * static_cast<double>(i) /
                     static_cast<double>(conds.size() - 1);
  };
  auto ypos = [&](double rate) { return h - mb - (h - mt - mb) * rate / ymax; };
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<line x1='" << ml << "' y1='" << ypos(level) << "' x2='" << w - mr << "' y2='"
     << ypos(level) << "' stroke='#999' stroke-dasharray='4 3'/>\n";
  os << "<text x='" << ml - 8 << "' y='" << ypos(level) + 4
     << "' text-anchor='end' font-size='11'>" << level << "</text>\n";
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    os << "<polyline fill='none' stroke='" << palette[mi % 4] << "' stroke-width='2' points='";
    for (std::size_t ci = 0; ci < conds.size(); ++ci) {
      for (const RateRow& r : rows)
        if (r.method == methods[mi] && r.condition_id == conds[ci])
          os << xpos(ci) << "," << ypos(r.rate) << " ";
    }
    os << "'/>\n";
    os << "<text x='" << ml + 8 << "' y='" << mt + 14 + 14 * static_cast<double>(mi)
       << "' fill='" << palette[mi % 4] << "' font-size='12'>" << methods[mi] << "</text>\n";
  }
  for (std::size_t ci = 0; ci < conds.size(); ++ci) {
    os << "<text x='" << xpos(ci) << "' y='" << h - mb + 14
       << "' font-size='9' text-anchor='end' transform='rotate(-45 " << xpos(ci) << " "
       << h - mb + 14 << ")'>" << conds[ci] << "</text>\n";
  }
  os << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr << "' y2='" << h - mb
     << "' stroke='black'/>\n";
  os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << h - mb
     << "' stroke='black'/>\n";
  os << "</svg>\n";
  return os.str();
}

std::vector<SimulationCondition> named_grid(const std::string& name) {
  std::vector<SimulationCondition> out;
  const std::vector<std::pair<std::size_t, std::size_t>> sizes = {
      {10, 10}, {10, 20}, {25, 25}, {25, 50}, {50, 50}, {50, 75}, {75, 75}, {75, 100}};
  if (name == "paper-desk") {
    // small slice of the full grid that runs in minutes
    for (auto [n1, n2] : std::vector<std::pair<std::size_t, std::size_t>>{{10, 10}, {50, 50}}) {
      for (Scenario sc : {Scenario::ordinal_tau1, Scenario::ordinal_tau2}) {
        SimulationCondition c;
        c.n1 = n1;
        c.n2 = n2;
        c.corr = {1, 5};
        c.scenario = sc;
        c.trials = 2000;
        c.replicates = 500;
        out.push_back(c);
      }
    }
    SimulationCondition logn;
    logn.n1 = logn.n2 = 50;
    logn.corr = {1, 5};
    logn.scenario = Scenario::lognormal;
    logn.trials = 2000;
    logn.replicates = 500;
    out.push_back(logn);
    return out;
  }
  if (name == "paper-full") {
    for (auto [n1, n2] : sizes)
      for (std::size_t k : {std::size_t{5}, std::size_t{20}})
        for (int pid = 1; pid <= 8; ++pid)
          for (Scenario sc : {Scenario::ordinal_tau1, Scenario::ordinal_tau2}) {
            SimulationCondition c;
            c.n1 = n1;
            c.n2 = n2;
            c.corr = {pid, k};
            c.scenario = sc;
            c.trials = 10000;
            c.replicates = 1000;
            out.push_back(c);
          }
    return out;
  }
  if (name == "supplement") {
    for (auto [n1, n2] : sizes) {
      for (int pid : {1, 4}) {
        SimulationCondition c;
        c.n1 = n1;
        c.n2 = n2;
        c.corr = {pid, 5};
        c.scenario = Scenario::t4;
        c.trials = 10000;
        c.replicates = 500;
        out.push_back(c);
      }
      SimulationCondition logn;
      logn.n1 = n1;
      logn.n2 = n2;
      logn.corr = {1, 5};
      logn.scenario = Scenario::lognormal;
      logn.trials = 10000;
      logn.replicates = 500;
      out.push_back(logn);
    }
    return out;
  }
  fail(Errc::invalid_request, "unknown grid '" + name + "' (paper-desk, paper-full, supplement)");
}

}  // namespace relicmp
