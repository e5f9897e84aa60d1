#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "relicmp/csv.hpp"
#include "relicmp/dist.hpp"
#include "relicmp/inference.hpp"
#include "relicmp/kernels.hpp"
#include "relicmp/parallel.hpp"
#include "relicmp/report.hpp"
#include "relicmp/simulate.hpp"
#include "relicmp/version.hpp"

namespace {

using namespace relicmp;

struct CommonFlags {
  std::string method = "auto";
  std::string variance = "adf";
  std::string alternative = "two-sided";
  std::string coefficient = "alpha";
  std::string split_spec;
  std::string error_variances_spec;
  bool derive_error_variances = false;
  double level = 0.95;
  long replicates = 10000;
  std::optional<std::uint64_t> seed;
  int workers = 0;
  bool header = false;
  std::string group_col;
  std::string out_path;
  std::string format = "json";
  bool no_timestamp = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_method = true) {
  if (with_method)
    cmd->add_option("--method", f.method,
                    "asymptotic | permutation | exact-permutation | bootstrap | auto");
  cmd->add_option("--variance", f.variance, "adf | normal-theory (alpha only)");
  cmd->add_option("--alternative", f.alternative, "two-sided | greater | less");
  cmd->add_option("--coefficient", f.coefficient, "alpha | lambda1 .. lambda6");
  cmd->add_option("--split", f.split_spec, "lambda3 item split, e.g. 1,2|3,4 (1-based)");
  cmd->add_option("--error-variances", f.error_variances_spec,
                  "lambda6 error variances, comma separated");
  cmd->add_flag("--derive-error-variances", f.derive_error_variances,
                "derive lambda6 error variances as 1/(Sigma^-1)_tt");
  cmd->add_option("--level", f.level, "confidence level (default 0.95)")
      ->check(CLI::Range(1e-6, 1.0 - 1e-6));
  cmd->add_option("--replicates", f.replicates, "resampling replicates B")->check(CLI::Range(1L, 100000000L));
  cmd->add_option("--seed", f.seed, "RNG seed; generated and printed when absent");
  cmd->add_option("--workers", f.workers, "worker threads (0 = auto, env RELICMP_WORKERS)");
  cmd->add_flag("--header", f.header, "input files carry a header row");
  cmd->add_option("--group-col", f.group_col, "group column (name or 1-based index)");
  cmd->add_option("--out", f.out_path, "write the report here instead of stdout");
  cmd->add_option("--format", f.format, "json | csv");
  cmd->add_flag("--no-timestamp", f.no_timestamp, "omit the timestamp field");
}

std::vector<int> parse_index_list(const std::string& spec) {
  std::vector<int> out;
  std::string token;
  std::istringstream is(spec);
  while (std::getline(is, token, ',')) {
    const auto dash = token.find('-');
    if (dash != std::string::npos && dash > 0) {
      const int a = std::stoi(token.substr(0, dash));
      const int b = std::stoi(token.substr(dash + 1));
      for (int v = a; v <= b; ++v) out.push_back(v - 1);
    } else if (!token.empty()) {
      out.push_back(std::stoi(token) - 1);
    }
  }
  return out;
}

Coefficient build_coefficient(const CommonFlags& f) {
  Coefficient c;
  const auto kind = parse_coef_kind(f.coefficient);
  if (!kind) fail(Errc::invalid_request, "unknown coefficient '" + f.coefficient + "'");
  c.kind = *kind;
  if (!f.split_spec.empty()) {
    const auto bar = f.split_spec.find('|');
    if (bar == std::string::npos)
      fail(Errc::invalid_request, "--split expects two parts separated by '|'");
    Split s;
    s.part_a = parse_index_list(f.split_spec.substr(0, bar));
    s.part_b = parse_index_list(f.split_spec.substr(bar + 1));
    c.split = std::move(s);
  }
  if (!f.error_variances_spec.empty()) {
    std::vector<double> e;
    std::string token;
    std::istringstream is(f.error_variances_spec);
    while (std::getline(is, token, ',')) e.push_back(std::stod(token));
    c.error_variances = std::move(e);
  }
  c.derive_error_variances = f.derive_error_variances;
  return c;
}

std::uint64_t resolve_seed(CommonFlags& f, RequestEcho& req) {
  if (f.seed) {
    req.seed = *f.seed;
    req.seed_was_generated = false;
    return *f.seed;
  }
  std::random_device rd;
  const std::uint64_t s =
      (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
  std::cerr << "note: no --seed given; using seed " << s << "\n";
  req.seed = s;
  req.seed_was_generated = true;
  return s;
}

std::vector<NamedMatrix> load_groups(const std::vector<std::string>& paths,
                                     const CommonFlags& f, std::size_t expect = 0) {
  CsvOptions opt;
  opt.header = f.header;
  std::vector<NamedMatrix> groups;
  if (!f.group_col.empty()) {
    if (paths.size() != 1)
      fail(Errc::invalid_request, "--group-col expects a single input file");
    opt.group_col = f.group_col;
    groups = ingest_grouped_csv(paths[0], opt);
  } else {
    for (const std::string& p : paths) groups.push_back({p, ingest_csv(p, opt)});
  }
  if (expect > 0 && groups.size() != expect)
    fail(Errc::invalid_request, "expected " + std::to_string(expect) + " groups, found " +
                                    std::to_string(groups.size()));
  return groups;
}

std::vector<GroupDescriptive> describe_groups(const std::vector<NamedMatrix>& groups,
                                              const Coefficient& coef) {
  std::vector<GroupDescriptive> out;
  for (const NamedMatrix& g : groups) {
    GroupDescriptive d;
    d.name = g.name;
    d.n = g.data.rows();
    d.k = g.data.cols();
    const CovarianceSummary cov = sample_covariance(g.data);
    d.coefficient = coef.value(cov);
    d.variance_component = adf_variance_component(g.data, cov, coef.gradient(cov));
    out.push_back(std::move(d));
  }
  return out;
}

void emit(const CommonFlags& f, const nlohmann::json& doc, const std::string& csv_fallback) {
  std::string payload;
  if (f.format == "csv") {
    payload = csv_fallback;
  } else if (f.format == "json") {
    payload = doc.dump(2) + "\n";
  } else {
    fail(Errc::invalid_request, "unknown format '" + f.format + "'");
  }
  if (f.out_path.empty()) {
    std::cout << payload;
  } else {
    std::ofstream os(f.out_path);
    if (!os) fail(Errc::parse_error, "cannot write '" + f.out_path + "'");
    os << payload;
  }
}

int run_compare(CommonFlags& f, const std::vector<std::string>& paths) {
  const std::vector<NamedMatrix> groups = load_groups(paths, f, 2);
  const Matrix& g1 = groups[0].data;
  const Matrix& g2 = groups[1].data;

  std::string method = f.method;
  if (method == "auto") {
    method = g1.cols() == g2.cols() ? "permutation" : "bootstrap";
    std::cerr << "note: method not given; using " << method
              << (g1.cols() == g2.cols() ? " (equal item counts)" : " (unequal item counts)")
              << "\n";
  }
  const auto tm = parse_test_method(method);
  if (!tm) fail(Errc::invalid_request, "unknown method '" + method + "'");

  TwoSampleOptions opts;
  opts.coef1 = opts.coef2 = build_coefficient(f);
  opts.variance = f.variance == "normal-theory" ? VarianceKind::normal_theory
                  : f.variance == "adf"
                      ? VarianceKind::adf
                      : (fail(Errc::invalid_request, "unknown variance '" + f.variance + "'"),
                         VarianceKind::adf);
  const auto alt = parse_alternative(f.alternative);
  if (!alt) fail(Errc::invalid_request, "unknown alternative '" + f.alternative + "'");
  opts.alternative = *alt;
  opts.level = f.level;

  RequestEcho req;
  req.subcommand = "compare";
  req.inputs = paths;
  req.method = method;
  req.variance = f.variance;
  req.alternative = f.alternative;
  req.coefficient = f.coefficient;
  req.level = f.level;
  req.replicates = f.replicates;
  req.workers = f.workers;
  const std::uint64_t seed = resolve_seed(f, req);

  ResamplingPlan plan;
  plan.replicates = f.replicates;
  plan.seed = seed;
  plan.workers = f.workers;

  TestResult result;
  switch (*tm) {
    case TestMethod::asymptotic:
      result = asymptotic_test(g1, g2, opts);
      req.replicates = 0;
      break;
    case TestMethod::permutation:
      plan.method = ResampleMethod::permutation;
      result = permutation_test(g1, g2, plan, opts);
      break;
    case TestMethod::exact_permutation:
      plan.method = ResampleMethod::exact_permutation;
      result = permutation_test(g1, g2, plan, opts);
      break;
    case TestMethod::parametric_bootstrap:
      plan.method = ResampleMethod::parametric_bootstrap;
      result = bootstrap_test(g1, g2, plan, opts);
      break;
  }
  result.seed = seed;

  const nlohmann::json doc = report_document(req, describe_groups(groups, opts.coef1),
                                             to_json(result), !f.no_timestamp);
  emit(f, doc, results_to_csv({result}));
  return 0;
}

int run_ksample(CommonFlags& f, const std::vector<std::string>& paths, bool posthoc,
                const std::string& adjust) {
  const std::vector<NamedMatrix> groups = load_groups(paths, f);
  if (groups.size() < 2) fail(Errc::invalid_request, "ksample needs at least two groups");
  std::vector<Matrix> mats;
  for (const NamedMatrix& g : groups) mats.push_back(g.data);

  std::string method = f.method;
  if (method == "auto") method = "asymptotic";
  const auto tm = parse_test_method(method);
  if (!tm || *tm == TestMethod::exact_permutation)
    fail(Errc::invalid_request, "ksample methods: asymptotic | permutation | bootstrap");

  KSampleOptions opts;
  opts.coef = build_coefficient(f);
  opts.level = f.level;

  RequestEcho req;
  req.subcommand = "ksample";
  req.inputs = paths;
  req.method = method;
  req.variance = "adf";
  req.alternative = "two-sided";
  req.coefficient = f.coefficient;
  req.level = f.level;
  req.replicates = *tm == TestMethod::asymptotic ? 0 : f.replicates;
  req.workers = f.workers;
  const std::uint64_t seed = resolve_seed(f, req);

  ResamplingPlan plan;
  plan.replicates = f.replicates;
  plan.seed = seed;
  plan.workers = f.workers;
  plan.method = *tm == TestMethod::parametric_bootstrap ? ResampleMethod::parametric_bootstrap
                                                        : ResampleMethod::permutation;

  KSampleResult result = ksample_test(mats, plan, *tm != TestMethod::asymptotic, opts);
  result.seed = seed;
  if (posthoc) {
    TwoSampleOptions pair_opts;
    pair_opts.coef1 = pair_opts.coef2 = opts.coef;
    pair_opts.level = f.level;
    const Adjust adj = adjust == "bonferroni" ? Adjust::bonferroni : Adjust::none;
    result.pairwise = pairwise_posthoc(mats, plan, *tm, pair_opts, adj);
  }

  const nlohmann::json doc = report_document(req, describe_groups(groups, opts.coef),
                                             to_json(result), !f.no_timestamp);
  emit(f, doc, results_to_csv(result.pairwise));
  return 0;
}

int run_paired(CommonFlags& f, const std::string& path, long k1_opt) {
  CsvOptions opt;
  opt.header = f.header;
  const Matrix data = ingest_csv(path, opt);
  if (k1_opt <= 0) fail(Errc::invalid_request, "--k1 (items in occasion one) is required");
  const std::size_t k1 = static_cast<std::size_t>(k1_opt);
  if (k1 + 2 > data.cols())
    fail(Errc::invalid_request, "--k1 leaves fewer than 2 items for occasion two");
  const std::size_t k2 = data.cols() - k1;

  std::string method = f.method;
  if (method == "auto") method = "bootstrap";
  const auto tm = parse_test_method(method);
  if (!tm || (*tm != TestMethod::asymptotic && *tm != TestMethod::parametric_bootstrap))
    fail(Errc::invalid_request, "paired methods: asymptotic | bootstrap");

  TwoSampleOptions opts;
  opts.coef1 = opts.coef2 = build_coefficient(f);
  const auto alt = parse_alternative(f.alternative);
  if (!alt) fail(Errc::invalid_request, "unknown alternative '" + f.alternative + "'");
  opts.alternative = *alt;
  opts.level = f.level;

  RequestEcho req;
  req.subcommand = "paired";
  req.inputs = {path};
  req.method = method;
  req.variance = "adf";
  req.alternative = f.alternative;
  req.coefficient = f.coefficient;
  req.level = f.level;
  req.replicates = *tm == TestMethod::asymptotic ? 0 : f.replicates;
  req.workers = f.workers;
  const std::uint64_t seed = resolve_seed(f, req);

  ResamplingPlan plan;
  plan.replicates = f.replicates;
  plan.seed = seed;
  plan.workers = f.workers;
  plan.method = ResampleMethod::parametric_bootstrap;

  TestResult result = paired_test(data, k1, k2, plan, *tm, opts);
  result.seed = seed;

  std::vector<GroupDescriptive> descr(2);
  for (int occ = 0; occ < 2; ++occ) {
    const std::size_t off = occ == 0 ? 0 : k1;
    const std::size_t kk = occ == 0 ? k1 : k2;
    Matrix block(data.rows(), kk);
    for (std::size_t r = 0; r < data.rows(); ++r)
      for (std::size_t c = 0; c < kk; ++c) block(r, c) = data(r, off + c);
    descr[occ].name = occ == 0 ? "occasion 1" : "occasion 2";
    descr[occ].n = block.rows();
    descr[occ].k = kk;
    const CovarianceSummary cov = sample_covariance(block);
    descr[occ].coefficient = opts.coef1.value(cov);
    descr[occ].variance_component =
        adf_variance_component(block, cov, opts.coef1.gradient(cov));
  }

  const nlohmann::json doc =
      report_document(req, descr, to_json(result), !f.no_timestamp);
  emit(f, doc, results_to_csv({result}));
  return 0;
}

int run_coefficients(CommonFlags& f, const std::string& path,
                     std::vector<std::string> coef_names) {
  CsvOptions opt;
  opt.header = f.header;
  const Matrix data = ingest_csv(path, opt);
  validate_item_matrix(data, path);
  if (coef_names.empty()) coef_names = {f.coefficient};

  RequestEcho req;
  req.subcommand = "coefficients";
  req.inputs = {path};
  req.method = "delta-method";
  req.variance = "adf";
  req.alternative = "two-sided";
  req.coefficient = coef_names.size() == 1 ? coef_names[0] : "multiple";
  req.level = f.level;
  req.replicates = 0;
  req.seed = 0;
  req.workers = f.workers;

  const CovarianceSummary cov = sample_covariance(data);
  const double n = static_cast<double>(data.rows());
  nlohmann::json results = nlohmann::json::array();
  for (const std::string& name : coef_names) {
    CommonFlags sub = f;
    sub.coefficient = name;
    const Coefficient coef = build_coefficient(sub);
    nlohmann::json item;
    item["coefficient"] = name;
    item["value"] = coef.value(cov);
    bool tied = false;
    const std::vector<double> grad = coef.gradient(cov, &tied);
    const double component = adf_variance_component(data, cov, grad);
    const double se = std::sqrt(component / n);
    item["se"] = se;
    const double z = normal_quantile(1.0 - (1.0 - f.level) / 2.0);
    item["ci"] = {{"lower", coef.value(cov) - z * se},
                  {"upper", coef.value(cov) + z * se},
                  {"level", f.level}};
    if (tied) item["cbar2_max_tied"] = true;
    results.push_back(std::move(item));
  }

  std::vector<GroupDescriptive> descr(1);
  descr[0].name = path;
  descr[0].n = data.rows();
  descr[0].k = data.cols();
  descr[0].coefficient = results.front().at("value").get<double>();
  descr[0].variance_component =
      results.front().at("se").get<double>() * results.front().at("se").get<double>() * n;

  const nlohmann::json doc = report_document(req, descr, results, !f.no_timestamp);
  std::ostringstream csv;
  csv.precision(17);
  csv << "coefficient,value,se,ci_lower,ci_upper,ci_level\n";
  for (const auto& item : results)
    csv << item.at("coefficient").get<std::string>() << "," << item.at("value").get<double>()
        << "," << item.at("se").get<double>() << "," << item.at("ci").at("lower").get<double>()
        << "," << item.at("ci").at("upper").get<double>() << ","
        << item.at("ci").at("level").get<double>() << "\n";
  emit(f, doc, csv.str());
  return 0;
}

Scenario parse_scenario(const std::string& s) {
  if (s == "tau1" || s == "ordinal-tau1") return Scenario::ordinal_tau1;
  if (s == "tau2" || s == "ordinal-tau2") return Scenario::ordinal_tau2;
  if (s == "t4") return Scenario::t4;
  if (s == "lognormal") return Scenario::lognormal;
  fail(Errc::invalid_request, "unknown scenario '" + s + "'");
}

int run_simulate(CommonFlags& f, const std::string& grid, const std::string& config_path,
                 const std::string& methods_spec, long trials_override, bool level_given,
                 const std::string& plot_path) {
  std::vector<SimulationCondition> conds;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) fail(Errc::parse_error, "cannot open '" + config_path + "'");
    nlohmann::json cfg;
    in >> cfg;
    for (const auto& jc : cfg.at("conditions")) {
      SimulationCondition c;
      c.n1 = jc.at("n1").get<std::size_t>();
      c.n2 = jc.at("n2").get<std::size_t>();
      c.corr.k = jc.value("k", 5);
      c.corr.id = jc.value("matrix", 1);
      c.scenario = parse_scenario(jc.at("scenario").get<std::string>());
      c.trials = jc.value("trials", 2000L);
      c.replicates = jc.value("replicates", 500L);
      c.level = jc.value("level", 0.05);
      conds.push_back(c);
    }
  } else {
    conds = named_grid(grid);
  }
  for (SimulationCondition& c : conds) {
    if (trials_override > 0) c.trials = trials_override;
    if (level_given) c.level = f.level;  // nominal test level here
  }

  std::vector<TestMethod> methods;
  {
    std::istringstream is(methods_spec);
    std::string token;
    while (std::getline(is, token, ',')) {
      const auto m = parse_test_method(token);
      if (!m) fail(Errc::invalid_request, "unknown method '" + token + "'");
      methods.push_back(*m);
    }
  }

  RequestEcho req;
  req.subcommand = "simulate";
  req.inputs = config_path.empty() ? std::vector<std::string>{grid}
                                   : std::vector<std::string>{config_path};
  req.method = methods_spec;
  req.variance = "adf";
  req.alternative = "two-sided";
  req.coefficient = "alpha";
  req.level = conds.front().level;
  req.replicates = conds.front().replicates;
  req.workers = f.workers;
  const std::uint64_t seed = resolve_seed(f, req);

  const std::vector<RateRow> rows = run_type1_study(conds, methods, seed, f.workers);
  const std::string csv = rates_to_csv(rows);
  if (f.out_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream os(f.out_path);
    if (!os) fail(Errc::parse_error, "cannot write '" + f.out_path + "'");
    os << csv;
  }
  if (!plot_path.empty()) {
    std::ofstream os(plot_path);
    if (!os) fail(Errc::parse_error, "cannot write '" + plot_path + "'");
    os << rates_to_svg(rows, conds.front().level);
  }
  long failures = 0;
  for (const RateRow& r : rows) failures += r.failures;
  if (failures > 0) std::cerr << "note: " << failures << " trial evaluations were degenerate\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reliability-coefficient comparison tests (asymptotic, permutation, bootstrap)"};
  app.set_version_flag("--version", std::string("relicmp ") + RELICMP_VERSION);
  app.require_subcommand(1);

  CommonFlags flags;

  auto* compare = app.add_subcommand(
      "compare", "two-sample test for equality of a reliability coefficient");
  std::vector<std::string> compare_paths;
  compare->add_option("inputs", compare_paths, "two CSV files, or one with --group-col")
      ->required();
  add_common(compare, flags);

  auto* ksample = app.add_subcommand("ksample", "K-sample equality test (Wald-type)");
  std::vector<std::string> ksample_paths;
  bool posthoc = false;
  std::string adjust = "none";
  ksample->add_option("inputs", ksample_paths, "K CSV files, or one with --group-col")
      ->required();
  ksample->add_flag("--posthoc", posthoc, "run all pairwise two-sample tests");
  ksample->add_option("--adjust", adjust, "none | bonferroni");
  add_common(ksample, flags);

  auto* paired = app.add_subcommand("paired", "paired two-occasion test");
  std::string paired_path;
  long k1 = 0;
  paired->add_option("input", paired_path, "CSV with k1+k2 columns per row")->required();
  paired->add_option("--k1", k1, "number of items in occasion one")->required();
  add_common(paired, flags);

  auto* coeffs = app.add_subcommand("coefficients", "point estimates with delta-method errors");
  std::string coeffs_path;
  std::vector<std::string> coeff_names;
  coeffs->add_option("input", coeffs_path, "CSV file")->required();
  coeffs->add_option("--coefficients", coeff_names,
                     "coefficients to report (default: --coefficient)");
  add_common(coeffs, flags, false);

  auto* simulate = app.add_subcommand("simulate", "null rejection-rate study");
  std::string grid = "paper-desk";
  std::string config_path;
  std::string methods_spec = "asymptotic,permutation,bootstrap";
  long trials_override = 0;
  std::string plot_path;
  simulate->add_option("--grid", grid, "paper-desk | paper-full | supplement");
  simulate->add_option("--config", config_path, "JSON condition grid");
  simulate->add_option("--methods", methods_spec, "comma-separated method list");
  simulate->add_option("--trials", trials_override, "override trials per condition");
  simulate->add_option("--plot", plot_path, "write an SVG rate chart here");
  add_common(simulate, flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (compare->parsed()) return run_compare(flags, compare_paths);
    if (ksample->parsed()) return run_ksample(flags, ksample_paths, posthoc, adjust);
    if (paired->parsed()) return run_paired(flags, paired_path, k1);
    if (coeffs->parsed()) return run_coefficients(flags, coeffs_path, coeff_names);
    if (simulate->parsed())
      return run_simulate(flags, grid, config_path, methods_spec, trials_override,
                          simulate->count("--level") > 0, plot_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.statistical() ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
