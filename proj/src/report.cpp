#include "relicmp/report.hpp"

#include <cmath>
#include <ctime>
#include <sstream>

#include "relicmp/version.hpp"

namespace relicmp {

namespace {

nlohmann::json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

nlohmann::json to_json(const Interval& ci) {
  return {{"lower", finite_or_null(ci.lower)},
          {"upper", finite_or_null(ci.upper)},
          {"level", ci.level}};
}

nlohmann::json to_json(const TestResult& r) {
  nlohmann::json j{
      {"method", test_method_name(r.method)},
      {"alternative", alternative_name(r.alternative)},
      {"coefficient", r.coefficient},
      {"statistic", finite_or_null(r.statistic)},
      {"diff", finite_or_null(r.diff)},
      {"p_right", r.p_right},
      {"p_left", r.p_left},
      {"p_two", r.p_two},
      {"p", r.p()},
      {"coefficient_estimates", r.coefficient_estimates},
      {"pooled_variance", finite_or_null(r.pooled_variance)},
      {"replicates_used", r.replicates_used},
      {"degenerate_redraws", r.degenerate_redraws},
      {"seed", r.seed},
  };
  j["ci"] = r.ci ? to_json(*r.ci) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const KSampleResult& r) {
  nlohmann::json j{
      {"method", test_method_name(r.method)},
      {"coefficient", r.coefficient},
      {"statistic", finite_or_null(r.statistic)},
      {"p_value", r.p_value},
      {"df", r.df},
      {"coefficient_estimates", r.coefficient_estimates},
      {"variance_components", r.variance_components},
      {"replicates_used", r.replicates_used},
      {"degenerate_redraws", r.degenerate_redraws},
      {"seed", r.seed},
  };
  if (!r.pairwise.empty()) {
    nlohmann::json arr = nlohmann::json::array();
    for (const TestResult& t : r.pairwise) arr.push_back(to_json(t));
    j["pairwise"] = arr;
  }
  return j;
}

nlohmann::json to_json(const RequestEcho& req) {
  return {{"subcommand", req.subcommand},
          {"inputs", req.inputs},
          {"method", req.method},
          {"variance", req.variance},
          {"alternative", req.alternative},
          {"coefficient", req.coefficient},
          {"level", req.level},
          {"replicates", req.replicates},
          {"seed", req.seed},
          {"seed_was_generated", req.seed_was_generated}};
}

nlohmann::json to_json(const GroupDescriptive& g) {
  return {{"name", g.name},
          {"n", g.n},
          {"k", g.k},
          {"coefficient", finite_or_null(g.coefficient)},
          {"variance_component", finite_or_null(g.variance_component)}};
}

nlohmann::json report_document(const RequestEcho& req, const std::vector<GroupDescriptive>& groups,
                               const nlohmann::json& results, bool with_timestamp) {
  nlohmann::json garr = nlohmann::json::array();
  for (const GroupDescriptive& g : groups) garr.push_back(to_json(g));
  nlohmann::json doc{{"request", to_json(req)},
                     {"groups", garr},
                     {"results", results},
                     {"version", RELICMP_VERSION}};
  if (with_timestamp) {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    doc["timestamp"] = buf;
  }
  return doc;
}

RequestEcho request_from_json(const nlohmann::json& j) {
  RequestEcho r;
  r.subcommand = j.at("subcommand").get<std::string>();
  r.inputs = j.at("inputs").get<std::vector<std::string>>();
  r.method = j.at("method").get<std::string>();
  r.variance = j.at("variance").get<std::string>();
  r.alternative = j.at("alternative").get<std::string>();
  r.coefficient = j.at("coefficient").get<std::string>();
  r.level = j.at("level").get<double>();
  r.replicates = j.at("replicates").get<long>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.seed_was_generated = j.at("seed_was_generated").get<bool>();
  return r;
}

std::string results_to_csv(const std::vector<TestResult>& results) {
  std::ostringstream os;
  os.precision(17);
  os << "method,coefficient,alternative,statistic,diff,p_right,p_left,p_two,ci_lower,ci_upper,"
        "ci_level,coef_1,coef_2,replicates_used,degenerate_redraws,seed\n";
  for (const TestResult& r : results) {
    os << test_method_name(r.method) << "," << r.coefficient << ","
       << alternative_name(r.alternative) << "," << r.statistic << "," << r.diff << ","
       << r.p_right << "," << r.p_left << "," << r.p_two << ",";
    if (r.ci)
      os << r.ci->lower << "," << r.ci->upper << "," << r.ci->level;
    else
      os << ",,";
    os << ",";
    if (!r.coefficient_estimates.empty()) os << r.coefficient_estimates[0];
    os << ",";
    if (r.coefficient_estimates.size() > 1) os << r.coefficient_estimates[1];
    os << "," << r.replicates_used << "," << r.degenerate_redraws << "," << r.seed << "\n";
  }
  return os.str();
}

}  // namespace relicmp
