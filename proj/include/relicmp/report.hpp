#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "relicmp/inference.hpp"

namespace relicmp {

/// Echo of the resolved request, written back into every report so results
/// are re-runnable from the report alone.
struct RequestEcho {
  std::string subcommand;
  std::vector<std::string> inputs;
  std::string method;
  std::string variance;
  std::string alternative;
  std::string coefficient;
  double level = 0.95;
  long replicates = 0;
  std::uint64_t seed = 0;
  bool seed_was_generated = false;
  int workers = 0;
};

struct GroupDescriptive {
  std::string name;
  std::size_t n = 0;
  std::size_t k = 0;
  double coefficient = 0.0;
  double variance_component = 0.0;
};

nlohmann::json to_json(const Interval& ci);
nlohmann::json to_json(const TestResult& r);
nlohmann::json to_json(const KSampleResult& r);
nlohmann::json to_json(const RequestEcho& req);
nlohmann::json to_json(const GroupDescriptive& g);

/// Full report document: request echo, per-group descriptives, results,
/// tool version and (unless suppressed) a timestamp.
nlohmann::json report_document(const RequestEcho& req, const std::vector<GroupDescriptive>& groups,
                               const nlohmann::json& results, bool with_timestamp);

RequestEcho request_from_json(const nlohmann::json& j);

/// Flat CSV rendering of one or more two-sample results.
std::string results_to_csv(const std::vector<TestResult>& results);

}  // namespace relicmp
