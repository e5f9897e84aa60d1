#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "relicmp/inference.hpp"
#include "relicmp/rng.hpp"
#include "relicmp/types.hpp"

namespace relicmp {

/// One of the eight benchmark correlation structures, at 5 or 20 items.
/// P1-P3 are compound symmetric, P4 a one-factor structure with unit
/// variances, P5-P8 share the off-diagonal pattern but carry decreasing
/// item variances.
struct CorrelationSpec {
  int id = 1;          // 1..8
  std::size_t k = 5;   // 5 or 20
};

Matrix build_correlation(const CorrelationSpec& spec);

/// Threshold vectors used for ordinal item generation (four cut points,
/// five categories scored 0..4).
const std::vector<double>& tau1();
const std::vector<double>& tau2();

/// Score = number of thresholds strictly below the value.
/// Thresholds must be strictly increasing.
int discretize_value(double value, const std::vector<double>& thresholds);
std::vector<int> discretize(const std::vector<double>& values,
                            const std::vector<double>& thresholds);

enum class Scenario { ordinal_tau1, ordinal_tau2, t4, lognormal };

const char* scenario_name(Scenario s);

struct SimulationCondition {
  std::size_t n1 = 10, n2 = 10;
  CorrelationSpec corr{};
  Scenario scenario = Scenario::ordinal_tau1;
  long trials = 2000;
  long replicates = 500;
  double level = 0.05;

  std::string id() const;
};

/// Draws one null dataset pair. Both groups follow the same law:
/// ordinal scenarios discretize multivariate normals, t4 scales them by
/// sqrt(4/chi-square_4), and the lognormal scenario uses i.i.d. standardized
/// LN(0,1) coordinates (identity scale).
std::pair<Matrix, Matrix> generate_condition_data(const SimulationCondition& cond,
                                                  RngStream& stream);

struct RateRow {
  std::string condition_id;
  std::string method;
  long trials = 0;       // completed trials
  long rejections = 0;
  double rate = 0.0;
  double half_width = 0.0;  // 1.96 sqrt(r(1-r)/trials)
  long failures = 0;        // trials whose observed statistic was undefined
};

/// Null rejection rates per (condition, method) at the condition's level.
/// Deterministic for a fixed master seed regardless of worker count.
std::vector<RateRow> run_type1_study(const std::vector<SimulationCondition>& conds,
                                     const std::vector<TestMethod>& methods,
                                     std::uint64_t master_seed, int workers = 0);

std::string rates_to_csv(const std::vector<RateRow>& rows);

/// Minimal rates-vs-condition line chart.
std::string rates_to_svg(const std::vector<RateRow>& rows, double level);

/// Named condition grids for the CLI: "paper-desk" (minutes),
/// "paper-full" (the complete 256-condition grid at published scale) and
/// "supplement" (continuous t4/lognormal scenarios).
std::vector<SimulationCondition> named_grid(const std::string& name);

}  // namespace relicmp
