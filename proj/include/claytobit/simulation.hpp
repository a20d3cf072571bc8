#pragma once

#include <array>
#include <string>
#include <vector>

#include "claytobit/resampling.hpp"

namespace claytobit {

/// One Monte Carlo design: true parameters plus study sizes.
struct Scenario {
  std::string name = "scenario";
  int n = 500;
  double theta = 2.0;
  Vector beta1 = Vector::Constant(2, 1.0);
  Vector beta2 = Vector::Constant(2, 1.0);
  double sigma1 = 1.0;
  double sigma2 = 2.0;
  int replications = 20;  ///< M
  int bootstrap = 200;    ///< B
  double alpha = 0.05;
  std::uint64_t seed = 20130601;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
  ModelParams true_params() const;
};

enum class StudyScale { desk, full };

/// The 5 x 5 grid of theta values and censoring designs; designs are ordered
/// from ~5% to ~50% censoring. Desk scale is n=500, M=20, B=200; full scale
/// is n=1000, M=100, B=1000.
std::vector<Scenario> grid_scenarios(StudyScale scale = StudyScale::full,
                                      std::uint64_t seed = 20130601);

/// Covariates x1 = (1, N(0,1)), x2 = (1, N(1, sd 2)), then the model draw.
SimulatedData generate_dataset(const Scenario& s, RandomSource& rng);

struct ParameterRow {
  std::string name;
  double true_value = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  double bias = 0.0;
  double mse = 0.0;
  std::array<double, 5> coverage{};  ///< in kIntervalMethods order
};

struct ReplicationRecord {
  bool ok = false;
  std::string error;
  Vector estimate;
  Vector bootstrap_se;
  Vector jackknife_se;
  /// [parameter][method] containment of the true value.
  std::vector<std::array<bool, 5>> covered;
  double censoring1 = 0.0;
  double censoring2 = 0.0;
};

struct SimulationReport {
  Scenario scenario;
  std::vector<ParameterRow> rows;
  std::vector<ReplicationRecord> replications;
  int used = 0;
  int failed = 0;
  double censoring1 = 0.0;
  double censoring2 = 0.0;
  double wall_seconds = 0.0;
};

/// Replication r runs on RandomSource(seed, r): generate, fit, bootstrap,
/// jackknife and all five intervals. Rows aggregate converged replications
/// (S.D. with divisor M-1, Bias and MSE with divisor M). More than 10%
/// failed replications is an EstimationError. Independent of `workers`.
SimulationReport run_study(const Scenario& s, const Estimator& estimator, unsigned workers = 1);

enum class TableFormat { tsv, csv };

/// Header plus one row per parameter: T.V., Mean, S.D., Bias, MSE and the five
/// coverage columns. Numbers carry 6 significant digits.
std::string emit_table(const SimulationReport& r, TableFormat format = TableFormat::tsv);
std::vector<ParameterRow> parse_table(const std::string& text, TableFormat format = TableFormat::tsv);

/// key=value sidecar: scenario echo, realized censoring, counts, runtime.
std::string emit_metadata(const SimulationReport& r);

}  // namespace claytobit
