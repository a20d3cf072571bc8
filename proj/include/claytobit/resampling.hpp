#pragma once

#include <string_view>
#include <vector>

#include "claytobit/estimation.hpp"

namespace claytobit {

/// Parametric bootstrap replicates, one row per successful replicate.
struct BootstrapRun {
  Matrix estimates;
  ModelParams original;
  int requested = 0;
  int failures = 0;

  std::size_t replicates() const { return static_cast<std::size_t>(estimates.rows()); }
};

/// Delete-one estimates; row i refits without observation i.
struct JackknifeRun {
  Matrix estimates;
  ModelParams original;
  std::vector<bool> failed;

  std::size_t failures() const;
};

enum class IntervalMethod { normal_jackknife, normal_bootstrap, percentile, bca, basic };

/// Column order of coverage and interval tables.
inline constexpr IntervalMethod kIntervalMethods[] = {
    IntervalMethod::normal_jackknife, IntervalMethod::normal_bootstrap,
    IntervalMethod::percentile, IntervalMethod::bca, IntervalMethod::basic};

std::string_view to_string(IntervalMethod m);

struct IntervalEstimate {
  IntervalMethod method = IntervalMethod::percentile;
  double level = 0.9;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t parameter_index = 0;
  /// False when the interval reaches outside the parameter's domain.
  bool valid = true;
  /// Set when BCa had to fall back to the percentile interval.
  bool fallback = false;

  bool contains(double value) const { return lower <= value && value <= upper; }
};

/// Each replicate b simulates a dataset from `fitted` at the covariates of
/// `d` (stream b of `rng`) and refits with `estimator`, warm-started at
/// `fitted`. Failed or non-converged replicates are dropped and counted; more
/// than 20% failures is an EstimationError. Output is identical for any
/// worker count.
BootstrapRun parametric_bootstrap(const Dataset& d, const ModelParams& fitted, int replicates,
                                  const RandomSource& rng, const Estimator& estimator,
                                  unsigned workers = 1);

/// Delete-one refits; row i uses stream i of `rng`. Failed rows are flagged
/// and excluded from the covariance.
JackknifeRun jackknife(const Dataset& d, const ModelParams& original, const RandomSource& rng,
                       const Estimator& estimator, unsigned workers = 1);

/// (B-1)^-1 sum (x_b - mean)(x_b - mean)'.
Matrix covariance_bootstrap(const BootstrapRun& run);
/// sum (x_(i) - x_hat)(x_(i) - x_hat)', centred at the original estimate, no divisor.
Matrix covariance_jackknife(const JackknifeRun& run);

/// Order statistic with 1-based index ceil(q * B), clamped to [1, B].
double empirical_quantile(std::span<const double> sorted, double q);

IntervalEstimate ci_percentile(const BootstrapRun& run, std::size_t parameter, double alpha);
IntervalEstimate ci_basic(const BootstrapRun& run, std::size_t parameter, double alpha);
IntervalEstimate ci_normal(const ModelParams& original, const Matrix& covariance,
                           std::size_t parameter, double alpha,
                           IntervalMethod method = IntervalMethod::normal_bootstrap);
IntervalEstimate ci_bca(const BootstrapRun& run, const JackknifeRun& jack, std::size_t parameter,
                        double alpha);
/// BCa endpoints for given bias correction z0 and acceleration a.
IntervalEstimate ci_bca_with(const BootstrapRun& run, std::size_t parameter, double alpha,
                             double z0, double acceleration);

/// Phi^-1(#{x*_b < x_hat} / B); infinite when the proportion is 0 or 1.
double bca_bias_correction(const BootstrapRun& run, std::size_t parameter);
/// Acceleration from jackknife values; 0 when they are all equal.
double bca_acceleration(std::span<const double> jackknife_values);

}  // namespace claytobit
