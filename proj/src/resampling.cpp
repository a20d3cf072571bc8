#include "claytobit/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "claytobit/errors.hpp"

namespace claytobit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw DomainError("alpha must lie in (0, 0.5)");
}

std::vector<double> sorted_column(const BootstrapRun& run, std::size_t parameter, double alpha) {
  check_alpha(alpha);
  if (parameter >= static_cast<std::size_t>(run.estimates.cols()))
    throw DomainError("parameter index out of range");
  const auto needed = static_cast<std::size_t>(std::ceil(1.0 / alpha - 1e-9));
  if (run.replicates() < needed)
    throw DomainError("too few bootstrap replicates for the requested alpha");
  const auto col = run.estimates.col(static_cast<Eigen::Index>(parameter));
  std::vector<double> values(col.begin(), col.end());
  std::sort(values.begin(), values.end());
  return values;
}

double original_value(const ModelParams& p, std::size_t parameter) {
  return p.to_vector()[static_cast<Eigen::Index>(parameter)];
}

bool within_domain(const ModelParams& p, std::size_t parameter, double lower) {
  return !p.is_positive_parameter(parameter) || lower > 0.0;
}

}  // namespace

std::string_view to_string(IntervalMethod m) {
  switch (m) {
    case IntervalMethod::normal_jackknife: return "normal-jackknife";
    case IntervalMethod::normal_bootstrap: return "normal-bootstrap";
    case IntervalMethod::percentile: return "percentile";
    case IntervalMethod::bca: return "bca";
    case IntervalMethod::basic: return "basic";
  }
  return "unknown";
}

std::size_t JackknifeRun::failures() const {
  return static_cast<std::size_t>(std::count(failed.begin(), failed.end(), true));
}

BootstrapRun parametric_bootstrap(const Dataset& d, const ModelParams& fitted, int replicates,
                                  const RandomSource& rng, const Estimator& estimator,
                                  unsigned workers) {
  if (replicates < 1) throw DomainError("bootstrap needs at least one replicate");
  const std::size_t p = fitted.parameter_count();
  std::vector<std::optional<Vector>> rows(static_cast<std::size_t>(replicates));

  parallel_for(rows.size(), workers, [&](std::size_t b) {
    const RandomSource replicate = rng.substream(b);
    RandomSource data_stream = replicate.substream(0);
    try {
      SimulatedData sim =
          simulate_responses(d.margin1.covariates, d.margin2.covariates, fitted, data_stream);
      const FitResult fit = estimator(sim.data, replicate.substream(1), &fitted);
      if (fit.converged) rows[b] = fit.params.to_vector();
    } catch (const DataError&) {
    } catch (const EstimationError&) {
    } catch (const SetupError&) {
    }
  });

  BootstrapRun run;
  run.original = fitted;
  run.requested = replicates;
  const auto ok = static_cast<Eigen::Index>(
      std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.has_value(); }));
  run.failures = replicates - static_cast<int>(ok);
  if (run.failures * 5 > replicates)
    throw EstimationError("more than 20% of bootstrap replicates failed");
  run.estimates.resize(ok, static_cast<Eigen::Index>(p));
  Eigen::Index r = 0;
  for (const auto& row : rows)
    if (row) run.estimates.row(r++) = row->transpose();
  return run;
}

JackknifeRun jackknife(const Dataset& d, const ModelParams& original, const RandomSource& rng,
                       const Estimator& estimator, unsigned workers) {
  const std::size_t n = d.size();
  const std::size_t k = std::max(d.margin1.columns(), d.margin2.columns());
  if (n < k + 3) throw DomainError("jackknife needs at least k + 3 observations");
  JackknifeRun run;
  run.original = original;
  run.failed.assign(n, false);
  run.estimates = Matrix::Constant(static_cast<Eigen::Index>(n),
                                   static_cast<Eigen::Index>(original.parameter_count()), kNaN);
  std::vector<char> failed(n, 0);
  parallel_for(n, workers, [&](std::size_t i) {
    try {
      const FitResult fit = estimator(d.without(i), rng.substream(i), &original);
      run.estimates.row(static_cast<Eigen::Index>(i)) = fit.params.to_vector().transpose();
      failed[i] = !fit.converged;
    } catch (const DataError&) {
      failed[i] = 1;
    } catch (const EstimationError&) {
      failed[i] = 1;
    } catch (const SetupError&) {
      failed[i] = 1;
    }
  });
  for (std::size_t i = 0; i < n; ++i) run.failed[i] = failed[i] != 0;
  return run;
}

Matrix covariance_bootstrap(const BootstrapRun& run) {
  const Eigen::Index b = run.estimates.rows();
  if (b < 2) throw DomainError("bootstrap covariance needs at least two replicates");
  const Vector mean = run.estimates.colwise().mean().transpose();
  const Matrix centred = run.estimates.rowwise() - mean.transpose();
  return (centred.transpose() * centred) / static_cast<double>(b - 1);
}

Matrix covariance_jackknife(const JackknifeRun& run) {
  const Vector original = run.original.to_vector();
  const auto p = original.size();
  Matrix sigma = Matrix::Zero(p, p);
  std::size_t used = 0;
  for (Eigen::Index i = 0; i < run.estimates.rows(); ++i) {
    if (run.failed[static_cast<std::size_t>(i)]) continue;
    const Vector diff = run.estimates.row(i).transpose() - original;
    sigma.noalias() += diff * diff.transpose();
    ++used;
  }
  if (used < 2) throw DomainError("jackknife covariance needs at least two delete-one fits");
  return sigma;
}

double empirical_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw DomainError("empirical_quantile: empty sample");
  const double b = static_cast<double>(sorted.size());
  const double position = std::ceil(q * b - 1e-9);
  const auto index = static_cast<std::size_t>(std::clamp(position, 1.0, b));
  return sorted[index - 1];
}

IntervalEstimate ci_percentile(const BootstrapRun& run, std::size_t parameter, double alpha) {
  const std::vector<double> values = sorted_column(run, parameter, alpha);
  IntervalEstimate ci;
  ci.method = IntervalMethod::percentile;
  ci.level = 1.0 - 2.0 * alpha;
  ci.parameter_index = parameter;
  ci.lower = empirical_quantile(values, alpha);
  ci.upper = empirical_quantile(values, 1.0 - alpha);
  return ci;
}

IntervalEstimate ci_basic(const BootstrapRun& run, std::size_t parameter, double alpha) {
  IntervalEstimate ci = ci_percentile(run, parameter, alpha);
  const double estimate = original_value(run.original, parameter);
  const double lower = 2.0 * estimate - ci.upper;
  const double upper = 2.0 * estimate - ci.lower;
  ci.method = IntervalMethod::basic;
  ci.lower = lower;
  ci.upper = upper;
  ci.valid = within_domain(run.original, parameter, lower);
  return ci;
}

IntervalEstimate ci_normal(const ModelParams& original, const Matrix& covariance,
                           std::size_t parameter, double alpha, IntervalMethod method) {
  check_alpha(alpha);
  const auto h = static_cast<Eigen::Index>(parameter);
  if (h >= covariance.rows()) throw DomainError("parameter index out of range");
  const double variance = covariance(h, h);
  if (!(variance >= 0.0)) throw DomainError("negative variance on the covariance diagonal");
  const double se = std::sqrt(variance);
  const double estimate = original_value(original, parameter);
  IntervalEstimate ci;
  ci.method = method;
  ci.level = 1.0 - 2.0 * alpha;
  ci.parameter_index = parameter;
  ci.lower = estimate - normal_quantile(1.0 - alpha) * se;
  ci.upper = estimate - normal_quantile(alpha) * se;
  ci.valid = within_domain(original, parameter, ci.lower);
  return ci;
}

double bca_bias_correction(const BootstrapRun& run, std::size_t parameter) {
  const double estimate = original_value(run.original, parameter);
  const auto col = run.estimates.col(static_cast<Eigen::Index>(parameter));
  const auto below = std::count_if(col.begin(), col.end(), [&](double v) { return v < estimate; });
  const double share = static_cast<double>(below) / static_cast<double>(col.size());
  if (share <= 0.0) return -std::numeric_limits<double>::infinity();
  if (share >= 1.0) return std::numeric_limits<double>::infinity();
  return normal_quantile(share);
}

double bca_acceleration(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double s2 = 0.0, s3 = 0.0;
  for (double v : values) {
    const double d = mean - v;
    s2 += d * d;
    s3 += d * d * d;
  }
  if (!(s2 > 0.0)) return 0.0;
  return s3 / (6.0 * std::pow(s2, 1.5));
}

IntervalEstimate ci_bca_with(const BootstrapRun& run, std::size_t parameter, double alpha,
                             double z0, double acceleration) {
  const std::vector<double> values = sorted_column(run, parameter, alpha);
  const auto adjusted = [&](double z) {
    const double shifted = z0 + z;
    return normal_cdf(z0 + shifted / (1.0 - acceleration * shifted));
  };
  const bool plain = z0 == 0.0 && acceleration == 0.0;
  const double q1 = plain ? alpha : adjusted(normal_quantile(alpha));
  const double q2 = plain ? 1.0 - alpha : adjusted(normal_quantile(1.0 - alpha));
  IntervalEstimate ci;
  ci.method = IntervalMethod::bca;
  ci.level = 1.0 - 2.0 * alpha;
  ci.parameter_index = parameter;
  const double a = empirical_quantile(values, q1);
  const double b = empirical_quantile(values, q2);
  ci.lower = std::min(a, b);
  ci.upper = std::max(a, b);
  return ci;
}

IntervalEstimate ci_bca(const BootstrapRun& run, const JackknifeRun& jack, std::size_t parameter,
                        double alpha) {
  const double z0 = bca_bias_correction(run, parameter);
  if (!std::isfinite(z0)) {
    IntervalEstimate ci = ci_percentile(run, parameter, alpha);
    ci.method = IntervalMethod::bca;
    ci.fallback = true;
    return ci;
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(jack.estimates.rows()));
  for (Eigen::Index i = 0; i < jack.estimates.rows(); ++i)
    if (!jack.failed[static_cast<std::size_t>(i)])
      values.push_back(jack.estimates(i, static_cast<Eigen::Index>(parameter)));
  return ci_bca_with(run, parameter, alpha, z0, bca_acceleration(values));
}

}  // namespace claytobit
