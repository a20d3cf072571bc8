#include "claytobit/tobit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "claytobit/clayton.hpp"
#include "claytobit/errors.hpp"

namespace claytobit {

namespace {

const double kHalfLogTwoPi = 0.5 * std::log(2.0 * std::numbers::pi);

double check_sigma(const MarginParams& p) {
  if (!(std::isfinite(p.sigma) && p.sigma > 0.0)) throw DomainError("sigma must be positive");
  return p.sigma;
}

double linear_predictor(CovariateRow x, const MarginParams& p) {
  if (x.size() != p.beta.size()) throw DomainError("covariate row and beta differ in length");
  return x.dot(p.beta);
}

double log_density_at_mean(double y, double mean, double sigma) {
  if (y == 0.0) return normal_log_cdf(-mean / sigma);
  const double z = (y - mean) / sigma;
  return -0.5 * z * z - kHalfLogTwoPi - std::log(sigma);
}

}  // namespace

MarginData MarginData::from_responses(Vector responses, Matrix covariates,
                                      std::vector<std::string> names) {
  MarginData d;
  d.censored.resize(static_cast<std::size_t>(responses.size()));
  for (Eigen::Index i = 0; i < responses.size(); ++i)
    d.censored[static_cast<std::size_t>(i)] = responses[i] == 0.0;
  d.responses = std::move(responses);
  d.covariates = std::move(covariates);
  d.covariate_names = std::move(names);
  d.validate();
  return d;
}

std::size_t MarginData::censored_count() const {
  return static_cast<std::size_t>(std::count(censored.begin(), censored.end(), true));
}

double MarginData::censoring_rate() const {
  return size() == 0 ? 0.0 : static_cast<double>(censored_count()) / static_cast<double>(size());
}

void MarginData::validate() const {
  const std::size_t n = size();
  const std::size_t k = columns();
  if (static_cast<std::size_t>(covariates.rows()) != n || censored.size() != n)
    throw DataError("responses, covariate rows and censoring flags differ in length");
  if (k == 0) throw DataError("at least one covariate column is required");
  if (n < k + 2) throw DataError("need at least k + 2 observations");
  if (!covariate_names.empty() && covariate_names.size() != k)
    throw DataError("covariate name count does not match column count");
  for (std::size_t i = 0; i < n; ++i) {
    const double y = responses[static_cast<Eigen::Index>(i)];
    if (!std::isfinite(y) || y < 0.0)
      throw DataError("response " + std::to_string(i) + " is negative or non-finite");
    if (censored[i] != (y == 0.0))
      throw DataError("censoring flag of observation " + std::to_string(i) +
                      " disagrees with its response");
  }
  if (!covariates.allFinite()) throw DataError("covariates contain non-finite values");
  Eigen::ColPivHouseholderQR<Matrix> qr(covariates);
  if (static_cast<std::size_t>(qr.rank()) < k)
    throw DataError("covariate matrix is rank deficient");
}

void MarginParams::validate() const {
  check_sigma(*this);
  if (!beta.allFinite()) throw DomainError("beta must be finite");
}

double tobit_log_density(double y, CovariateRow x, const MarginParams& p) {
  const double sigma = check_sigma(p);
  if (!(y >= 0.0)) throw DomainError("tobit_log_density: y must be nonnegative");
  return log_density_at_mean(y, linear_predictor(x, p), sigma);
}

double tobit_cdf(double y, CovariateRow x, const MarginParams& p) {
  const double sigma = check_sigma(p);
  if (!(y >= 0.0)) throw DomainError("tobit_cdf: y must be nonnegative");
  return normal_cdf((y - linear_predictor(x, p)) / sigma);
}

double margin_log_likelihood(const MarginData& d, const MarginParams& p) {
  const double sigma = check_sigma(p);
  if (static_cast<std::size_t>(p.beta.size()) != d.columns())
    throw DomainError("beta length does not match covariate count");
  const Vector mean = d.covariates * p.beta;
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    total += log_density_at_mean(d.responses[ii], mean[ii], sigma);
  }
  return total;
}

double to_uniform(double y, CovariateRow x, const MarginParams& p) {
  if (!(y > 0.0)) throw DomainError("to_uniform: censored values must be augmented instead");
  return clayton::clamp_unit(tobit_cdf(y, x, p));
}

double censoring_threshold_u(CovariateRow x, const MarginParams& p) { return tobit_cdf(0.0, x, p); }

MarginFit fit_margin(const MarginData& d, const OptimizerSettings& settings,
                     const std::optional<MarginParams>& start) {
  const std::size_t n = d.size();
  const std::size_t k = d.columns();
  const std::size_t uncensored = n - d.censored_count();
  if (uncensored == 0) throw EstimationError("all observations are censored; margin not identified");

  MarginParams init;
  if (start) {
    init = *start;
    init.validate();
  } else {
    Matrix x(static_cast<Eigen::Index>(uncensored), static_cast<Eigen::Index>(k));
    Vector y(static_cast<Eigen::Index>(uncensored));
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (d.censored[i]) continue;
      x.row(row) = d.covariates.row(static_cast<Eigen::Index>(i));
      y[row++] = d.responses[static_cast<Eigen::Index>(i)];
    }
    init.beta = x.colPivHouseholderQr().solve(y);
    if (!init.beta.allFinite()) init.beta = Vector::Zero(static_cast<Eigen::Index>(k));
    const double ssr = (y - x * init.beta).squaredNorm();
    const double dof = std::max<double>(1.0, static_cast<double>(uncensored) - static_cast<double>(k));
    init.sigma = std::max(std::sqrt(ssr / dof), 1e-10);
  }

  std::vector<double> theta0(k + 1);
  std::vector<Bound> bounds(k + 1);
  for (std::size_t j = 0; j < k; ++j) theta0[j] = init.beta[static_cast<Eigen::Index>(j)];
  theta0[k] = init.sigma;
  bounds[k].lower = 0.0;

  Vector mean(static_cast<Eigen::Index>(n));
  Vector beta(static_cast<Eigen::Index>(k));
  const Objective objective = [&](std::span<const double> v) {
    for (std::size_t j = 0; j < k; ++j) beta[static_cast<Eigen::Index>(j)] = v[j];
    const double sigma = v[k];
    if (!(sigma > 0.0)) return -std::numeric_limits<double>::infinity();
    mean.noalias() = d.covariates * beta;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      total += log_density_at_mean(d.responses[ii], mean[ii], sigma);
    }
    return total;
  };

  const MaximizeResult best = maximize(objective, theta0, bounds, settings);
  MarginFit fit;
  fit.params.beta = Eigen::Map<const Vector>(best.argmax.data(), static_cast<Eigen::Index>(k));
  fit.params.sigma = best.argmax[k];
  fit.log_likelihood = best.value;
  fit.converged = best.converged;
  return fit;
}

}  // namespace claytobit
