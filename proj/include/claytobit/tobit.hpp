#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "claytobit/numeric.hpp"

namespace claytobit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// A covariate row; accepts rows of column-major matrices without copying.
using CovariateRow = Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

/// One censored-at-zero margin: y_i = max(x_i' beta + e_i, 0).
struct MarginData {
  Vector responses;
  Matrix covariates;  ///< n x k, intercept column included by the caller
  std::vector<bool> censored;
  std::vector<std::string> covariate_names;  ///< optional, k entries when set

  /// Builds flags from the responses (censored iff y == 0) and validates.
  static MarginData from_responses(Vector responses, Matrix covariates,
                                   std::vector<std::string> names = {});

  std::size_t size() const { return static_cast<std::size_t>(responses.size()); }
  std::size_t columns() const { return static_cast<std::size_t>(covariates.cols()); }
  std::size_t censored_count() const;
  double censoring_rate() const;

  /// Checks sizes, n >= k + 2, y >= 0, flag <=> (y == 0) and full column rank.
  /// Throws DataError.
  void validate() const;
};

struct MarginParams {
  Vector beta;
  double sigma = 1.0;

  /// Throws DomainError unless sigma > 0 and beta is finite.
  void validate() const;
};

double tobit_log_density(double y, CovariateRow x, const MarginParams& p);
/// Latent-normal distribution function; at y = 0 this is the point mass
/// Phi(-x'beta/sigma).
double tobit_cdf(double y, CovariateRow x, const MarginParams& p);
double margin_log_likelihood(const MarginData& d, const MarginParams& p);

/// Phi((y - x'beta)/sigma) clamped into [1e-12, 1 - 1e-12]; y must be > 0.
double to_uniform(double y, CovariateRow x, const MarginParams& p);
/// Phi(-x'beta/sigma): latent-uniform mass at or below the censoring point.
double censoring_threshold_u(CovariateRow x, const MarginParams& p);

struct MarginFit {
  MarginParams params;
  double log_likelihood = 0.0;
  bool converged = false;
};

/// OLS start on the uncensored rows (unless `start` is given), then a
/// Nelder-Mead search over (beta, log sigma). Throws EstimationError when
/// every observation is censored.
MarginFit fit_margin(const MarginData& d, const OptimizerSettings& settings = {},
                     const std::optional<MarginParams>& start = std::nullopt);

}  // namespace claytobit
