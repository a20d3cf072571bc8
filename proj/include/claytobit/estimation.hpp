#pragma once

#include <functional>
#include <string>
#include <vector>

#include "claytobit/clayton.hpp"
#include "claytobit/tobit.hpp"

namespace claytobit {

/// Two censored margins observed on the same n individuals.
struct Dataset {
  MarginData margin1;
  MarginData margin2;

  std::size_t size() const { return margin1.size(); }
  /// Validates both margins and checks that they have the same length.
  void validate() const;
  /// Copy with observation `index` removed from both margins.
  Dataset without(std::size_t index) const;
};

/// (beta_1, sigma_1, beta_2, sigma_2, theta).
struct ModelParams {
  MarginParams margin1;
  MarginParams margin2;
  CopulaParam copula{1.0};

  std::size_t parameter_count() const;
  /// Flattened in table order: beta_1..., sigma_1, beta_2..., sigma_2, theta.
  Vector to_vector() const;
  static ModelParams from_vector(const Vector& v, std::size_t k1, std::size_t k2);
  /// True for the scale and association slots, which must stay positive.
  bool is_positive_parameter(std::size_t index) const;
};

/// Row labels matching ModelParams::to_vector, e.g. beta0_1, sigma_1, theta.
std::vector<std::string> parameter_names(const Dataset& d);
std::vector<std::string> parameter_names(std::size_t k1, std::size_t k2);

/// Latent-uniform pairs after data augmentation.
struct AugmentedUniforms {
  std::vector<double> u1;
  std::vector<double> u2;
  std::vector<bool> augmented1;
  std::vector<bool> augmented2;
  /// Censored entries whose truncation region was below 1e-12.
  std::size_t degenerate = 0;
};

struct FitResult {
  ModelParams params;
  double log_likelihood = 0.0;
  double theta_ifm = 0.0;
  int mifm_iterations = 0;
  bool converged = false;
  std::vector<double> theta_trace;
};

struct MifmConfig {
  int max_passes = 1;
  double theta_tolerance = 1e-4;
  int augmentations_per_pass = 1;

  void validate() const;
};

enum class EstimatorKind { ifm, mifm };

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::mifm;
  OptimizerSettings optimizer;
  MifmConfig mifm;
};

/// A fit procedure. `warm_start` (may be null) seeds the optimizers; the
/// random source drives data augmentation.
using Estimator =
    std::function<FitResult(const Dataset&, RandomSource, const ModelParams* warm_start)>;

Estimator make_estimator(const EstimatorConfig& config);

/// Per-observation u_j = F_j(y_ij) with censored entries at F_j(0), clamped.
/// This is the observed-data convention used by the IFM second stage.
void pseudo_observations(const Dataset& d, const ModelParams& p, std::vector<double>& u1,
                         std::vector<double>& u2);

/// Copula term (at pseudo_observations) plus both margin log-likelihoods.
double full_log_likelihood(const Dataset& d, const ModelParams& p);

struct ThetaFit {
  double theta = 1.0;
  double log_likelihood = 0.0;
  bool converged = false;
};

/// Maximizes sum_i log c(u1_i, u2_i; theta) over theta in [1e-6, 1e3] on the
/// log scale.
ThetaFit fit_theta(std::span<const double> u1, std::span<const double> u2, double start,
                   const OptimizerSettings& settings = {});

/// Two-stage IFM: margins by fit_margin, theta on the observed-data
/// pseudo-observations.
FitResult fit_ifm(const Dataset& d, const OptimizerSettings& settings = {},
                  const ModelParams* warm_start = nullptr);

/// Draws censored entries from the Clayton conditional law truncated to the
/// censoring region; uncensored entries map through to_uniform. Two uniforms
/// are consumed per observation whatever its censoring state, so a given
/// stream yields common random numbers across parameter values.
AugmentedUniforms augment(const Dataset& d, const ModelParams& p, RandomSource& rng);

/// MIFM: stage 1 as IFM, then theta re-estimated on augmented data. With
/// max_passes > 1 augmentation and re-estimation alternate (same substream
/// every pass) until theta moves less than theta_tolerance.
FitResult fit_mifm(const Dataset& d, const OptimizerSettings& settings, const MifmConfig& mifm,
                   RandomSource rng, const ModelParams* warm_start = nullptr);

struct DependenceSummary {
  double tau;
  double chi;
};

DependenceSummary summarize_dependence(const ModelParams& p);

/// A dataset drawn from the model at fixed covariates, with its latent
/// responses y* (before censoring).
struct SimulatedData {
  Dataset data;
  Vector latent1;
  Vector latent2;
};

/// Clayton pair -> normal errors -> censor at zero, one row per covariate row.
SimulatedData simulate_responses(const Matrix& x1, const Matrix& x2, const ModelParams& p,
                                 RandomSource& rng);

}  // namespace claytobit
