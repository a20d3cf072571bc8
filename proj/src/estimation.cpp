#include "claytobit/estimation.hpp"

#include <algorithm>
#include <cmath>

#include "claytobit/errors.hpp"

namespace claytobit {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

MarginData drop_row(const MarginData& m, std::size_t index) {
  const Eigen::Index n = static_cast<Eigen::Index>(m.size());
  const Eigen::Index i = idx(index);
  MarginData out;
  out.responses.resize(n - 1);
  out.responses << m.responses.head(i), m.responses.tail(n - i - 1);
  out.covariates.resize(n - 1, m.covariates.cols());
  out.covariates << m.covariates.topRows(i), m.covariates.bottomRows(n - i - 1);
  out.censored = m.censored;
  out.censored.erase(out.censored.begin() + static_cast<std::ptrdiff_t>(index));
  out.covariate_names = m.covariate_names;
  return out;
}

// Strictly below the threshold, as required of augmented values.
double below(double u, double threshold) {
  return u < threshold ? u : std::nextafter(threshold, 0.0);
}

// Solves C(u1, a2) = w * C(a1, a2) for u1 in (0, a1) by bisection on log u1.
double invert_rectangle_marginal(double w, double a1, double a2, CopulaParam c) {
  const double target = std::log(w) + std::log(clayton::cdf({a1, a2}, c));
  double lo = std::log(clayton::kUnitFloor);
  double hi = std::log(a1);
  if (std::log(clayton::cdf({clayton::kUnitFloor, a2}, c)) >= target) return clayton::kUnitFloor;
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::log(clayton::cdf({std::exp(mid), a2}, c)) < target)
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

std::size_t count_both_uncensored(const Dataset& d) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < d.size(); ++i)
    count += !d.margin1.censored[i] && !d.margin2.censored[i];
  return count;
}

double starting_theta(const Dataset& d) {
  std::vector<double> a, b;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.margin1.censored[i] || d.margin2.censored[i]) continue;
    a.push_back(d.margin1.responses[idx(i)]);
    b.push_back(d.margin2.responses[idx(i)]);
  }
  const double tau = a.size() >= 2 ? empirical_kendall_tau(a, b) : 0.0;
  return std::clamp(clayton::theta_from_tau(std::clamp(tau, 0.01, 0.98)), 1e-2, 1e2);
}

}  // namespace

void Dataset::validate() const {
  margin1.validate();
  margin2.validate();
  if (margin1.size() != margin2.size()) throw DataError("margins differ in observation count");
}

Dataset Dataset::without(std::size_t index) const {
  if (index >= size()) throw DomainError("Dataset::without: index out of range");
  return {drop_row(margin1, index), drop_row(margin2, index)};
}

std::size_t ModelParams::parameter_count() const {
  return static_cast<std::size_t>(margin1.beta.size() + margin2.beta.size()) + 3;
}

Vector ModelParams::to_vector() const {
  const Eigen::Index k1 = margin1.beta.size();
  const Eigen::Index k2 = margin2.beta.size();
  Vector v(k1 + k2 + 3);
  v << margin1.beta, margin1.sigma, margin2.beta, margin2.sigma, copula.theta();
  return v;
}

ModelParams ModelParams::from_vector(const Vector& v, std::size_t k1, std::size_t k2) {
  if (static_cast<std::size_t>(v.size()) != k1 + k2 + 3)
    throw DomainError("ModelParams::from_vector: length mismatch");
  ModelParams p;
  p.margin1.beta = v.head(idx(k1));
  p.margin1.sigma = v[idx(k1)];
  p.margin2.beta = v.segment(idx(k1 + 1), idx(k2));
  p.margin2.sigma = v[idx(k1 + k2 + 1)];
  p.copula = CopulaParam(v[idx(k1 + k2 + 2)]);
  p.margin1.validate();
  p.margin2.validate();
  return p;
}

bool ModelParams::is_positive_parameter(std::size_t index) const {
  const auto k1 = static_cast<std::size_t>(margin1.beta.size());
  const auto k2 = static_cast<std::size_t>(margin2.beta.size());
  return index == k1 || index == k1 + k2 + 1 || index == k1 + k2 + 2;
}

std::vector<std::string> parameter_names(std::size_t k1, std::size_t k2) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < k1; ++j) names.push_back("beta" + std::to_string(j) + "_1");
  names.emplace_back("sigma_1");
  for (std::size_t j = 0; j < k2; ++j) names.push_back("beta" + std::to_string(j) + "_2");
  names.emplace_back("sigma_2");
  names.emplace_back("theta");
  return names;
}

std::vector<std::string> parameter_names(const Dataset& d) {
  const auto& n1 = d.margin1.covariate_names;
  const auto& n2 = d.margin2.covariate_names;
  if (n1.empty() || n2.empty()) return parameter_names(d.margin1.columns(), d.margin2.columns());
  std::vector<std::string> names;
  for (const auto& n : n1) names.push_back("1:" + n);
  names.emplace_back("1:sigma");
  for (const auto& n : n2) names.push_back("2:" + n);
  names.emplace_back("2:sigma");
  names.emplace_back("theta");
  return names;
}

void MifmConfig::validate() const {
  if (max_passes < 1) throw ConfigError("mifm.max_passes", "must be a positive integer");
  if (!(theta_tolerance > 0.0)) throw ConfigError("mifm.theta_tolerance", "must be positive");
  if (augmentations_per_pass < 1)
    throw ConfigError("mifm.augmentations_per_pass", "must be a positive integer");
}

void pseudo_observations(const Dataset& d, const ModelParams& p, std::vector<double>& u1,
                         std::vector<double>& u2) {
  const std::size_t n = d.size();
  u1.resize(n);
  u2.resize(n);
  const Vector m1 = d.margin1.covariates * p.margin1.beta;
  const Vector m2 = d.margin2.covariates * p.margin2.beta;
  for (std::size_t i = 0; i < n; ++i) {
    u1[i] = clayton::clamp_unit(
        normal_cdf((d.margin1.responses[idx(i)] - m1[idx(i)]) / p.margin1.sigma));
    u2[i] = clayton::clamp_unit(
        normal_cdf((d.margin2.responses[idx(i)] - m2[idx(i)]) / p.margin2.sigma));
  }
}

double full_log_likelihood(const Dataset& d, const ModelParams& p) {
  std::vector<double> u1, u2;
  pseudo_observations(d, p, u1, u2);
  double copula_term = 0.0;
  for (std::size_t i = 0; i < u1.size(); ++i) copula_term += clayton::log_density({u1[i], u2[i]}, p.copula);
  return copula_term + margin_log_likelihood(d.margin1, p.margin1) +
         margin_log_likelihood(d.margin2, p.margin2);
}

ThetaFit fit_theta(std::span<const double> u1, std::span<const double> u2, double start,
                   const OptimizerSettings& settings) {
  if (u1.size() != u2.size() || u1.empty()) throw DomainError("fit_theta: bad sample");
  std::vector<double> l1(u1.size()), l2(u2.size());
  for (std::size_t i = 0; i < u1.size(); ++i) {
    l1[i] = std::log(clayton::clamp_unit(u1[i]));
    l2[i] = std::log(clayton::clamp_unit(u2[i]));
  }
  const Objective objective = [&](std::span<const double> x) {
    const CopulaParam c(std::exp(x[0]));
    double total = 0.0;
    for (std::size_t i = 0; i < l1.size(); ++i) total += clayton::log_density_from_logs(l1[i], l2[i], c);
    return total;
  };
  start = std::clamp(start, clayton::kThetaMin, clayton::kThetaMax);
  const Bound range{std::log(clayton::kThetaMin), std::log(clayton::kThetaMax)};
  const MaximizeResult r = maximize(objective, {std::log(start)}, {range}, settings);
  return {std::clamp(std::exp(r.argmax[0]), clayton::kThetaMin, clayton::kThetaMax), r.value,
          r.converged};
}

FitResult fit_ifm(const Dataset& d, const OptimizerSettings& settings,
                  const ModelParams* warm_start) {
  d.validate();
  if (count_both_uncensored(d) < 10)
    throw EstimationError("IFM needs at least 10 observations uncensored in both margins");

  const MarginFit m1 =
      fit_margin(d.margin1, settings, warm_start ? std::optional(warm_start->margin1) : std::nullopt);
  const MarginFit m2 =
      fit_margin(d.margin2, settings, warm_start ? std::optional(warm_start->margin2) : std::nullopt);

  FitResult result;
  result.params.margin1 = m1.params;
  result.params.margin2 = m2.params;

  std::vector<double> u1, u2;
  pseudo_observations(d, result.params, u1, u2);
  const double start = warm_start ? warm_start->copula.theta() : starting_theta(d);
  const ThetaFit theta = fit_theta(u1, u2, start, settings);

  result.params.copula = CopulaParam(theta.theta);
  result.theta_ifm = theta.theta;
  result.converged = m1.converged && m2.converged && theta.converged;
  result.log_likelihood = full_log_likelihood(d, result.params);
  return result;
}

AugmentedUniforms augment(const Dataset& d, const ModelParams& p, RandomSource& rng) {
  const std::size_t n = d.size();
  AugmentedUniforms out;
  out.u1.resize(n);
  out.u2.resize(n);
  out.augmented1 = d.margin1.censored;
  out.augmented2 = d.margin2.censored;
  const CopulaParam& c = p.copula;

  const Vector m1 = d.margin1.covariates * p.margin1.beta;
  const Vector m2 = d.margin2.covariates * p.margin2.beta;

  // Threshold of a censored entry; tiny regions are replaced by half their width.
  const auto threshold = [&](double mean, double sigma, bool& degenerate) {
    const double a = normal_cdf(-mean / sigma);
    degenerate = a < clayton::kUnitFloor;
    return a;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const double w1 = rng.uniform();
    const double w2 = rng.uniform();
    const bool c1 = d.margin1.censored[i];
    const bool c2 = d.margin2.censored[i];
    const double y1 = d.margin1.responses[idx(i)];
    const double y2 = d.margin2.responses[idx(i)];

    double u1 = c1 ? 0.0 : clayton::clamp_unit(normal_cdf((y1 - m1[idx(i)]) / p.margin1.sigma));
    double u2 = c2 ? 0.0 : clayton::clamp_unit(normal_cdf((y2 - m2[idx(i)]) / p.margin2.sigma));

    bool degenerate1 = false, degenerate2 = false;
    const double a1 = c1 ? threshold(m1[idx(i)], p.margin1.sigma, degenerate1) : 1.0;
    const double a2 = c2 ? threshold(m2[idx(i)], p.margin2.sigma, degenerate2) : 1.0;
    out.degenerate += degenerate1 + degenerate2;

    if (c1 && c2) {
      // u1 from its marginal on the rectangle, then u2 | u1 truncated.
      u1 = degenerate1 ? 0.5 * a1
                       : below(invert_rectangle_marginal(w1, a1, std::max(a2, clayton::kUnitFloor), c), a1);
      u2 = degenerate2 ? 0.5 * a2
                       : below(clayton::h_inverse(w2 * clayton::h_function(a2, u1, c), u1, c), a2);
    } else if (c1) {
      u1 = degenerate1 ? 0.5 * a1
                       : below(clayton::h_inverse(w1 * clayton::h_function(a1, u2, c), u2, c), a1);
    } else if (c2) {
      u2 = degenerate2 ? 0.5 * a2
                       : below(clayton::h_inverse(w2 * clayton::h_function(a2, u1, c), u1, c), a2);
    }
    out.u1[i] = u1;
    out.u2[i] = u2;
  }
  return out;
}

FitResult fit_mifm(const Dataset& d, const OptimizerSettings& settings, const MifmConfig& mifm,
                   RandomSource rng, const ModelParams* warm_start) {
  mifm.validate();
  FitResult result = fit_ifm(d, settings, warm_start);
  if (d.margin1.censored_count() == 0 && d.margin2.censored_count() == 0) {
    result.theta_trace = {result.theta_ifm};
    return result;
  }

  const auto sets = static_cast<std::size_t>(mifm.augmentations_per_pass);
  const std::size_t n = d.size();
  std::vector<double> u1(n * sets), u2(n * sets);
  bool loop_converged = false;
  bool optimizer_converged = true;
  double theta = result.theta_ifm;

  for (int pass = 0; pass < mifm.max_passes; ++pass) {
    ModelParams current = result.params;
    current.copula = CopulaParam(theta);
    for (std::size_t s = 0; s < sets; ++s) {
      RandomSource stream = rng.substream(s);
      const AugmentedUniforms aug = augment(d, current, stream);
      std::copy(aug.u1.begin(), aug.u1.end(), u1.begin() + static_cast<std::ptrdiff_t>(s * n));
      std::copy(aug.u2.begin(), aug.u2.end(), u2.begin() + static_cast<std::ptrdiff_t>(s * n));
    }
    const ThetaFit next = fit_theta(u1, u2, theta, settings);
    optimizer_converged = next.converged;
    result.theta_trace.push_back(next.theta);
    const double change = std::abs(next.theta - theta);
    theta = next.theta;
    if (mifm.max_passes > 1 && change < mifm.theta_tolerance) {
      loop_converged = true;
      break;
    }
  }
  result.mifm_iterations = static_cast<int>(result.theta_trace.size());
  result.params.copula = CopulaParam(theta);
  if (mifm.max_passes == 1) loop_converged = true;
  result.converged = result.converged && optimizer_converged && loop_converged;
  result.log_likelihood = full_log_likelihood(d, result.params);
  return result;
}

Estimator make_estimator(const EstimatorConfig& config) {
  config.optimizer.validate();
  if (config.kind == EstimatorKind::ifm) {
    return [settings = config.optimizer](const Dataset& d, RandomSource, const ModelParams* warm) {
      return fit_ifm(d, settings, warm);
    };
  }
  config.mifm.validate();
  return [settings = config.optimizer, mifm = config.mifm](const Dataset& d, RandomSource rng,
                                                            const ModelParams* warm) {
    return fit_mifm(d, settings, mifm, rng, warm);
  };
}

DependenceSummary summarize_dependence(const ModelParams& p) {
  return {clayton::kendall_tau(p.copula), clayton::lower_tail_dependence(p.copula)};
}

SimulatedData simulate_responses(const Matrix& x1, const Matrix& x2, const ModelParams& p,
                                 RandomSource& rng) {
  if (x1.rows() != x2.rows()) throw DataError("covariate matrices differ in row count");
  p.margin1.validate();
  p.margin2.validate();
  const Eigen::Index n = x1.rows();
  const Vector m1 = x1 * p.margin1.beta;
  const Vector m2 = x2 * p.margin2.beta;
  SimulatedData out;
  out.latent1.resize(n);
  out.latent2.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const UnitPair u = clayton::sample_pair(rng, p.copula);
    out.latent1[i] = m1[i] + p.margin1.sigma * normal_quantile(u.u1);
    out.latent2[i] = m2[i] + p.margin2.sigma * normal_quantile(u.u2);
  }
  out.data.margin1 = MarginData::from_responses(out.latent1.cwiseMax(0.0), x1);
  out.data.margin2 = MarginData::from_responses(out.latent2.cwiseMax(0.0), x2);
  return out;
}

}  // namespace claytobit
