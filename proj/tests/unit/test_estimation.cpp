#include <doctest.h>

#include <cmath>
#include <random>

#include "claytobit/errors.hpp"
#include "claytobit/estimation.hpp"
#include "oracles.hpp"

using namespace claytobit;

namespace {

ModelParams intercept_params(double b1, double s1, double b2, double s2, double theta) {
  ModelParams p;
  p.margin1.beta = Vector::Constant(1, b1);
  p.margin1.sigma = s1;
  p.margin2.beta = Vector::Constant(1, b2);
  p.margin2.sigma = s2;
  p.copula = CopulaParam(theta);
  return p;
}

// n identical rows, intercept only, responses fixed.
Dataset constant_rows(int n, double y1, double y2) {
  const Matrix x = Matrix::Ones(n, 1);
  return {MarginData::from_responses(Vector::Constant(n, y1), x),
          MarginData::from_responses(Vector::Constant(n, y2), x)};
}

ModelParams two_covariate_params(double theta) {
  ModelParams p;
  p.margin1.beta = Vector(2);
  p.margin1.beta << 1.0, 1.0;
  p.margin1.sigma = 1.0;
  p.margin2.beta = Vector(2);
  p.margin2.beta << 2.0, -0.5;
  p.margin2.sigma = 2.0;
  p.copula = CopulaParam(theta);
  return p;
}

SimulatedData draw(int n, const ModelParams& p, std::uint64_t seed) {
  RandomSource rng(seed, 0);
  Matrix x1(n, 2), x2(n, 2);
  for (int i = 0; i < n; ++i) {
    x1(i, 0) = x2(i, 0) = 1.0;
    x1(i, 1) = rng.normal();
    x2(i, 1) = 1.0 + 2.0 * rng.normal();
  }
  return simulate_responses(x1, x2, p, rng);
}

}  // namespace

TEST_CASE("parameter vector round trip and labels") {
  const ModelParams p = two_covariate_params(1.5);
  const Vector v = p.to_vector();
  REQUIRE(v.size() == 7);
  CHECK(v[2] == 1.0);
  CHECK(v[5] == 2.0);
  CHECK(v[6] == 1.5);
  const ModelParams q = ModelParams::from_vector(v, 2, 2);
  CHECK(q.to_vector() == v);
  CHECK(p.parameter_count() == 7);
  CHECK(p.is_positive_parameter(2));
  CHECK(p.is_positive_parameter(5));
  CHECK(p.is_positive_parameter(6));
  CHECK_FALSE(p.is_positive_parameter(0));
  const auto names = parameter_names(2, 2);
  CHECK(names == std::vector<std::string>{"beta0_1", "beta1_1", "sigma_1", "beta0_2", "beta1_2",
                                          "sigma_2", "theta"});
  CHECK_THROWS(ModelParams::from_vector(v, 3, 3));
}

TEST_CASE("Dataset::without drops one observation from both margins") {
  const SimulatedData s = draw(20, two_covariate_params(2.0), 1);
  const Dataset d = s.data.without(4);
  CHECK(d.size() == 19);
  CHECK(d.margin1.responses[4] == s.data.margin1.responses[5]);
  CHECK(d.margin2.covariates(4, 1) == s.data.margin2.covariates(5, 1));
  CHECK(d.margin1.censored.size() == 19);
}

TEST_CASE("Dataset validation checks matching sizes") {
  const SimulatedData a = draw(20, two_covariate_params(2.0), 1);
  const SimulatedData b = draw(25, two_covariate_params(2.0), 2);
  const Dataset mixed{a.data.margin1, b.data.margin2};
  CHECK_THROWS_AS(mixed.validate(), DataError);
}

TEST_CASE("simulate_responses censors at zero with the model rate") {
  const ModelParams p = intercept_params(0.5, 1.0, -0.2, 2.0, 2.0);
  RandomSource rng(9, 0);
  const Matrix x = Matrix::Ones(40000, 1);
  const SimulatedData s = simulate_responses(x, x, p, rng);
  CHECK(s.data.margin1.censoring_rate() == doctest::Approx(normal_cdf(-0.5)).epsilon(0.02));
  CHECK(s.data.margin2.censoring_rate() == doctest::Approx(normal_cdf(0.1)).epsilon(0.02));
  for (Eigen::Index i = 0; i < 100; ++i) {
    CHECK(s.data.margin1.responses[i] == std::max(0.0, s.latent1[i]));
  }
  std::vector<double> u1, u2;
  for (Eigen::Index i = 0; i < 5000; ++i) {
    u1.push_back(normal_cdf((s.latent1[i] - 0.5) / 1.0));
    u2.push_back(normal_cdf((s.latent2[i] + 0.2) / 2.0));
  }
  CHECK(empirical_kendall_tau(u1, u2) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("fit_theta matches a one-dimensional grid search") {
  RandomSource rng(4, 0);
  std::vector<double> u1, u2;
  for (int i = 0; i < 600; ++i) {
    const UnitPair u = clayton::sample_pair(rng, CopulaParam(3.0));
    u1.push_back(u.u1);
    u2.push_back(u.u2);
  }
  const ThetaFit fit = fit_theta(u1, u2, 1.0);
  CHECK(fit.converged);
  const auto loglik = [&](double theta) {
    double s = 0.0;
    for (std::size_t i = 0; i < u1.size(); ++i) s += std::log(oracle::clayton_density_fd(u1[i], u2[i], theta));
    return s;
  };
  double best = 0.0, best_value = -INFINITY;
  for (double t = 2.0; t <= 4.5; t += 0.01) {
    const double v = loglik(t);
    if (v > best_value) {
      best_value = v;
      best = t;
    }
  }
  CHECK(std::abs(fit.theta - best) <= 0.01);
  CHECK(fit.log_likelihood >= best_value - 1e-6);
}

TEST_CASE("fit_ifm recovers the generating parameters under light censoring") {
  ModelParams truth = two_covariate_params(2.0);
  truth.margin1.beta[0] = 4.0;
  truth.margin2.beta[0] = 7.0;
  const SimulatedData s = draw(3000, truth, 12);
  const FitResult fit = fit_ifm(s.data);
  CHECK(fit.converged);
  const Vector est = fit.params.to_vector(), tv = truth.to_vector();
  for (Eigen::Index i = 0; i < tv.size(); ++i) CHECK(est[i] == doctest::Approx(tv[i]).epsilon(0.1));
  CHECK(fit.theta_ifm == fit.params.copula.theta());
  CHECK(fit.log_likelihood == doctest::Approx(full_log_likelihood(s.data, fit.params)));
}

TEST_CASE("fit_ifm needs jointly uncensored observations") {
  const Dataset d = constant_rows(30, 0.0, 1.0);
  CHECK_THROWS_AS(fit_ifm(d), EstimationError);
}

TEST_CASE("pseudo observations use F(0) for censored entries") {
  const SimulatedData s = draw(200, two_covariate_params(2.0), 5);
  const ModelParams& p = two_covariate_params(2.0);
  std::vector<double> u1, u2;
  pseudo_observations(s.data, p, u1, u2);
  for (std::size_t i = 0; i < s.data.size(); ++i) {
    const auto row = s.data.margin1.covariates.row(static_cast<Eigen::Index>(i));
    if (s.data.margin1.censored[i])
      CHECK(u1[i] == doctest::Approx(censoring_threshold_u(row, p.margin1)));
    else
      CHECK(u1[i] == doctest::Approx(to_uniform(s.data.margin1.responses[static_cast<Eigen::Index>(i)], row, p.margin1)));
  }
}

TEST_CASE("augment leaves uncensored entries alone and stays in the censoring region") {
  const ModelParams p = two_covariate_params(2.0);
  const SimulatedData s = draw(500, p, 6);
  RandomSource rng(1, 1);
  const AugmentedUniforms a = augment(s.data, p, rng);
  std::vector<double> u1, u2;
  pseudo_observations(s.data, p, u1, u2);
  for (std::size_t i = 0; i < s.data.size(); ++i) {
    if (s.data.margin1.censored[i]) {
      CHECK(a.u1[i] < u1[i]);
      CHECK(a.u1[i] > 0.0);
    } else {
      CHECK(a.u1[i] == u1[i]);
    }
    if (s.data.margin2.censored[i])
      CHECK(a.u2[i] < u2[i]);
    else
      CHECK(a.u2[i] == u2[i]);
  }
  CHECK(a.augmented1 == s.data.margin1.censored);
  CHECK(a.degenerate == 0);
}

TEST_CASE("augment uses common random numbers") {
  const ModelParams p = two_covariate_params(2.0);
  const SimulatedData s = draw(300, p, 6);
  RandomSource r1(3, 0), r2(3, 0);
  const AugmentedUniforms a = augment(s.data, p, r1);
  const AugmentedUniforms b = augment(s.data, p, r2);
  CHECK(a.u1 == b.u1);
  CHECK(a.u2 == b.u2);
  // Two uniforms per observation whatever the censoring pattern.
  RandomSource r3(3, 0);
  for (std::size_t i = 0; i < 2 * s.data.size(); ++i) r3.uniform();
  RandomSource r4(3, 0);
  augment(s.data, p, r4);
  CHECK(r3.uniform() == r4.uniform());
}

TEST_CASE("single-censored draws follow the truncated conditional law") {
  const double theta = 2.0;
  const ModelParams p = intercept_params(0.3, 1.0, 0.0, 1.0, theta);
  const double y2 = 0.4;
  const Dataset d = constant_rows(3000, 0.0, y2);
  RandomSource rng(21, 0);
  const AugmentedUniforms a = augment(d, p, rng);
  const double w = normal_cdf(y2);
  const double a1 = normal_cdf(-0.3);
  const double norm = oracle::clayton_conditional_fd(a1, w, theta);
  const auto cdf = [&](double t) { return oracle::clayton_conditional_fd(std::min(t, a1), w, theta) / norm; };
  CHECK(oracle::ks_pvalue(a.u1, cdf) > 0.01);
}

TEST_CASE("both-censored draws follow the copula restricted to the rectangle") {
  const double theta = 1.2;
  const ModelParams p = intercept_params(0.2, 1.0, -0.1, 1.0, theta);
  const Dataset d = constant_rows(6000, 0.0, 0.0);
  RandomSource rng(22, 0);
  const AugmentedUniforms a = augment(d, p, rng);
  const double a1 = normal_cdf(-0.2), a2 = normal_cdf(0.1);
  const double mass = static_cast<double>(oracle::clayton_cdf(a1, a2, theta));
  double worst = 0.0;
  for (int i = 1; i <= 10; ++i)
    for (int j = 1; j <= 10; ++j) {
      const double t1 = a1 * i / 10.0, t2 = a2 * j / 10.0;
      double count = 0.0;
      for (std::size_t k = 0; k < a.u1.size(); ++k) count += (a.u1[k] <= t1 && a.u2[k] <= t2);
      const double exact = static_cast<double>(oracle::clayton_cdf(t1, t2, theta)) / mass;
      worst = std::max(worst, std::abs(count / a.u1.size() - exact));
    }
  CHECK(worst < 0.03);
}

TEST_CASE("degenerate censoring regions are counted") {
  // Phi(-7.5) is about 3e-14, below the 1e-12 floor
  const ModelParams p = intercept_params(7.5, 1.0, 1.0, 1.0, 2.0);
  Dataset d = constant_rows(10, 1.0, 1.0);
  d.margin1.responses[0] = 0.0;
  d.margin1.censored[0] = true;
  RandomSource rng(1, 0);
  const AugmentedUniforms a = augment(d, p, rng);
  CHECK(a.degenerate == 1);
  CHECK(a.u1[0] > 0.0);
  CHECK(a.u1[0] < normal_cdf(-7.5));
}

TEST_CASE("MIFM equals IFM without censoring") {
  ModelParams p = two_covariate_params(2.0);
  p.margin1.beta[0] = 20.0;
  p.margin2.beta[0] = 30.0;
  const SimulatedData s = draw(300, p, 31);
  REQUIRE(s.data.margin1.censored_count() == 0);
  REQUIRE(s.data.margin2.censored_count() == 0);
  const FitResult ifm = fit_ifm(s.data);
  const FitResult mifm = fit_mifm(s.data, {}, {}, RandomSource(1, 0));
  CHECK(mifm.params.to_vector() == ifm.params.to_vector());
  CHECK(mifm.log_likelihood == ifm.log_likelihood);
  CHECK(mifm.mifm_iterations == 0);
}

TEST_CASE("MIFM raises theta under heavy censoring and is reproducible") {
  ModelParams p = two_covariate_params(1.2);
  p.margin1.beta[0] = 0.1;
  p.margin2.beta[0] = 0.25;
  const SimulatedData s = draw(800, p, 40);
  const FitResult a = fit_mifm(s.data, {}, {}, RandomSource(5, 1));
  const FitResult b = fit_mifm(s.data, {}, {}, RandomSource(5, 1));
  CHECK(a.params.to_vector() == b.params.to_vector());
  CHECK(a.mifm_iterations == 1);
  CHECK(a.theta_trace.size() == 1);
  CHECK(a.converged);
  // margins are the stage-one estimates
  const FitResult ifm = fit_ifm(s.data);
  CHECK(a.params.margin1.beta == ifm.params.margin1.beta);
  CHECK(a.theta_ifm == ifm.theta_ifm);
}

TEST_CASE("iterated MIFM stops when theta settles") {
  const SimulatedData s = draw(500, two_covariate_params(2.0), 41);
  MifmConfig cfg;
  cfg.max_passes = 60;
  cfg.theta_tolerance = 1e-4;
  const FitResult r = fit_mifm(s.data, {}, cfg, RandomSource(6, 0));
  CHECK(r.mifm_iterations <= 60);
  CHECK(r.theta_trace.size() == static_cast<std::size_t>(r.mifm_iterations));
  if (r.converged) {
    const auto n = r.theta_trace.size();
    REQUIRE(n >= 2);
    CHECK(std::abs(r.theta_trace[n - 1] - r.theta_trace[n - 2]) < 1e-4);
  }
}

TEST_CASE("MIFM configuration validation") {
  MifmConfig cfg;
  cfg.max_passes = 0;
  CHECK_THROWS(cfg.validate());
  cfg = {};
  cfg.theta_tolerance = -1.0;
  CHECK_THROWS(cfg.validate());
  cfg = {};
  cfg.augmentations_per_pass = 0;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("make_estimator dispatches on the kind") {
  const SimulatedData s = draw(400, two_covariate_params(2.0), 50);
  EstimatorConfig cfg;
  cfg.kind = EstimatorKind::ifm;
  const FitResult ifm = make_estimator(cfg)(s.data, RandomSource(1, 0), nullptr);
  CHECK(ifm.params.copula.theta() == fit_ifm(s.data).params.copula.theta());
  cfg.kind = EstimatorKind::mifm;
  const FitResult mifm = make_estimator(cfg)(s.data, RandomSource(1, 0), nullptr);
  CHECK(mifm.theta_ifm == ifm.theta_ifm);
}

TEST_CASE("summarize_dependence") {
  ModelParams p = two_covariate_params(1.3284);
  const DependenceSummary s = summarize_dependence(p);
  CHECK(s.tau == doctest::Approx(0.3991).epsilon(5e-5));
  CHECK(s.chi == doctest::Approx(0.5934).epsilon(5e-5));
}
