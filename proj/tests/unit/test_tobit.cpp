#include <doctest.h>

#include <cmath>

#include "claytobit/errors.hpp"
#include "claytobit/tobit.hpp"
#include "oracles.hpp"

using namespace claytobit;

namespace {

MarginData small_instance(int n, std::uint64_t seed, double b0, double b1, double sigma) {
  RandomSource rng(seed, 0);
  Matrix x(n, 2);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = rng.normal();
    y[i] = std::max(0.0, b0 + b1 * x(i, 1) + sigma * rng.normal());
  }
  return MarginData::from_responses(y, x);
}

// Brute-force log-likelihood written from the model definition.
double reference_loglik(const MarginData& d, double b0, double b1, double sigma) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double m = b0 + b1 * d.covariates(static_cast<Eigen::Index>(i), 1);
    const double y = d.responses[static_cast<Eigen::Index>(i)];
    if (y == 0.0)
      s += std::log(0.5 * std::erfc(m / sigma / std::sqrt(2.0)));
    else
      s += -0.5 * std::pow((y - m) / sigma, 2) - std::log(sigma) - 0.5 * std::log(2.0 * M_PI);
  }
  return s;
}

// Zooming grid search over (b0, b1, log sigma).
double grid_maximum(const MarginData& d, double c0, double c1, double cs) {
  double best = -INFINITY;
  double half = 2.0;
  for (int round = 0; round < 14; ++round) {
    double n0 = c0, n1 = c1, ns = cs;
    for (int i = -10; i <= 10; ++i)
      for (int j = -10; j <= 10; ++j)
        for (int k = -10; k <= 10; ++k) {
          const double b0 = c0 + half * i / 10.0, b1 = c1 + half * j / 10.0;
          const double ls = cs + half * k / 10.0;
          const double v = reference_loglik(d, b0, b1, std::exp(ls));
          if (v > best) {
            best = v;
            n0 = b0;
            n1 = b1;
            ns = ls;
          }
        }
    c0 = n0;
    c1 = n1;
    cs = ns;
    half *= 0.35;
  }
  return best;
}

}  // namespace

TEST_CASE("tobit density is proper") {
  Eigen::RowVectorXd x(2);
  x << 1.0, 0.7;
  for (double b0 : {-2.0, 0.0, 1.5})
    for (double sigma : {0.3, 1.0, 2.5}) {
      MarginParams p;
      p.beta = Vector(2);
      p.beta << b0, 0.5;
      p.sigma = sigma;
      const double mean = b0 + 0.35;
      const double mass = std::exp(tobit_log_density(0.0, x, p));
      const double upper = std::max(mean, 0.0) + 14.0 * sigma;
      const double cont =
          oracle::integrate([&](double y) { return std::exp(tobit_log_density(y, x, p)); }, 0.0, upper);
      CHECK(mass + cont == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(mass == doctest::Approx(normal_cdf(-mean / sigma)).epsilon(1e-14));
    }
}

TEST_CASE("tobit cdf and uniform transform") {
  Eigen::RowVectorXd x(1);
  x << 1.0;
  MarginParams p;
  p.beta = Vector::Constant(1, 1.0);
  p.sigma = 2.0;
  CHECK_THROWS_AS(tobit_cdf(-1.0, x, p), DomainError);
  CHECK(tobit_cdf(0.0, x, p) == doctest::Approx(normal_cdf(-0.5)));
  CHECK(tobit_cdf(3.0, x, p) == doctest::Approx(normal_cdf(1.0)));
  CHECK(censoring_threshold_u(x, p) == doctest::Approx(normal_cdf(-0.5)));
  CHECK(to_uniform(3.0, x, p) == doctest::Approx(normal_cdf(1.0)));
  CHECK_THROWS_AS(to_uniform(0.0, x, p), DomainError);
  CHECK(to_uniform(1e6, x, p) < 1.0);
}

TEST_CASE("margin log-likelihood matches the reference formula") {
  const MarginData d = small_instance(50, 1, 0.3, 1.0, 1.2);
  MarginParams p;
  p.beta = Vector(2);
  p.beta << 0.25, 0.9;
  p.sigma = 1.1;
  CHECK(margin_log_likelihood(d, p) == doctest::Approx(reference_loglik(d, 0.25, 0.9, 1.1)).epsilon(1e-12));
}

TEST_CASE("fit_margin reaches the grid-search maximum") {
  const MarginData d = small_instance(30, 77, 0.5, 1.0, 1.0);
  REQUIRE(d.censored_count() > 3);
  const MarginFit fit = fit_margin(d);
  CHECK(fit.converged);
  const double grid = grid_maximum(d, fit.params.beta[0] + 0.4, fit.params.beta[1] - 0.3,
                                   std::log(fit.params.sigma) + 0.2);
  CHECK(std::abs(fit.log_likelihood - grid) <= 1e-3);
  CHECK(fit.log_likelihood >= grid - 1e-6);
}

TEST_CASE("fit_margin is start independent") {
  const MarginData d = small_instance(200, 8, 0.2, 1.0, 1.5);
  const MarginFit base = fit_margin(d);
  for (auto [b0, b1, s] : {std::tuple{-2.0, 3.0, 0.2}, {3.0, -1.0, 5.0}, {0.0, 0.0, 1.0}}) {
    MarginParams start;
    start.beta = Vector(2);
    start.beta << b0, b1;
    start.sigma = s;
    const MarginFit other = fit_margin(d, {}, start);
    CHECK(std::abs(other.log_likelihood - base.log_likelihood) <= 1e-4);
    CHECK(other.params.beta[0] == doctest::Approx(base.params.beta[0]).epsilon(1e-3));
    CHECK(other.params.sigma == doctest::Approx(base.params.sigma).epsilon(1e-3));
  }
}

TEST_CASE("fit_margin without censoring is least squares with the ML scale") {
  const MarginData d = small_instance(80, 3, 10.0, 1.0, 1.0);
  REQUIRE(d.censored_count() == 0);
  const MarginFit fit = fit_margin(d);
  const Vector ols = d.covariates.colPivHouseholderQr().solve(d.responses);
  const double rss = (d.responses - d.covariates * ols).squaredNorm();
  CHECK(fit.params.beta[0] == doctest::Approx(ols[0]).epsilon(1e-5));
  CHECK(fit.params.beta[1] == doctest::Approx(ols[1]).epsilon(1e-5));
  CHECK(fit.params.sigma == doctest::Approx(std::sqrt(rss / 80.0)).epsilon(1e-5));
}

TEST_CASE("fit_margin on all-censored data fails") {
  Matrix x(10, 2);
  for (int i = 0; i < 10; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = i;
  }
  const MarginData d = MarginData::from_responses(Vector::Zero(10), x);
  CHECK_THROWS_AS(fit_margin(d), EstimationError);
}

TEST_CASE("MarginData validation") {
  Matrix x(6, 2);
  x.col(0).setOnes();
  x.col(1) << 1, 2, 3, 4, 5, 6;
  Vector y(6);
  y << 0, 1, 2, 0, 3, 1;
  CHECK_NOTHROW(MarginData::from_responses(y, x).validate());

  Matrix collinear = x;
  collinear.col(1).setConstant(2.0);
  CHECK_THROWS_AS(MarginData::from_responses(y, collinear).validate(), DataError);

  MarginData flags = MarginData::from_responses(y, x);
  flags.censored[1] = true;
  CHECK_THROWS_AS(flags.validate(), DataError);

  CHECK_THROWS_AS(MarginData::from_responses(y.head(3), x.topRows(3)).validate(), DataError);
  CHECK(MarginData::from_responses(y, x).censoring_rate() == doctest::Approx(2.0 / 6.0));

  MarginParams bad;
  bad.beta = Vector::Zero(2);
  bad.sigma = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}
