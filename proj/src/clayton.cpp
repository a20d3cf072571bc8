#include "claytobit/clayton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "claytobit/errors.hpp"

namespace claytobit {

CopulaParam::CopulaParam(double theta) : theta_(theta) {
  if (!(std::isfinite(theta) && theta > 0.0))
    throw DomainError("Clayton theta must be finite and positive");
}

namespace clayton {

namespace {

// log(u1^-t + u2^-t - 1) from the logs of the (clamped) arguments.
double log_generator_sum(double log_u1, double log_u2, double theta) {
  const double a = -theta * log_u1;
  const double b = -theta * log_u2;
  const double m = std::max(a, b);
  if (m < 1.0) return std::log1p(std::expm1(a) + std::expm1(b));
  return m + std::log(std::exp(a - m) + std::exp(b - m) - std::exp(-m));
}

}  // namespace

double clamp_unit(double u) {
  if (std::isnan(u)) throw DomainError("unit-interval argument is NaN");
  return std::clamp(u, kUnitFloor, kUnitCeiling);
}

double cdf(UnitPair p, CopulaParam c) {
  // exact boundary values; the clamp would leave C(u, 1) about 1e-12 short of u
  if (p.u1 <= 0.0 || p.u2 <= 0.0) return 0.0;
  if (p.u1 >= 1.0) return std::min(p.u2, 1.0);
  if (p.u2 >= 1.0) return p.u1;
  const double t = c.theta();
  const double ls = log_generator_sum(std::log(clamp_unit(p.u1)), std::log(clamp_unit(p.u2)), t);
  return std::exp(-ls / t);
}

double log_density_from_logs(double l1, double l2, CopulaParam c) {
  const double t = c.theta();
  const double ls = log_generator_sum(l1, l2, t);
  return std::log1p(t) - (t + 1.0) * (l1 + l2) - (2.0 + 1.0 / t) * ls;
}

double log_density(UnitPair p, CopulaParam c) {
  return log_density_from_logs(std::log(clamp_unit(p.u1)), std::log(clamp_unit(p.u2)), c);
}

double density(UnitPair p, CopulaParam c) { return std::exp(log_density(p, c)); }

double log_h_function(double u_given, double u_cond, CopulaParam c) {
  const double t = c.theta();
  const double lc = std::log(clamp_unit(u_cond));
  const double ls = log_generator_sum(lc, std::log(clamp_unit(u_given)), t);
  return -(t + 1.0) * lc - (1.0 + 1.0 / t) * ls;
}

double h_function(double u_given, double u_cond, CopulaParam c) {
  return std::min(1.0, std::exp(log_h_function(u_given, u_cond, c)));
}

double h_inverse(double v, double u_cond, CopulaParam c) {
  const double t = c.theta();
  v = std::clamp(v, std::numeric_limits<double>::min(), 1.0);
  // u = [(v^(-t/(t+1)) - 1) * w^-t + 1]^(-1/t)
  const double a = std::expm1(-t / (t + 1.0) * std::log(v));
  const double log_scaled = std::log(a) - t * std::log(clamp_unit(u_cond));
  const double log_inner =
      log_scaled > 30.0 ? log_scaled + std::log1p(std::exp(-log_scaled))
                        : std::log1p(std::exp(log_scaled));
  return clamp_unit(std::exp(-log_inner / t));
}

UnitPair sample_pair(RandomSource& rng, CopulaParam c) {
  const double u1 = rng.uniform();
  const double v = rng.uniform();
  return {u1, h_inverse(v, u1, c)};
}

double kendall_tau(CopulaParam c) { return c.theta() / (c.theta() + 2.0); }

double lower_tail_dependence(CopulaParam c) { return std::exp2(-1.0 / c.theta()); }

double theta_from_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("theta_from_tau: tau must lie in (0, 1)");
  return 2.0 * tau / (1.0 - tau);
}

}  // namespace clayton
}  // namespace claytobit
