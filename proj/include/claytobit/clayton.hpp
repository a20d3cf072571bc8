#pragma once

#include "claytobit/numeric.hpp"

namespace claytobit {

/// Clayton association parameter, theta > 0.
class CopulaParam {
 public:
  /// Throws DomainError unless theta is finite and strictly positive.
  explicit CopulaParam(double theta);
  double theta() const noexcept { return theta_; }

 private:
  double theta_;
};

struct UnitPair {
  double u1;
  double u2;
};

namespace clayton {

inline constexpr double kUnitFloor = 1e-12;
inline constexpr double kUnitCeiling = 1.0 - 1e-12;
/// Search range for theta in every optimizer that fits a Clayton copula.
inline constexpr double kThetaMin = 1e-6;
inline constexpr double kThetaMax = 1e3;

/// Clamps into [1e-12, 1 - 1e-12]; NaN is a DomainError.
double clamp_unit(double u);

/// C(u1, u2) = (u1^-t + u2^-t - 1)^(-1/t), evaluated in log space.
double cdf(UnitPair p, CopulaParam c);
double log_density(UnitPair p, CopulaParam c);
double density(UnitPair p, CopulaParam c);
/// log_density for arguments already clamped and log-transformed; used by
/// the likelihood loops, which evaluate many theta values on fixed data.
double log_density_from_logs(double log_u1, double log_u2, CopulaParam c);

/// Conditional law of the first argument given the second:
/// h(u | w) = dC(w, u)/dw = P(U <= u | W = w). The copula is exchangeable, so
/// the same function serves both conditioning directions.
double h_function(double u_given, double u_cond, CopulaParam c);
double log_h_function(double u_given, double u_cond, CopulaParam c);
/// Closed-form inverse of h_function in its first argument.
double h_inverse(double v, double u_cond, CopulaParam c);

/// Conditional inversion: u1 ~ U(0,1), v ~ U(0,1), u2 = h_inverse(v, u1).
UnitPair sample_pair(RandomSource& rng, CopulaParam c);

double kendall_tau(CopulaParam c);
/// Lower tail dependence coefficient 2^(-1/theta).
double lower_tail_dependence(CopulaParam c);
/// Inverse of kendall_tau for tau in (0, 1).
double theta_from_tau(double tau);

}  // namespace clayton
}  // namespace claytobit
