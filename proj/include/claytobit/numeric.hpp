#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace claytobit {

// ---------------------------------------------------------------------------
// Standard normal distribution
// ---------------------------------------------------------------------------

double normal_pdf(double z);
double normal_cdf(double z);
/// log Phi(z), accurate far into the lower tail where Phi underflows.
double normal_log_cdf(double z);
/// Inverse of normal_cdf (Wichura's AS241, PPND16). Throws DomainError
/// unless 0 < p < 1.
double normal_quantile(double p);

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

/// Seedable uniform/normal source. A (seed, stream) pair fully determines the
/// draw sequence, so parallel replicates each get their own stream and results
/// do not depend on scheduling. Not thread-safe; one owner at a time.
class RandomSource {
 public:
  RandomSource(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal via inversion, so draws are identical on every platform.
  double normal();

  /// Independent child source; the same (parent, id) always gives the same child.
  RandomSource substream(std::uint64_t id) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Bounded Nelder-Mead maximizer
// ---------------------------------------------------------------------------

struct OptimizerSettings {
  int max_evaluations = 20000;
  double absolute_tolerance = 1e-8;
  double parameter_tolerance = 1e-6;

  /// Throws SetupError if a tolerance is not strictly positive or the
  /// evaluation budget is below 100.
  void validate() const;
};

struct Bound {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

struct MaximizeResult {
  std::vector<double> argmax;
  double value = 0.0;
  bool converged = false;
  int evaluations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

/// Maximizes `objective` over the box `bounds` with a Nelder-Mead simplex run
/// in unconstrained coordinates: half-bounded coordinates on a log scale,
/// doubly-bounded ones through a logistic map. The search restarts from the
/// best vertex until a restart no longer improves the value.
///
/// Non-finite objective values inside the search are treated as -inf. A
/// non-finite value at `start` is a SetupError. When the evaluation budget
/// runs out the best point found is returned with `converged == false`.
MaximizeResult maximize(const Objective& objective, std::vector<double> start,
                        std::vector<Bound> bounds,
                        const OptimizerSettings& settings = {});

// ---------------------------------------------------------------------------
// Misc
// ---------------------------------------------------------------------------

/// Kendall's tau-a of paired samples; O(n^2).
double empirical_kendall_tau(std::span<const double> a, std::span<const double> b);

/// Runs body(i) for i in [0, count) on `workers` threads. Each index runs
/// exactly once; callers write results into per-index slots so the outcome is
/// independent of the worker count. The first exception thrown is rethrown.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace claytobit
