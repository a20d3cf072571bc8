#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "claytobit/errors.hpp"
#include "claytobit/numeric.hpp"

namespace claytobit {

void OptimizerSettings::validate() const {
  if (!(absolute_tolerance > 0.0)) throw SetupError("absolute_tolerance must be positive");
  if (!(parameter_tolerance > 0.0)) throw SetupError("parameter_tolerance must be positive");
  if (max_evaluations < 100) throw SetupError("max_evaluations must be at least 100");
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Maps one coordinate between the box and the real line.
struct CoordinateMap {
  Bound bound;

  bool lower_finite() const { return std::isfinite(bound.lower); }
  bool upper_finite() const { return std::isfinite(bound.upper); }

  double to_box(double t) const {
    if (lower_finite() && upper_finite()) {
      const double s = 1.0 / (1.0 + std::exp(-t));
      return std::clamp(bound.lower + (bound.upper - bound.lower) * s, bound.lower, bound.upper);
    }
    if (lower_finite()) return bound.lower + std::exp(t);
    if (upper_finite()) return bound.upper - std::exp(t);
    return t;
  }

  double from_box(double x) const {
    // Points on (or past) a finite bound are nudged inside before the log.
    const double width = upper_finite() && lower_finite() ? bound.upper - bound.lower : 1.0;
    const double nudge = 1e-10 * std::max(width, 1.0);
    if (lower_finite()) x = std::max(x, bound.lower + nudge);
    if (upper_finite()) x = std::min(x, bound.upper - nudge);
    if (lower_finite() && upper_finite()) return std::log((x - bound.lower) / (bound.upper - x));
    if (lower_finite()) return std::log(x - bound.lower);
    if (upper_finite()) return std::log(bound.upper - x);
    return x;
  }
};

struct Vertex {
  std::vector<double> t;
  double f;
};

class Simplex {
 public:
  Simplex(const Objective& objective, std::vector<CoordinateMap> maps, int budget)
      : objective_(objective), maps_(std::move(maps)), budget_(budget),
        x_scratch_(maps_.size()) {}

  double evaluate(const std::vector<double>& t) {
    ++evaluations_;
    for (std::size_t i = 0; i < t.size(); ++i) x_scratch_[i] = maps_[i].to_box(t[i]);
    const double f = objective_(x_scratch_);
    return std::isfinite(f) ? f : kNegInf;
  }

  bool budget_left() const { return evaluations_ < budget_; }
  int evaluations() const { return evaluations_; }

  std::vector<double> to_box(const std::vector<double>& t) const {
    std::vector<double> x(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) x[i] = maps_[i].to_box(t[i]);
    return x;
  }

  // One Nelder-Mead run from `start`; returns true when the tolerances were met.
  bool run(Vertex& best, const OptimizerSettings& settings) {
    const std::size_t n = best.t.size();
    std::vector<Vertex> v;
    v.reserve(n + 1);
    v.push_back(best);
    for (std::size_t i = 0; i < n; ++i) {
      Vertex p = best;
      p.t[i] += 0.1 * std::max(1.0, std::abs(p.t[i]));
      p.f = evaluate(p.t);
      v.push_back(std::move(p));
    }

    const auto by_value = [](const Vertex& a, const Vertex& b) { return a.f > b.f; };
    std::vector<double> centroid(n), trial(n);
    const auto point = [&](double coef, const std::vector<double>& from) {
      for (std::size_t j = 0; j < n; ++j) trial[j] = centroid[j] + coef * (from[j] - centroid[j]);
      return trial;
    };

    bool converged = false;
    while (true) {
      std::stable_sort(v.begin(), v.end(), by_value);
      double diameter = 0.0;
      for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          diameter = std::max(diameter, std::abs(v[i].t[j] - v[0].t[j]));
      const double spread = v[0].f - v[n].f;
      if (diameter <= settings.parameter_tolerance &&
          (spread <= settings.absolute_tolerance || !std::isfinite(spread))) {
        converged = std::isfinite(v[0].f);
        break;
      }
      if (!budget_left()) break;

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) centroid[j] += v[i].t[j] / static_cast<double>(n);

      Vertex& worst = v[n];
      Vertex reflected{point(-1.0, worst.t), 0.0};
      reflected.f = evaluate(reflected.t);

      if (reflected.f > v[0].f) {
        Vertex expanded{point(-2.0, worst.t), 0.0};
        expanded.f = evaluate(expanded.t);
        worst = expanded.f > reflected.f ? std::move(expanded) : std::move(reflected);
        continue;
      }
      if (reflected.f > v[n - 1].f) {
        worst = std::move(reflected);
        continue;
      }
      if (reflected.f > worst.f) {
        Vertex outside{point(0.5, reflected.t), 0.0};
        outside.f = evaluate(outside.t);
        if (outside.f >= reflected.f) {
          worst = std::move(outside);
          continue;
        }
      } else {
        Vertex inside{point(0.5, worst.t), 0.0};
        inside.f = evaluate(inside.t);
        if (inside.f > worst.f) {
          worst = std::move(inside);
          continue;
        }
      }
      for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 0; j < n; ++j) v[i].t[j] = v[0].t[j] + 0.5 * (v[i].t[j] - v[0].t[j]);
        v[i].f = evaluate(v[i].t);
      }
    }
    best = v[0];
    return converged;
  }

 private:
  const Objective& objective_;
  std::vector<CoordinateMap> maps_;
  int budget_;
  int evaluations_ = 0;
  std::vector<double> x_scratch_;
};

}  // namespace

MaximizeResult maximize(const Objective& objective, std::vector<double> start,
                        std::vector<Bound> bounds, const OptimizerSettings& settings) {
  settings.validate();
  if (start.empty()) throw SetupError("maximize: empty parameter vector");
  if (bounds.empty()) bounds.resize(start.size());
  if (bounds.size() != start.size()) throw SetupError("maximize: bounds/start size mismatch");

  std::vector<CoordinateMap> maps;
  maps.reserve(bounds.size());
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const Bound& b = bounds[i];
    if (std::isnan(b.lower) || std::isnan(b.upper) || !(b.lower < b.upper))
      throw SetupError("maximize: inconsistent bounds for coordinate " + std::to_string(i));
    if (!std::isfinite(start[i])) throw SetupError("maximize: non-finite start coordinate");
    start[i] = std::clamp(start[i], b.lower, b.upper);
    maps.push_back(CoordinateMap{b});
  }

  const double start_value = objective(start);
  if (!std::isfinite(start_value)) throw SetupError("maximize: objective is not finite at start");

  Simplex simplex(objective, maps, settings.max_evaluations);
  Vertex best{std::vector<double>(start.size()), 0.0};
  for (std::size_t i = 0; i < start.size(); ++i) best.t[i] = maps[i].from_box(start[i]);
  best.f = simplex.evaluate(best.t);

  MaximizeResult result;
  constexpr int kMaxRestarts = 8;
  for (int round = 0; round <= kMaxRestarts; ++round) {
    const double before = best.f;
    const bool ok = simplex.run(best, settings);
    if (!ok) break;
    if (round > 0 && best.f - before <= settings.absolute_tolerance) {
      result.converged = true;
      break;
    }
    if (round == kMaxRestarts) result.converged = true;
  }

  // The nudged start point may differ from `start` by rounding; never return
  // something worse than what the caller handed in.
  if (best.f >= start_value) {
    result.argmax = simplex.to_box(best.t);
    result.value = best.f;
  } else {
    result.argmax = start;
    result.value = start_value;
  }
  result.evaluations = simplex.evaluations() + 1;
  return result;
}

}  // namespace claytobit
