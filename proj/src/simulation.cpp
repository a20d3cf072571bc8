#include "claytobit/simulation.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "claytobit/config.hpp"
#include "claytobit/errors.hpp"

namespace claytobit {

namespace {

constexpr double kGridThetas[] = {0.25, 1.2, 2.0, 5.0, 10.0};
constexpr double kDesignBeta1[5][2] = {{2, 1}, {1.5, 1}, {1, 1}, {0.5, 1}, {0.1, 1}};
constexpr double kDesignBeta2[5][2] = {{4, -0.5}, {3, -0.5}, {2, -0.5}, {1, -0.5}, {0.25, -0.5}};

const char* kColumnLabels[] = {"T.V.", "Mean", "S.D.", "Bias", "MSE",
                               "C.P. Standard Normal (Jackknife)",
                               "C.P. Standard Normal (Bootstrap)",
                               "C.P. Percentile", "C.P. BCa", "C.P. Basic"};

std::string six_digits(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

ReplicationRecord run_replication(const Scenario& s, const Estimator& estimator,
                                  const Vector& truth, std::size_t r) {
  ReplicationRecord rec;
  const RandomSource rep(s.seed, r);
  try {
    RandomSource data_stream = rep.substream(0);
    const SimulatedData sim = generate_dataset(s, data_stream);
    rec.censoring1 = sim.data.margin1.censoring_rate();
    rec.censoring2 = sim.data.margin2.censoring_rate();

    const FitResult fit = estimator(sim.data, rep.substream(1), nullptr);
    if (!fit.converged) throw EstimationError("fit did not converge");
    const BootstrapRun boot =
        parametric_bootstrap(sim.data, fit.params, s.bootstrap, rep.substream(2), estimator);
    const JackknifeRun jack = jackknife(sim.data, fit.params, rep.substream(3), estimator);
    const Matrix cov_boot = covariance_bootstrap(boot);
    const Matrix cov_jack = covariance_jackknife(jack);

    rec.estimate = fit.params.to_vector();
    rec.bootstrap_se = cov_boot.diagonal().cwiseSqrt();
    rec.jackknife_se = cov_jack.diagonal().cwiseSqrt();
    const std::size_t p = static_cast<std::size_t>(truth.size());
    rec.covered.resize(p);
    for (std::size_t h = 0; h < p; ++h) {
      const IntervalEstimate intervals[5] = {
          ci_normal(fit.params, cov_jack, h, s.alpha, IntervalMethod::normal_jackknife),
          ci_normal(fit.params, cov_boot, h, s.alpha, IntervalMethod::normal_bootstrap),
          ci_percentile(boot, h, s.alpha),
          ci_bca(boot, jack, h, s.alpha),
          ci_basic(boot, h, s.alpha)};
      for (std::size_t m = 0; m < 5; ++m)
        rec.covered[h][m] = intervals[m].contains(truth[static_cast<Eigen::Index>(h)]);
    }
    rec.ok = true;
  } catch (const EstimationError& e) {
    rec.error = e.what();
  } catch (const DataError& e) {
    rec.error = e.what();
  } catch (const SetupError& e) {
    rec.error = e.what();
  } catch (const DomainError& e) {
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

void Scenario::validate() const {
  if (n < 5) throw ConfigError("n", "must be at least 5");
  if (!(std::isfinite(theta) && theta > 0.0)) throw ConfigError("theta", "must be positive");
  if (beta1.size() != 2 || !beta1.allFinite())
    throw ConfigError("margin1.beta", "needs two finite coefficients");
  if (beta2.size() != 2 || !beta2.allFinite())
    throw ConfigError("margin2.beta", "needs two finite coefficients");
  if (!(std::isfinite(sigma1) && sigma1 > 0.0)) throw ConfigError("margin1.sigma", "must be positive");
  if (!(std::isfinite(sigma2) && sigma2 > 0.0)) throw ConfigError("margin2.sigma", "must be positive");
  if (replications < 1) throw ConfigError("replications", "must be at least 1");
  if (bootstrap < 100) throw ConfigError("bootstrap", "must be at least 100 to compute coverage");
  if (!(alpha > 0.0 && alpha < 0.5)) throw ConfigError("alpha", "must lie in (0, 0.5)");
}

ModelParams Scenario::true_params() const {
  ModelParams p;
  p.margin1 = {beta1, sigma1};
  p.margin2 = {beta2, sigma2};
  p.copula = CopulaParam(theta);
  return p;
}

std::vector<Scenario> grid_scenarios(StudyScale scale, std::uint64_t seed) {
  std::vector<Scenario> out;
  for (double theta : kGridThetas) {
    for (int design = 0; design < 5; ++design) {
      Scenario s;
      s.theta = theta;
      s.beta1 = Eigen::Vector2d(kDesignBeta1[design][0], kDesignBeta1[design][1]);
      s.beta2 = Eigen::Vector2d(kDesignBeta2[design][0], kDesignBeta2[design][1]);
      s.sigma1 = 1.0;
      s.sigma2 = 2.0;
      s.seed = seed;
      if (scale == StudyScale::full) {
        s.n = 1000;
        s.replications = 100;
        s.bootstrap = 1000;
      } else {
        s.n = 500;
        s.replications = 20;
        s.bootstrap = 200;
      }
      std::ostringstream name;
      name << "theta" << theta << "_design" << design + 1;
      s.name = name.str();
      out.push_back(s);
    }
  }
  return out;
}

SimulatedData generate_dataset(const Scenario& s, RandomSource& rng) {
  s.validate();
  Matrix x1(s.n, 2), x2(s.n, 2);
  for (int i = 0; i < s.n; ++i) {
    x1(i, 0) = 1.0;
    x1(i, 1) = rng.normal();
    x2(i, 0) = 1.0;
    x2(i, 1) = 1.0 + 2.0 * rng.normal();
  }
  SimulatedData sim = simulate_responses(x1, x2, s.true_params(), rng);
  sim.data.margin1.covariate_names = {"intercept", "x"};
  sim.data.margin2.covariate_names = {"intercept", "x"};
  return sim;
}

SimulationReport run_study(const Scenario& s, const Estimator& estimator, unsigned workers) {
  s.validate();
  const auto started = std::chrono::steady_clock::now();
  const ModelParams truth_params = s.true_params();
  const Vector truth = truth_params.to_vector();
  const std::size_t p = static_cast<std::size_t>(truth.size());

  SimulationReport report;
  report.scenario = s;
  report.replications.resize(static_cast<std::size_t>(s.replications));
  parallel_for(report.replications.size(), workers, [&](std::size_t r) {
    report.replications[r] = run_replication(s, estimator, truth, r);
  });

  std::vector<const ReplicationRecord*> good;
  for (const auto& rec : report.replications) {
    report.censoring1 += rec.censoring1 / s.replications;
    report.censoring2 += rec.censoring2 / s.replications;
    if (rec.ok) good.push_back(&rec);
  }
  report.used = static_cast<int>(good.size());
  report.failed = s.replications - report.used;
  if (report.failed * 10 > s.replications || good.empty())
    throw EstimationError("more than 10% of replications failed in " + s.name);

  const auto names = parameter_names(2, 2);
  const double m = static_cast<double>(good.size());
  for (std::size_t h = 0; h < p; ++h) {
    const auto hh = static_cast<Eigen::Index>(h);
    ParameterRow row;
    row.name = names[h];
    row.true_value = truth[hh];
    for (const auto* rec : good) row.mean += rec->estimate[hh] / m;
    double ss = 0.0, sq_err = 0.0;
    for (const auto* rec : good) {
      ss += (rec->estimate[hh] - row.mean) * (rec->estimate[hh] - row.mean);
      sq_err += (rec->estimate[hh] - row.true_value) * (rec->estimate[hh] - row.true_value);
    }
    row.sd = good.size() > 1 ? std::sqrt(ss / (m - 1.0)) : 0.0;
    row.bias = row.mean - row.true_value;
    row.mse = sq_err / m;
    for (std::size_t k = 0; k < 5; ++k) {
      double hits = 0.0;
      for (const auto* rec : good) hits += rec->covered[h][k];
      row.coverage[k] = hits / m;
    }
    report.rows.push_back(row);
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

std::string emit_table(const SimulationReport& r, TableFormat format) {
  const char sep = format == TableFormat::tsv ? '\t' : ',';
  std::ostringstream out;
  out << "parameter";
  for (const char* label : kColumnLabels) out << sep << label;
  out << '\n';
  for (const auto& row : r.rows) {
    out << row.name << sep << six_digits(row.true_value) << sep << six_digits(row.mean)
        << sep << six_digits(row.sd) << sep << six_digits(row.bias) << sep
        << six_digits(row.mse);
    for (double c : row.coverage) out << sep << six_digits(c);
    out << '\n';
  }
  return out.str();
}

std::vector<ParameterRow> parse_table(const std::string& text, TableFormat format) {
  const char sep = format == TableFormat::tsv ? '\t' : ',';
  std::istringstream in(text);
  std::string line;
  std::vector<ParameterRow> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    const auto fields = split(line, sep);
    if (fields.size() != 11) throw ParseError(line_no, "expected 11 columns");
    ParameterRow row;
    row.name = fields[0];
    try {
      row.true_value = std::stod(fields[1]);
      row.mean = std::stod(fields[2]);
      row.sd = std::stod(fields[3]);
      row.bias = std::stod(fields[4]);
      row.mse = std::stod(fields[5]);
      for (std::size_t k = 0; k < 5; ++k) row.coverage[k] = std::stod(fields[6 + k]);
    } catch (const std::logic_error&) {
      throw ParseError(line_no, "non-numeric field");
    }
    rows.push_back(row);
  }
  return rows;
}

std::string emit_metadata(const SimulationReport& r) {
  std::ostringstream out;
  out << format_scenario(r.scenario);
  out << "realized.censoring1 = " << format_number(r.censoring1) << '\n';
  out << "realized.censoring2 = " << format_number(r.censoring2) << '\n';
  out << "replications.used = " << r.used << '\n';
  out << "replications.failed = " << r.failed << '\n';
  out << "runtime.seconds = " << format_number(r.wall_seconds) << '\n';
  return out.str();
}

}  // namespace claytobit
