#include "claytobit/report.hpp"

#include <cstdio>
#include <iomanip>
#include <map>
#include <sstream>

#include "claytobit/errors.hpp"

namespace claytobit {

namespace {

const char* kMethodTitles[] = {"Standard Normal (Jackknife)", "Standard Normal (Bootstrap)",
                               "Percentile", "BCa", "Basic"};

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string precise(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

}  // namespace

FitReport build_fit_report(const Dataset& d, const FitResult& fit, const BootstrapRun& boot,
                           const JackknifeRun& jack, double alpha, std::string estimator) {
  FitReport r;
  r.estimator = std::move(estimator);
  r.alpha = alpha;
  r.log_likelihood = fit.log_likelihood;
  const DependenceSummary dep = summarize_dependence(fit.params);
  r.tau = dep.tau;
  r.chi = dep.chi;
  r.censoring1 = d.margin1.censoring_rate();
  r.censoring2 = d.margin2.censoring_rate();
  r.theta_ifm = fit.theta_ifm;
  r.mifm_iterations = fit.mifm_iterations;
  r.bootstrap_requested = boot.requested;
  r.bootstrap_failures = boot.failures;
  r.jackknife_failures = static_cast<int>(jack.failures());

  const Matrix cov_boot = covariance_bootstrap(boot);
  const Matrix cov_jack = covariance_jackknife(jack);
  const Vector estimate = fit.params.to_vector();
  const auto names = parameter_names(d);
  const std::size_t k1 = d.margin1.columns();
  for (std::size_t h = 0; h < names.size(); ++h) {
    FitReportRow row;
    row.block = h <= k1 ? "margin1" : (h + 1 < names.size() ? "margin2" : "copula");
    const auto colon = names[h].find(':');
    row.name = colon == std::string::npos ? names[h] : names[h].substr(colon + 1);
    row.estimate = estimate[static_cast<Eigen::Index>(h)];
    row.intervals = {ci_normal(fit.params, cov_jack, h, alpha, IntervalMethod::normal_jackknife),
                     ci_normal(fit.params, cov_boot, h, alpha, IntervalMethod::normal_bootstrap),
                     ci_percentile(boot, h, alpha), ci_bca(boot, jack, h, alpha),
                     ci_basic(boot, h, alpha)};
    r.rows.push_back(row);
  }
  return r;
}

std::string render_fit_report(const FitReport& r, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::text) {
    const int level = static_cast<int>(std::lround(100.0 * (1.0 - 2.0 * r.alpha)));
    out << "Clayton copula SUR Tobit fit (" << r.estimator << "), " << level
        << "% confidence intervals\n";
    std::string block;
    for (const auto& row : r.rows) {
      if (row.block != block) {
        block = row.block;
        out << '\n'
            << pad(block == "margin1" ? "Margin 1" : block == "margin2" ? "Margin 2" : "Copula", 14)
            << pad("Estimate", 10);
        for (const char* t : kMethodTitles) out << pad(t, 29);
        out << '\n';
      }
      out << pad(row.name, 14) << pad(fixed4(row.estimate), 10);
      for (const auto& ci : row.intervals)
        out << pad("[" + fixed4(ci.lower) + "; " + fixed4(ci.upper) + "]" + (ci.valid ? "" : "*"), 29);
      out << '\n';
    }
    out << "\nLoglik " << std::fixed << std::setprecision(3) << r.log_likelihood << '\n'
        << "Kendall's tau " << fixed4(r.tau) << "  lower tail dependence " << fixed4(r.chi) << '\n'
        << "Censoring rate margin 1 " << fixed4(r.censoring1) << "  margin 2 "
        << fixed4(r.censoring2) << '\n'
        << "IFM theta " << fixed4(r.theta_ifm) << "  MIFM passes " << r.mifm_iterations << '\n'
        << "Bootstrap replicates " << r.bootstrap_requested - r.bootstrap_failures << " of "
        << r.bootstrap_requested << "  jackknife failures " << r.jackknife_failures << '\n'
        << "(* interval extends outside the parameter domain)\n";
    return out.str();
  }

  const char sep = format == ReportFormat::tsv ? '\t' : ',';
  out << "block" << sep << "parameter" << sep << "estimate";
  for (IntervalMethod m : kIntervalMethods)
    out << sep << to_string(m) << "_lower" << sep << to_string(m) << "_upper";
  out << '\n';
  for (const auto& row : r.rows) {
    out << row.block << sep << row.name << sep << precise(row.estimate);
    for (const auto& ci : row.intervals) out << sep << precise(ci.lower) << sep << precise(ci.upper);
    out << '\n';
  }
  const std::pair<const char*, double> summary[] = {
      {"alpha", r.alpha},
      {"loglik", r.log_likelihood},
      {"tau", r.tau},
      {"chi", r.chi},
      {"censoring1", r.censoring1},
      {"censoring2", r.censoring2},
      {"theta_ifm", r.theta_ifm},
      {"mifm_iterations", r.mifm_iterations},
      {"bootstrap_requested", r.bootstrap_requested},
      {"bootstrap_failures", r.bootstrap_failures},
      {"jackknife_failures", r.jackknife_failures}};
  for (const auto& [key, value] : summary) {
    out << "summary" << sep << key << sep << precise(value);
    for (int j = 0; j < 10; ++j) out << sep;
    out << '\n';
  }
  out << "summary" << sep << "estimator" << sep << r.estimator;
  for (int j = 0; j < 10; ++j) out << sep;
  out << '\n';
  return out.str();
}

FitReport parse_fit_report(const std::string& text, ReportFormat format) {
  if (format == ReportFormat::text) throw ConfigError("format", "text reports are not parseable");
  const char sep = format == ReportFormat::tsv ? '\t' : ',';
  FitReport r;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, double> summary;
  const auto number = [&](const std::string& s) {
    try {
      return std::stod(s);
    } catch (const std::logic_error&) {
      throw ParseError(line_no, "'" + s + "' is not a number");
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    const auto f = split(line, sep);
    if (f.size() != 13) throw ParseError(line_no, "expected 13 columns");
    if (f[0] == "summary") {
      if (f[1] == "estimator")
        r.estimator = f[2];
      else
        summary[f[1]] = number(f[2]);
      continue;
    }
    FitReportRow row;
    row.block = f[0];
    row.name = f[1];
    row.estimate = number(f[2]);
    for (std::size_t m = 0; m < 5; ++m) {
      row.intervals[m].method = kIntervalMethods[m];
      row.intervals[m].lower = number(f[3 + 2 * m]);
      row.intervals[m].upper = number(f[4 + 2 * m]);
    }
    r.rows.push_back(row);
  }
  r.alpha = summary["alpha"];
  r.log_likelihood = summary["loglik"];
  r.tau = summary["tau"];
  r.chi = summary["chi"];
  r.censoring1 = summary["censoring1"];
  r.censoring2 = summary["censoring2"];
  r.theta_ifm = summary["theta_ifm"];
  r.mifm_iterations = static_cast<int>(summary["mifm_iterations"]);
  r.bootstrap_requested = static_cast<int>(summary["bootstrap_requested"]);
  r.bootstrap_failures = static_cast<int>(summary["bootstrap_failures"]);
  r.jackknife_failures = static_cast<int>(summary["jackknife_failures"]);
  for (auto& row : r.rows)
    for (auto& ci : row.intervals) ci.level = 1.0 - 2.0 * r.alpha;
  return r;
}

}  // namespace claytobit
