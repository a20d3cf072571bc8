#pragma once

#include <array>
#include <string>
#include <vector>

#include "claytobit/resampling.hpp"

namespace claytobit {

struct FitReportRow {
  std::string block;  ///< "margin1", "margin2" or "copula"
  std::string name;
  double estimate = 0.0;
  std::array<IntervalEstimate, 5> intervals;  ///< in kIntervalMethods order
};

/// Point estimates with all five intervals, laid out margin 1, margin 2, theta.
struct FitReport {
  std::string estimator;
  double alpha = 0.05;
  std::vector<FitReportRow> rows;
  double log_likelihood = 0.0;
  double tau = 0.0;
  double chi = 0.0;
  double censoring1 = 0.0;
  double censoring2 = 0.0;
  double theta_ifm = 0.0;
  int mifm_iterations = 0;
  int bootstrap_requested = 0;
  int bootstrap_failures = 0;
  int jackknife_failures = 0;
};

FitReport build_fit_report(const Dataset& d, const FitResult& fit, const BootstrapRun& boot,
                           const JackknifeRun& jack, double alpha, std::string estimator);

enum class ReportFormat { text, tsv, csv };

/// `text` is the human layout with 4 decimals; tsv/csv are machine-readable
/// with 10 significant digits and parse back through parse_fit_report.
std::string render_fit_report(const FitReport& r, ReportFormat format);
FitReport parse_fit_report(const std::string& text, ReportFormat format = ReportFormat::tsv);

}  // namespace claytobit
