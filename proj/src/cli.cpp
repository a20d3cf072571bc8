#include "claytobit/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "claytobit/config.hpp"
#include "claytobit/dataset_io.hpp"
#include "claytobit/errors.hpp"
#include "claytobit/report.hpp"

namespace claytobit {

namespace {

constexpr const char* kSeedVariable = "CLAYTOBIT_SEED";
constexpr std::uint64_t kDefaultSeed = 20130601;

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
  if (flag) return *flag;
  const char* env = std::getenv(kSeedVariable);
  if (env == nullptr || *env == '\0') return fallback;
  std::uint64_t seed = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto [ptr, ec] = std::from_chars(env, end, seed);
  if (ec != std::errc() || ptr != end)
    throw ConfigError(kSeedVariable, "'" + std::string(env) + "' is not a nonnegative integer");
  return seed;
}

EstimatorConfig estimator_config(const std::string& name, int passes) {
  EstimatorConfig c;
  c.kind = name == "ifm" ? EstimatorKind::ifm : EstimatorKind::mifm;
  c.mifm.max_passes = passes;
  c.mifm.validate();
  return c;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("output", "cannot write " + path.string());
  f << content;
  if (!f) throw ConfigError("output", "write failed for " + path.string());
}

struct FitOptions {
  std::string dataset;
  std::string estimator = "mifm";
  int bootstrap = 1000;
  double alpha = 0.05;
  std::optional<std::uint64_t> seed;
  int passes = 1;
  std::string format = "text";
  unsigned workers = 1;
  std::string output;
};

int cmd_fit(const FitOptions& o, std::ostream& out, std::ostream& err) {
  if (o.alpha <= 0.0 || o.alpha >= 0.5) throw ConfigError("alpha", "must lie in (0, 0.5)");
  if (o.bootstrap < 2) throw ConfigError("bootstrap", "needs at least 2 replicates");
  const Dataset d = read_dataset_csv_file(o.dataset);
  const Estimator estimator = make_estimator(estimator_config(o.estimator, o.passes));
  const RandomSource rng(resolve_seed(o.seed, kDefaultSeed), 0);

  const FitResult fit = estimator(d, rng.substream(1), nullptr);
  if (!fit.converged) err << "warning: optimizer did not report convergence\n";
  const BootstrapRun boot =
      parametric_bootstrap(d, fit.params, o.bootstrap, rng.substream(2), estimator, o.workers);
  const JackknifeRun jack = jackknife(d, fit.params, rng.substream(3), estimator, o.workers);
  const FitReport report = build_fit_report(d, fit, boot, jack, o.alpha, o.estimator);

  const ReportFormat format = o.format == "tsv"   ? ReportFormat::tsv
                              : o.format == "csv" ? ReportFormat::csv
                                                  : ReportFormat::text;
  const std::string text = render_fit_report(report, format);
  if (o.output.empty())
    out << text;
  else
    write_file(o.output, text);
  return kExitOk;
}

struct SimulateOptions {
  std::string scenario;
  bool full_grid = false;
  std::string scale = "desk";
  unsigned workers = 1;
  std::optional<std::uint64_t> seed;
  std::string output_dir = ".";
  std::string estimator = "mifm";
  int passes = 1;
  std::string format = "tsv";
  std::optional<int> replications;
  std::optional<int> bootstrap;
  std::optional<int> n;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  std::vector<Scenario> scenarios;
  if (o.full_grid) {
    scenarios = grid_scenarios(o.scale == "full" ? StudyScale::full : StudyScale::desk,
                                resolve_seed(o.seed, kDefaultSeed));
  } else {
    if (o.scenario.empty()) throw ConfigError("scenario", "give a scenario file or --full-grid");
    Scenario s = load_scenario(o.scenario);
    s.seed = resolve_seed(o.seed, s.seed);
    scenarios.push_back(std::move(s));
  }
  for (Scenario& s : scenarios) {
    if (o.replications) s.replications = *o.replications;
    if (o.bootstrap) s.bootstrap = *o.bootstrap;
    if (o.n) s.n = *o.n;
    s.validate();
  }

  const Estimator estimator = make_estimator(estimator_config(o.estimator, o.passes));
  const TableFormat format = o.format == "csv" ? TableFormat::csv : TableFormat::tsv;
  const std::filesystem::path dir(o.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("output-dir", "cannot create " + dir.string());

  for (const Scenario& s : scenarios) {
    const SimulationReport report = run_study(s, estimator, o.workers);
    const auto table = dir / (s.name + (format == TableFormat::csv ? ".csv" : ".tsv"));
    write_file(table, emit_table(report, format));
    write_file(dir / (s.name + ".meta"), emit_metadata(report));
    out << s.name << ": " << report.used << " of " << s.replications << " replications, "
        << std::fixed << std::setprecision(1) << report.wall_seconds << " s -> " << table.string()
        << '\n';
  }
  return kExitOk;
}

struct GenerateOptions {
  std::string scenario;
  std::string preset;
  std::optional<int> n;
  std::optional<std::uint64_t> seed;
  std::string output;
};

int cmd_generate(const GenerateOptions& o, std::ostream& out, std::ostream& err) {
  SimulatedData sim;
  if (!o.preset.empty()) {
    if (o.preset != "csfii") throw ConfigError("preset", "unknown preset '" + o.preset + "'");
    const int n = o.n.value_or(500);
    if (n <= 0) throw ConfigError("n", "must be positive");
    RandomSource rng(resolve_seed(o.seed, kDefaultSeed), 0);
    sim = generate_consumption_fixture(n, rng);
  } else {
    if (o.scenario.empty()) throw ConfigError("scenario", "give a scenario file or --preset");
    Scenario s = load_scenario(o.scenario);
    if (o.n) {
      if (*o.n <= 0) throw ConfigError("n", "must be positive");
      s.n = *o.n;
    }
    s.seed = resolve_seed(o.seed, s.seed);
    s.validate();
    RandomSource rng(s.seed, 0);
    sim = generate_dataset(s, rng);
  }

  std::ostringstream csv;
  write_dataset_csv(sim.data, csv);
  std::ostream& info = o.output.empty() ? err : out;
  if (o.output.empty())
    out << csv.str();
  else
    write_file(o.output, csv.str());
  info << "censoring rate margin 1 " << std::fixed << std::setprecision(4)
       << sim.data.margin1.censoring_rate() << ", margin 2 " << sim.data.margin2.censoring_rate()
       << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bivariate Clayton copula SUR Tobit estimation", "claytobit"};
  app.require_subcommand(1);
  const auto estimators = CLI::IsMember({"ifm", "mifm"});

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a dataset and report five interval types");
  fit_cmd->add_option("dataset", fit.dataset, "CSV dataset")->required();
  fit_cmd->add_option("--estimator", fit.estimator)->check(estimators);
  fit_cmd->add_option("--bootstrap,-B", fit.bootstrap, "Parametric bootstrap replicates");
  fit_cmd->add_option("--alpha", fit.alpha, "Tail probability per side");
  fit_cmd->add_option("--seed", fit.seed);
  fit_cmd->add_option("--mifm-passes", fit.passes);
  fit_cmd->add_option("--format", fit.format)->check(CLI::IsMember({"text", "tsv", "csv"}));
  fit_cmd->add_option("--workers", fit.workers)->check(CLI::PositiveNumber);
  fit_cmd->add_option("--output,-o", fit.output);

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a Monte Carlo study");
  sim_cmd->add_option("scenario", sim.scenario, "Scenario file");
  sim_cmd->add_flag("--full-grid", sim.full_grid, "All 25 grid scenarios");
  sim_cmd->add_option("--scale", sim.scale)->check(CLI::IsMember({"desk", "full"}));
  sim_cmd->add_option("--workers", sim.workers)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim.seed);
  sim_cmd->add_option("--output-dir", sim.output_dir);
  sim_cmd->add_option("--estimator", sim.estimator)->check(estimators);
  sim_cmd->add_option("--mifm-passes", sim.passes);
  sim_cmd->add_option("--format", sim.format)->check(CLI::IsMember({"tsv", "csv"}));
  sim_cmd->add_option("--replications", sim.replications);
  sim_cmd->add_option("--bootstrap", sim.bootstrap);
  sim_cmd->add_option("--n", sim.n);

  GenerateOptions gen;
  auto* gen_cmd = app.add_subcommand("generate", "Draw a dataset from a scenario");
  gen_cmd->add_option("scenario", gen.scenario, "Scenario file");
  gen_cmd->add_option("--preset", gen.preset, "Built-in fixture (csfii)");
  gen_cmd->add_option("--n", gen.n);
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--output,-o", gen.output);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit, out, err);
    if (*sim_cmd) return cmd_simulate(sim, out);
    return cmd_generate(gen, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const DomainError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const EstimationError& e) {
    err << "estimation failure: " << e.what() << '\n';
    return kExitEstimation;
  } catch (const SetupError& e) {
    err << "estimation failure: " << e.what() << '\n';
    return kExitEstimation;
  }
}

}  // namespace claytobit
