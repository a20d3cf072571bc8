#include <doctest.h>

#include <cmath>

#include "claytobit/config.hpp"
#include "claytobit/errors.hpp"
#include "claytobit/simulation.hpp"

using namespace claytobit;

namespace {

Scenario tiny(double theta = 2.0) {
  Scenario s;
  s.name = "tiny";
  s.n = 120;
  s.theta = theta;
  s.beta1 = Vector(2);
  s.beta1 << 2.0, 1.0;
  s.beta2 = Vector(2);
  s.beta2 << 4.0, -0.5;
  s.replications = 3;
  s.bootstrap = 100;
  s.seed = 17;
  return s;
}

}  // namespace

TEST_CASE("the study grid has 25 theta-major scenarios") {
  const auto grid = grid_scenarios(StudyScale::desk);
  REQUIRE(grid.size() == 25);
  CHECK(grid[0].theta == 0.25);
  CHECK(grid[4].theta == 0.25);
  CHECK(grid[5].theta == 1.2);
  CHECK(grid[24].theta == 10.0);
  CHECK(grid[10].name == "theta2_design1");
  CHECK(grid[10].beta1[0] == 2.0);
  CHECK(grid[14].beta1[0] == 0.1);
  CHECK(grid[14].beta2[0] == 0.25);
  for (const auto& s : grid) {
    CHECK(s.n == 500);
    CHECK(s.replications == 20);
    CHECK(s.bootstrap == 200);
    CHECK(s.beta1[1] == 1.0);
    CHECK(s.beta2[1] == -0.5);
    CHECK(s.sigma1 == 1.0);
    CHECK(s.sigma2 == 2.0);
    CHECK_NOTHROW(s.validate());
  }
  const auto full = grid_scenarios(StudyScale::full);
  CHECK(full[0].n == 1000);
  CHECK(full[0].replications == 100);
  CHECK(full[0].bootstrap == 1000);
}

TEST_CASE("scenario validation names the field") {
  const auto field_of = [](Scenario s) {
    try {
      s.validate();
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string();
  };
  Scenario s = tiny();
  s.theta = -1.0;
  CHECK(field_of(s) == "theta");
  s = tiny();
  s.n = 0;
  CHECK(field_of(s) == "n");
  s = tiny();
  s.sigma2 = 0.0;
  CHECK(field_of(s) == "margin2.sigma");
  s = tiny();
  s.bootstrap = 10;
  CHECK(field_of(s) == "bootstrap");
  s = tiny();
  s.beta1 = Vector::Ones(3);
  CHECK(field_of(s) == "margin1.beta");
  CHECK(field_of(tiny()).empty());
}

TEST_CASE("generated datasets have the design censoring rates") {
  // design 1: latent means 2 + x and 4 - x2/2 with x2 ~ N(1, 4)
  Scenario s = tiny();
  s.n = 20000;
  RandomSource rng(1, 0);
  const SimulatedData d = generate_dataset(s, rng);
  CHECK(d.data.margin1.censoring_rate() == doctest::Approx(normal_cdf(-2.0 / std::sqrt(2.0))).epsilon(0.08));
  CHECK(d.data.margin2.censoring_rate() == doctest::Approx(normal_cdf(-3.5 / std::sqrt(5.0))).epsilon(0.08));
  CHECK(d.data.margin1.covariates.col(1).mean() == doctest::Approx(0.0).epsilon(0.03));
  const double sd2 = std::sqrt((d.data.margin2.covariates.col(1).array() - 1.0).square().mean());
  CHECK(sd2 == doctest::Approx(2.0).epsilon(0.03));
  CHECK(d.data.margin1.covariate_names == std::vector<std::string>{"intercept", "x"});

  Scenario heavy = grid_scenarios(StudyScale::desk)[4];
  heavy.n = 20000;
  RandomSource rng2(2, 0);
  const SimulatedData h = generate_dataset(heavy, rng2);
  CHECK(h.data.margin1.censoring_rate() == doctest::Approx(0.47).epsilon(0.08));
  CHECK(h.data.margin2.censoring_rate() == doctest::Approx(0.54).epsilon(0.08));
}

TEST_CASE("run_study aggregates and does not depend on the worker count") {
  const Scenario s = tiny();
  const Estimator est = make_estimator({});
  const SimulationReport one = run_study(s, est, 1);
  const SimulationReport two = run_study(s, est, 2);
  CHECK(emit_table(one) == emit_table(two));
  REQUIRE(one.rows.size() == 7);
  CHECK(one.used == 3);
  CHECK(one.failed == 0);
  CHECK(one.rows[6].name == "theta");
  CHECK(one.rows[6].true_value == 2.0);

  double mean = 0.0;
  for (const auto& r : one.replications) mean += r.estimate[6];
  mean /= 3.0;
  CHECK(one.rows[6].mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(one.rows[6].bias == doctest::Approx(mean - 2.0).epsilon(1e-12));
  double ss = 0.0, mse = 0.0;
  for (const auto& r : one.replications) {
    ss += std::pow(r.estimate[6] - mean, 2);
    mse += std::pow(r.estimate[6] - 2.0, 2);
  }
  CHECK(one.rows[6].sd == doctest::Approx(std::sqrt(ss / 2.0)).epsilon(1e-12));
  CHECK(one.rows[6].mse == doctest::Approx(mse / 3.0).epsilon(1e-12));
  for (double c : one.rows[6].coverage) {
    const double scaled = c * 3.0;
    CHECK(scaled == doctest::Approx(std::round(scaled)));
  }
  for (const auto& r : one.replications) {
    CHECK(r.ok);
    CHECK(r.bootstrap_se.size() == 7);
    CHECK(r.jackknife_se[6] > 0.0);
  }
}

TEST_CASE("tables round trip at six significant digits") {
  SimulationReport r;
  r.scenario = tiny();
  ParameterRow row;
  row.name = "theta";
  row.true_value = 2.0;
  row.mean = 1.98591234;
  row.sd = 0.130812;
  row.bias = -0.0140877;
  row.mse = 0.0173;
  row.coverage = {1.0, 0.95, 0.9, 0.85, 0.89};
  r.rows.push_back(row);
  for (TableFormat f : {TableFormat::tsv, TableFormat::csv}) {
    const std::string text = emit_table(r, f);
    CHECK(text.rfind("parameter", 0) == 0);
    CHECK(text.find("C.P. Standard Normal (Jackknife)") != std::string::npos);
    const auto back = parse_table(text, f);
    REQUIRE(back.size() == 1);
    CHECK(back[0].name == "theta");
    CHECK(back[0].mean == doctest::Approx(1.98591).epsilon(1e-9));
    CHECK(back[0].coverage[4] == 0.89);
  }
  CHECK_THROWS_AS(parse_table("header\nrow\t1\t2\n"), ParseError);
  CHECK_THROWS_AS(parse_table("h\ntheta\t2\tx\t1\t1\t1\t1\t1\t1\t1\t1\n"), ParseError);
}

TEST_CASE("metadata sidecar echoes the scenario") {
  SimulationReport r;
  r.scenario = tiny();
  r.used = 3;
  r.censoring1 = 0.0825;
  const std::string meta = emit_metadata(r);
  CHECK(meta.find("seed = 17\n") != std::string::npos);
  CHECK(meta.find("realized.censoring1 = 0.0825\n") != std::string::npos);
  CHECK(meta.find("replications.used = 3\n") != std::string::npos);
  CHECK(meta.find("runtime.seconds = ") != std::string::npos);
}

TEST_CASE("scenario files") {
  const Scenario s = parse_scenario(
      "# comment\n"
      "name = check\n"
      "design = 5\n"
      "theta = 0.25   # weak dependence\n"
      "margin2.sigma = 3\n"
      "n = 200\n"
      "seed = 99\n");
  CHECK(s.name == "check");
  CHECK(s.beta1[0] == 0.1);
  CHECK(s.beta2[0] == 0.25);
  CHECK(s.sigma2 == 3.0);
  CHECK(s.n == 200);
  CHECK(s.seed == 99);

  const Scenario explicit_beta = parse_scenario("margin1.beta = 0.7, 1\ndesign = 2\n");
  CHECK(explicit_beta.beta1[0] == 0.7);
  CHECK(explicit_beta.beta2[0] == 3.0);

  const Scenario again = parse_scenario(format_scenario(s));
  CHECK(format_scenario(again) == format_scenario(s));

  const auto field_of = [](const std::string& text) {
    try {
      parse_scenario(text);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string();
  };
  CHECK(field_of("colour = red\n") == "colour");
  CHECK(field_of("theta = abc\n") == "theta");
  CHECK(field_of("theta = -2\n") == "theta");
  CHECK(field_of("design = 9\n") == "design");
  CHECK(field_of("n = 0\n") == "n");
  CHECK(field_of("seed = -1\n") == "seed");
  CHECK(field_of("margin1.beta = 1\n") == "margin1.beta");
  CHECK_THROWS_AS(load_scenario("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("format_number is the shortest round trip") {
  CHECK(format_number(0.05) == "0.05");
  CHECK(format_number(2.0) == "2");
  CHECK(std::stod(format_number(0.1 + 0.2)) == 0.1 + 0.2);
}
