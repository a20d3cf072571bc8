#pragma once

#include <string>

#include "claytobit/simulation.hpp"

namespace claytobit {

/// Flat key=value scenario file with dotted keys, '#' comments:
///
///   name = theta2_design1
///   design = 1            # optional: censoring design 1..5
///   theta = 2
///   margin1.beta = 2, 1
///   margin1.sigma = 1
///   n = 500
///
/// Missing keys keep Scenario defaults; `design` is applied before explicit
/// beta keys. Throws ConfigError naming the key.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string format_scenario(const Scenario& s);

/// Shortest decimal text that reads back to exactly `v`.
std::string format_number(double v);

}  // namespace claytobit
