#pragma once

#include <iosfwd>
#include <string>

#include "claytobit/estimation.hpp"

namespace claytobit {

/// CSV with header `y1,y2,x1_<name>...,x2_<name>...`, one row per
/// observation. An intercept column is prepended to a margin unless the file
/// has `x1_intercept` / `x2_intercept`. Malformed text is a ParseError (with
/// line number); invariant violations such as negative responses or
/// rank-deficient covariates are DataErrors.
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv_file(const std::string& path);

/// Writes every covariate column, intercepts included, at full precision.
void write_dataset_csv(const Dataset& d, std::ostream& out);

/// Synthetic stand-in for the cereal/milk consumption survey: 500 adults, a
/// male indicator and four age-band indicators (age > 60 is the reference)
/// in both margins, drawn at consumption_fixture_params().
SimulatedData generate_consumption_fixture(int n, RandomSource& rng);
ModelParams consumption_fixture_params();

}  // namespace claytobit
