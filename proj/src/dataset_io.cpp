#include "claytobit/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "claytobit/errors.hpp"

namespace claytobit {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

struct Columns {
  std::size_t y1 = SIZE_MAX;
  std::size_t y2 = SIZE_MAX;
  std::vector<std::size_t> x1, x2;
  std::vector<std::string> names1, names2;
};

Columns parse_header(const std::string& line) {
  Columns c;
  const auto fields = split_csv(line);
  for (std::size_t j = 0; j < fields.size(); ++j) {
    const std::string& f = fields[j];
    if (f == "y1") c.y1 = j;
    else if (f == "y2") c.y2 = j;
    else if (f.rfind("x1_", 0) == 0 && f.size() > 3) {
      c.x1.push_back(j);
      c.names1.push_back(f.substr(3));
    } else if (f.rfind("x2_", 0) == 0 && f.size() > 3) {
      c.x2.push_back(j);
      c.names2.push_back(f.substr(3));
    } else {
      throw ParseError(1, "unexpected column '" + f + "'");
    }
  }
  if (c.y1 == SIZE_MAX || c.y2 == SIZE_MAX) throw ParseError(1, "header needs y1 and y2 columns");
  if (c.x1.empty() || c.x2.empty())
    throw ParseError(1, "header needs at least one x1_ and one x2_ column");
  return c;
}

MarginData build_margin(const std::vector<double>& y, const std::vector<std::vector<double>>& x,
                        std::vector<std::string> names) {
  const bool has_intercept =
      std::find(names.begin(), names.end(), "intercept") != names.end();
  const auto n = static_cast<Eigen::Index>(y.size());
  const auto k = static_cast<Eigen::Index>(x.size()) + (has_intercept ? 0 : 1);
  Matrix cov(n, k);
  Eigen::Index col = 0;
  if (!has_intercept) {
    cov.col(col++).setOnes();
    names.insert(names.begin(), "intercept");
  }
  for (const auto& column : x) cov.col(col++) = Eigen::Map<const Vector>(column.data(), n);
  return MarginData::from_responses(Eigen::Map<const Vector>(y.data(), n), std::move(cov),
                                    std::move(names));
}

}  // namespace

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty dataset file");
  const Columns c = parse_header(line);
  const std::size_t width = split_csv(line).size();

  std::vector<double> y1, y2;
  std::vector<std::vector<double>> x1(c.x1.size()), x2(c.x2.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != width)
      throw ParseError(line_no, "expected " + std::to_string(width) + " fields, found " +
                                    std::to_string(fields.size()));
    std::vector<double> values(width);
    for (std::size_t j = 0; j < width; ++j) {
      const std::string& f = fields[j];
      if (f.empty()) throw ParseError(line_no, "missing value in column " + std::to_string(j + 1));
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), values[j]);
      if (ec != std::errc() || ptr != f.data() + f.size())
        throw ParseError(line_no, "'" + f + "' is not a number");
    }
    y1.push_back(values[c.y1]);
    y2.push_back(values[c.y2]);
    for (std::size_t j = 0; j < c.x1.size(); ++j) x1[j].push_back(values[c.x1[j]]);
    for (std::size_t j = 0; j < c.x2.size(); ++j) x2[j].push_back(values[c.x2[j]]);
  }
  if (y1.empty()) throw ParseError(line_no, "dataset has no observations");
  for (std::size_t i = 0; i < y1.size(); ++i)
    if (y1[i] < 0.0 || y2[i] < 0.0)
      throw DataError("negative response on data row " + std::to_string(i + 1));

  Dataset d{build_margin(y1, x1, c.names1), build_margin(y2, x2, c.names2)};
  d.validate();
  return d;
}

Dataset read_dataset_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("dataset", "cannot open " + path);
  return read_dataset_csv(in);
}

void write_dataset_csv(const Dataset& d, std::ostream& out) {
  const auto names = [](const MarginData& m) {
    if (!m.covariate_names.empty()) return m.covariate_names;
    std::vector<std::string> generated;
    for (std::size_t j = 0; j < m.columns(); ++j) generated.push_back("c" + std::to_string(j));
    return generated;
  };
  const auto n1 = names(d.margin1);
  const auto n2 = names(d.margin2);
  out << "y1,y2";
  for (const auto& n : n1) out << ",x1_" << n;
  for (const auto& n : n2) out << ",x2_" << n;
  out << '\n';
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(d.size()); ++i) {
    out << d.margin1.responses[i] << ',' << d.margin2.responses[i];
    for (Eigen::Index j = 0; j < d.margin1.covariates.cols(); ++j) out << ',' << d.margin1.covariates(i, j);
    for (Eigen::Index j = 0; j < d.margin2.covariates.cols(); ++j) out << ',' << d.margin2.covariates(i, j);
    out << '\n';
  }
}

ModelParams consumption_fixture_params() {
  // Near the published fit for cereal (margin 1) and milk (margin 2).
  ModelParams p;
  p.margin1.beta.resize(6);
  p.margin1.beta << 0.3124, 0.1024, 0.1387, 0.0770, 0.0755, 0.0320;
  p.margin1.sigma = 0.3398;
  p.margin2.beta.resize(6);
  p.margin2.beta << 1.8777, 0.7544, 0.7794, 0.2813, 0.2721, -0.3758;
  p.margin2.sigma = 2.5518;
  p.copula = CopulaParam(1.3284);
  return p;
}

SimulatedData generate_consumption_fixture(int n, RandomSource& rng) {
  if (n < 8) throw ConfigError("n", "fixture needs at least 8 rows");
  constexpr double kAgeShares[4] = {0.114, 0.146, 0.164, 0.166};
  Matrix x = Matrix::Zero(n, 6);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = rng.uniform() < 0.632 ? 1.0 : 0.0;
    double u = rng.uniform();
    for (int band = 0; band < 4; ++band) {
      if (u < kAgeShares[band]) {
        x(i, 2 + band) = 1.0;
        break;
      }
      u -= kAgeShares[band];
    }
  }
  SimulatedData sim = simulate_responses(x, x, consumption_fixture_params(), rng);
  const std::vector<std::string> names = {"intercept", "male", "age20_30",
                                          "age31_40", "age41_50", "age51_60"};
  sim.data.margin1.covariate_names = names;
  sim.data.margin2.covariate_names = names;
  return sim;
}

}  // namespace claytobit
