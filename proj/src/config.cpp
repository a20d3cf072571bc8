#include "claytobit/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
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

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "'" + text + "' is not a number");
  return v;
}

long long to_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "'" + text + "' is not an integer");
  return v;
}

Vector to_vector(const std::string& key, const std::string& text) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) values.push_back(to_double(key, trim(item)));
  return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  std::map<std::string, std::string> entries;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    entries[key] = trim(line.substr(eq + 1));
  }

  Scenario s;
  if (auto it = entries.find("design"); it != entries.end()) {
    const long long design = to_integer("design", it->second);
    if (design < 1 || design > 5) throw ConfigError("design", "must be between 1 and 5");
    const Scenario preset = grid_scenarios(StudyScale::desk)[static_cast<std::size_t>(design - 1)];
    s.beta1 = preset.beta1;
    s.beta2 = preset.beta2;
    s.sigma1 = preset.sigma1;
    s.sigma2 = preset.sigma2;
    entries.erase(it);
  }
  for (const auto& [key, value] : entries) {
    if (key == "name") s.name = value;
    else if (key == "n") s.n = static_cast<int>(to_integer(key, value));
    else if (key == "theta") s.theta = to_double(key, value);
    else if (key == "margin1.beta") s.beta1 = to_vector(key, value);
    else if (key == "margin2.beta") s.beta2 = to_vector(key, value);
    else if (key == "margin1.sigma") s.sigma1 = to_double(key, value);
    else if (key == "margin2.sigma") s.sigma2 = to_double(key, value);
    else if (key == "replications") s.replications = static_cast<int>(to_integer(key, value));
    else if (key == "bootstrap") s.bootstrap = static_cast<int>(to_integer(key, value));
    else if (key == "alpha") s.alpha = to_double(key, value);
    else if (key == "seed") {
      const long long seed = to_integer(key, value);
      if (seed < 0) throw ConfigError(key, "must be nonnegative");
      s.seed = static_cast<std::uint64_t>(seed);
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario", "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string format_number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_scenario(const Scenario& s) {
  const auto join = [](const Vector& v) {
    std::string text;
    for (Eigen::Index i = 0; i < v.size(); ++i) text += (i ? ", " : "") + format_number(v[i]);
    return text;
  };
  std::ostringstream out;
  out << "name = " << s.name << '\n'
      << "n = " << s.n << '\n'
      << "theta = " << format_number(s.theta) << '\n'
      << "margin1.beta = " << join(s.beta1) << '\n'
      << "margin1.sigma = " << format_number(s.sigma1) << '\n'
      << "margin2.beta = " << join(s.beta2) << '\n'
      << "margin2.sigma = " << format_number(s.sigma2) << '\n'
      << "replications = " << s.replications << '\n'
      << "bootstrap = " << s.bootstrap << '\n'
      << "alpha = " << format_number(s.alpha) << '\n'
      << "seed = " << s.seed << '\n';
  return out.str();
}

}  // namespace claytobit
