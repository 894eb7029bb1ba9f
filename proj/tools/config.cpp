#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "pinlab/error.hpp"
#include "pinlab/stats.hpp"

namespace pinlab::app {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(trim(text), &used);
    if (used != trim(text).size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + text + "'");
  }
}

long long to_int(const std::string& key, const std::string& text) {
  const double v = to_double(key, text);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) throw ConfigError(key, "expected an integer, got '" + text + "'");
  return static_cast<long long>(v);
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(trim(text), &used, 0);
    if (used != trim(text).size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an unsigned 64-bit integer, got '" + text + "'");
  }
}

// Byte counts accept K, M and G suffixes (powers of 1024).
std::size_t to_bytes(const std::string& key, const std::string& text) {
  std::string t = trim(text);
  std::size_t mult = 1;
  if (!t.empty()) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(t.back())));
    if (c == 'K') mult = std::size_t{1} << 10;
    if (c == 'M') mult = std::size_t{1} << 20;
    if (c == 'G') mult = std::size_t{1} << 30;
    if (mult != 1) t.pop_back();
  }
  const auto v = to_int(key, t);
  if (v <= 0) throw ConfigError(key, "must be positive");
  return static_cast<std::size_t>(v) * mult;
}

bool is_sorted_strict(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"law", {"alpha", "n_max", "support"}},
      {"potential", {"kind", "a", "b", "c_H", "chi", "w", "q"}},
      {"disorder", {"dist", "beta", "replicas", "seed"}},
      {"grids", {"h_grid", "rho_grid", "sizes", "gamma_grid", "fd_step"}},
      {"sampling", {"draws", "replicas", "master_seed"}},
      {"output", {"directory", "format"}},
      {"caps", {"max_N", "max_memory"}},
      {"extrapolation", {"model"}},
      {"cache", {"directory"}},
      {"oracle", {"sizes", "alphas", "h_grid", "tolerance"}},
      {"exponents", {"g_window", "pinning_window", "kink_window", "delocalization_window"}},
  };
  return keys;
}

ExperimentConfig from_tree(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) {
      if (body.empty()) throw ConfigError(section, "keys must live inside a [section]");
      throw ConfigError(section, "unknown section");
    }
    for (const auto& [key, v] : body)
      if (!it->second.count(key)) throw ConfigError(section + "." + key, "unknown key");
  }
  const auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return trim(*v);
    return std::nullopt;
  };

  ExperimentConfig c;
  if (auto v = get("law.alpha")) c.alpha = to_double("law.alpha", *v);
  if (auto v = get("law.n_max")) c.n_max = static_cast<int>(to_int("law.n_max", *v));
  if (auto v = get("law.support")) {
    if (*v == "truncated")
      c.support = renewal::Support::Truncated;
    else if (*v == "ideal")
      c.support = renewal::Support::Ideal;
    else
      throw ConfigError("law.support", "expected truncated or ideal");
  }

  const std::string kind = get("potential.kind").value_or("zero");
  const auto num = [&](const std::string& key, double fallback) {
    auto v = get("potential." + key);
    return v ? to_double("potential." + key, *v) : fallback;
  };
  try {
    if (kind == "zero")
      c.potential = potential::Potential{potential::Zero{}};
    else if (kind == "affine")
      c.potential = potential::Potential{potential::Affine{num("a", 0.0), num("b", 0.0)}};
    else if (kind == "concave_quadratic")
      c.potential = potential::Potential{potential::ConcaveQuadratic{num("a", 0.0), num("c_H", 1.0)}};
    else if (kind == "overtwist")
      c.potential = potential::Potential{potential::Overtwist{num("chi", 1.0)}};
    else if (kind == "supercoil")
      c.potential = potential::Potential{potential::Supercoil{num("chi", 1.0), num("w", 1.0)}};
    else
      throw ConfigError("potential.kind", "unknown potential '" + kind + "'");
  } catch (const ParameterError& e) {
    throw ConfigError("potential", e.what());
  }
  if (auto v = get("potential.q")) {
    if (*v != "exact" && *v != "unit" && *v != "laplace") throw ConfigError("potential.q", "expected exact, unit or laplace");
    c.q_mode = *v;
  }

  if (auto v = get("disorder.dist")) {
    try {
      c.dist = disorder::parse_dist(*v);
    } catch (const ParameterError& e) {
      throw ConfigError("disorder.dist", e.what());
    }
  }
  if (auto v = get("disorder.beta")) c.beta = to_double("disorder.beta", *v);
  if (auto v = get("disorder.replicas")) c.replicas = static_cast<int>(to_int("disorder.replicas", *v));
  if (auto v = get("disorder.seed")) c.disorder_seed = to_u64("disorder.seed", *v);

  if (auto v = get("grids.h_grid")) c.h_grid = parse_grid("grids.h_grid", *v);
  if (auto v = get("grids.rho_grid")) c.rho_grid = parse_grid("grids.rho_grid", *v);
  if (auto v = get("grids.gamma_grid")) c.gamma_grid = parse_grid("grids.gamma_grid", *v);
  if (auto v = get("grids.sizes")) {
    c.sizes.clear();
    for (double x : parse_grid("grids.sizes", *v)) {
      if (x != std::round(x)) throw ConfigError("grids.sizes", "sizes must be integers");
      c.sizes.push_back(static_cast<int>(std::lround(x)));
    }
  }

  if (auto v = get("sampling.draws")) c.draws = static_cast<int>(to_int("sampling.draws", *v));
  if (auto v = get("sampling.replicas")) c.sample_replicas = static_cast<int>(to_int("sampling.replicas", *v));
  if (auto v = get("sampling.master_seed")) c.master_seed = to_u64("sampling.master_seed", *v);

  if (auto v = get("output.directory")) c.directory = *v;
  if (auto v = get("output.format")) {
    try {
      c.format = parse_format(*v);
    } catch (const ConfigError&) {
      throw ConfigError("output.format", "expected csv or json");
    }
  }

  if (auto v = get("caps.max_N")) c.limits.max_n = static_cast<int>(to_int("caps.max_N", *v));
  if (auto v = get("caps.max_memory")) c.limits.max_bytes = to_bytes("caps.max_memory", *v);

  if (auto v = get("extrapolation.model")) {
    if (*v == "logN_over_N")
      c.model = dp::Extrapolation::LogNOverN;
    else if (*v == "one_over_N")
      c.model = dp::Extrapolation::OneOverN;
    else
      throw ConfigError("extrapolation.model", "expected logN_over_N or one_over_N");
  }
  if (auto v = get("cache.directory")) c.cache_directory = *v;

  if (auto v = get("oracle.sizes")) {
    c.oracle_sizes.clear();
    for (double x : parse_grid("oracle.sizes", *v)) c.oracle_sizes.push_back(static_cast<int>(std::lround(x)));
  }
  if (auto v = get("oracle.alphas")) c.oracle_alphas = parse_grid("oracle.alphas", *v);
  if (auto v = get("oracle.h_grid")) c.oracle_h = parse_grid("oracle.h_grid", *v);
  if (auto v = get("oracle.tolerance")) c.oracle_tol = to_double("oracle.tolerance", *v);
  if (auto v = get("grids.fd_step")) c.fd_step = to_double("grids.fd_step", *v);
  for (const std::string name : {"g", "pinning", "kink", "delocalization"}) {
    const std::string key = "exponents." + name + "_window";
    if (auto v = get(key)) {
      const auto w = parse_grid(key, *v);
      if (w.size() != 2 || !(w[0] > 0.0)) throw ConfigError(key, "expected 'lo, hi' with 0 < lo < hi");
      c.fit_windows[name] = {w[0], w[1]};
    }
  }

  validate(c);
  return c;
}

}  // namespace

potential::PsiFactor ExperimentConfig::psi() const {
  if (q_mode == "unit") return potential::PsiFactor::unit(potential);
  if (q_mode == "laplace") return potential::PsiFactor::laplace(potential);
  return potential::PsiFactor::exact(potential);
}

std::vector<double> parse_grid(const std::string& key, const std::string& text) {
  static const std::regex fn(R"(\s*(linspace|geomspace)\s*\(([^,]+),([^,]+),([^,\)]+)\)\s*)");
  std::smatch mt;
  std::vector<double> out;
  if (std::regex_match(text, mt, fn)) {
    const double lo = to_double(key, mt[2]), hi = to_double(key, mt[3]);
    const auto n = to_int(key, mt[4]);
    if (n < 1) throw ConfigError(key, "grid needs at least one point");
    if (n == 1) return {lo};
    try {
      out = mt[1] == "linspace" ? stats::linear_grid(lo, hi, static_cast<int>(n))
                                : stats::geometric_grid(lo, hi, static_cast<int>(n));
    } catch (const Error& e) {
      throw ConfigError(key, e.what());
    }
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!trim(item).empty()) out.push_back(to_double(key, item));
  }
  if (out.empty()) throw ConfigError(key, "grid is empty");
  if (!is_sorted_strict(out)) throw ConfigError(key, "grid must be strictly ascending");
  return out;
}

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw ConfigError("format", "expected csv or json, got '" + s + "'");
}

void validate(const ExperimentConfig& c) {
  if (!(c.alpha > 0.0)) throw ConfigError("law.alpha", "must be > 0");
  if (c.n_max < 1) throw ConfigError("law.n_max", "must be >= 1");
  if (!(c.beta >= 0.0)) throw ConfigError("disorder.beta", "must be >= 0");
  if (c.replicas < 1) throw ConfigError("disorder.replicas", "must be >= 1");
  if (c.sample_replicas < 0 || c.sample_replicas > c.replicas)
    throw ConfigError("sampling.replicas", "must lie in 0..disorder.replicas");
  if (c.draws < 1) throw ConfigError("sampling.draws", "must be >= 1");
  if (c.sizes.empty()) throw ConfigError("grids.sizes", "must be non-empty");
  for (int n : c.sizes) {
    if (n < 1) throw ConfigError("grids.sizes", "sizes must be >= 1");
    if (n > c.n_max) throw ConfigError("grids.sizes", "size " + std::to_string(n) + " exceeds law.n_max");
    if (n > c.limits.max_n) throw ConfigError("grids.sizes", "size " + std::to_string(n) + " exceeds caps.max_N");
    if (dp::table_bytes(n) > c.limits.max_bytes)
      throw ConfigError("grids.sizes", "size " + std::to_string(n) + " needs " + std::to_string(dp::table_bytes(n)) +
                                           " bytes, over caps.max_memory");
  }
  for (double r : c.rho_grid)
    if (!(r > 0.0 && r <= 1.0)) throw ConfigError("grids.rho_grid", "values must lie in (0, 1]");
  for (double g : c.gamma_grid)
    if (!(g >= 0.0)) throw ConfigError("grids.gamma_grid", "values must be >= 0");
  if (!(c.fd_step > 0.0)) throw ConfigError("grids.fd_step", "must be > 0");
  if (c.limits.max_n < 1) throw ConfigError("caps.max_N", "must be >= 1");
  for (int n : c.oracle_sizes)
    if (n < 1 || n > 16) throw ConfigError("oracle.sizes", "sizes must lie in 1..16");
  for (double a : c.oracle_alphas)
    if (!(a > 0.0)) throw ConfigError("oracle.alphas", "must be > 0");
  if (c.q_mode == "laplace" && !std::holds_alternative<potential::Supercoil>(c.potential.kind()))
    throw ConfigError("potential.q", "laplace is only defined for the supercoil potential");
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config:" + std::to_string(e.line()), e.message());
  }
  return from_tree(tree);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace pinlab::app
