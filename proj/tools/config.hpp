#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pinlab/disorder.hpp"
#include "pinlab/partition.hpp"
#include "pinlab/potentials.hpp"
#include "pinlab/renewal.hpp"

namespace pinlab::app {

enum class Format { Csv, Json };

struct ExperimentConfig {
  // [law]
  double alpha = 1.5;
  int n_max = 4096;
  renewal::Support support = renewal::Support::Truncated;
  // [potential]
  potential::Potential potential;
  std::string q_mode = "exact";  // exact | unit | laplace
  // [disorder]
  disorder::Dist dist = disorder::Dist::Gaussian;
  double beta = 0.0;
  int replicas = 1;
  std::uint64_t disorder_seed = 0;
  // [grids]
  std::vector<double> h_grid = {-1.0, -0.5, 0.0, 0.5, 1.0};
  std::vector<double> rho_grid = {0.2, 0.5, 0.8};
  std::vector<int> sizes = {256, 512, 1024};
  std::vector<double> gamma_grid = {0.1, 0.2, 0.4};
  double fd_step = 0.05;  // h step of the centered difference for ∂_h f̂
  // [sampling]
  int draws = 200;
  int sample_replicas = 0;  // 0: every disorder replica
  std::uint64_t master_seed = 0;
  // [output]
  std::filesystem::path directory = "pinlab-out";
  Format format = Format::Csv;
  // [caps]
  dp::Limits limits;
  // [extrapolation]
  dp::Extrapolation model = dp::Extrapolation::LogNOverN;
  // [cache]
  std::filesystem::path cache_directory;  // empty: no table cache
  // [oracle]
  std::vector<int> oracle_sizes = {6, 10, 14};
  std::vector<double> oracle_alphas = {0.7, 1.5};
  std::vector<double> oracle_h = {-0.5, 0.0, 0.8};
  double oracle_tol = 1e-9;
  // [exponents] fit windows by name: g, pinning, kink, delocalization
  std::map<std::string, std::pair<double, double>> fit_windows;

  potential::PsiFactor psi() const;
  renewal::InterArrivalLaw law() const { return renewal::build_power_law(alpha, n_max); }
  /// Seed of the disorder replicas: disorder.seed when set, else the master seed.
  std::uint64_t replica_master() const { return disorder_seed ? disorder_seed : master_seed; }
};

/// Parses the INI-style config; every problem is reported as a ConfigError
/// naming the offending key. Unknown keys are rejected.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);

/// Cross-field checks; throws ConfigError.
void validate(const ExperimentConfig& cfg);

/// "1, 2, 3", "linspace(lo, hi, n)" or "geomspace(lo, hi, n)".
std::vector<double> parse_grid(const std::string& key, const std::string& text);

Format parse_format(const std::string& s);

}  // namespace pinlab::app
