#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "pinlab/free_energy.hpp"
#include "pinlab/partition.hpp"
#include "pinlab/sampler.hpp"

namespace pinlab::app {

/// On-disk table cache. An empty directory disables it.
struct TableCache {
  std::filesystem::path dir;
  dp::Limits limits;
};

std::uint64_t fnv1a(const std::string& s);

/// Loads the table keyed by (law, N, field) from the cache or builds and stores it.
dp::ConstrainedDP load_or_build(const renewal::InterArrivalLaw& law, int n,
                                const std::optional<disorder::DisorderField>& field, const TableCache& cache);

// ---- oracle matrix ----

struct OracleOptions {
  std::vector<int> sizes = {6, 10, 14};
  std::vector<double> alphas = {0.7, 1.5};
  std::vector<double> h_grid = {-0.5, 0.0, 0.8};
  double tol = 1e-9;
  std::uint64_t seed = 7;
  /// Scales every DP mass by 1.05 so the detector can be seen to fire.
  bool corrupt_k = false;
};

struct OracleRow {
  std::string check;  // partition | sampler_law | beta0_reduction
  std::string potential;
  double alpha = 0.0, beta = 0.0, h = 0.0;
  int n = 0;
  double deviation = 0.0;
};

struct OracleReport {
  std::vector<OracleRow> rows;
  double max_partition = 0.0, max_sampler = 0.0, max_reduction = 0.0;
  bool pass = false;
};

OracleReport oracle_matrix(const OracleOptions& opt);

// ---- replica sweeps: free energy and path statistics together ----

struct SweepOptions {
  std::vector<double> h_grid;
  std::vector<int> sizes;
  double beta = 0.0;
  disorder::Dist dist = disorder::Dist::Gaussian;
  int replicas = 1;
  int sample_replicas = 0;  // replicas that are also sampled; 0 disables sampling
  int draws = 0;
  std::uint64_t replica_master = 0;  // disorder seeds
  std::uint64_t sample_seed = 0;     // draw streams
  dp::Extrapolation model = dp::Extrapolation::LogNOverN;
  double fd_step = 0.0;  // > 0: also estimate ∂_h f̂ by centered differences
  int threads = 1;
  TableCache cache;
};

struct PathRow {
  double beta = 0.0, h = 0.0;
  int n = 0;
  int replicas = 0;
  int draws = 0;  // per replica
  stats::MeanStderr contact, eta1, eta2;
  std::vector<double> contact_by_replica, eta1_by_replica;
};

struct DerivativeRow {
  double h = 0.0;
  stats::MeanStderr dfdh;
  std::vector<double> per_replica;
};

struct SweepResult {
  std::vector<dp::FreeEnergyEstimate> f;  // one per h
  std::vector<PathRow> paths;             // h-major, then size
  std::vector<DerivativeRow> dfdh;        // when fd_step > 0
};

SweepResult sweep(const renewal::InterArrivalLaw& law, const potential::PsiFactor& psi, const SweepOptions& opt);

// ---- convexity ----

struct ConvexityRow {
  double h = 0.0;
  double d2 = 0.0, err = 0.0;
  bool positive = false;
};

struct ConvexityReport {
  std::vector<ConvexityRow> rows;
  bool pass = false;
};

/// Second central differences of the extrapolated f̂ on the sweep's h grid,
/// paired across replicas. With one replica the error is the propagated
/// extrapolation-fit uncertainty.
ConvexityReport convexity(const SweepResult& s, dp::Extrapolation model);

// ---- exponents ----

struct ExponentRow {
  std::string name;
  double alpha = 0.0;
  double exponent = 0.0, exponent_stderr = 0.0, expected = 0.0;
  double ratio = 0.0, ratio_expected = 0.0;  // NaN when not applicable
  std::string note;
};

struct ExponentWindows {
  std::optional<energy::FitWindow> g, pinning, kink, delocalization;
};

std::vector<ExponentRow> exponent_table(double alpha, int n_max, const potential::Potential& p,
                                        const ExponentWindows& w = {});

/// Settings shared by the sweep-based commands, taken from a config.
SweepOptions sweep_options(const ExperimentConfig& cfg, int threads);

}  // namespace pinlab::app
