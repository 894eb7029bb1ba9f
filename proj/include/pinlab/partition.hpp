#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "pinlab/disorder.hpp"
#include "pinlab/log_table.hpp"
#include "pinlab/potentials.hpp"
#include "pinlab/renewal.hpp"

namespace pinlab::dp {

/// Size and memory caps for m-resolved tables.
struct Limits {
  int max_n = 4096;
  std::size_t max_bytes = std::size_t{1} << 30;
};

/// log Z_{n,m,ω,β} = log E[exp(β Σ_{j<=n} ω_j δ_j) 1{τ_m = n}] for 0 <= m <= n <= N.
/// The disorder factor of a contact is attached at its own site.
class ConstrainedDP {
 public:
  /// Requires N <= law.n_max() and, with a field, field.size() >= N. Throws
  /// CapacityError when N or the table size exceeds the limits.
  static ConstrainedDP build(const renewal::InterArrivalLaw& law, int n,
                             std::optional<disorder::DisorderField> field = std::nullopt, Limits limits = {});
  /// Wraps a table read back from the cache.
  static ConstrainedDP from_table(const renewal::InterArrivalLaw& law, LogTable table,
                                  std::optional<disorder::DisorderField> field = std::nullopt);

  int size() const { return table_.size(); }
  const renewal::InterArrivalLaw& law() const { return law_; }
  const LogTable& table() const { return table_; }
  const std::optional<disorder::DisorderField>& field() const { return field_; }
  double beta() const { return field_ ? field_->beta() : 0.0; }
  /// β ω_n for n = 0..N, or empty when homogeneous.
  std::span<const double> site_weights() const { return site_w_; }

  /// Entries for n below size() only depend on the first n sites, so a table
  /// built at N also serves every smaller system.
  double log_z(int n, int m) const { return table_.at(m, n); }

  void save(std::ostream& out) const;
  /// Rebuilds the field from the stored seed when the header carries one.
  static ConstrainedDP load(std::istream& in, const renewal::InterArrivalLaw& law);

 private:
  ConstrainedDP(renewal::InterArrivalLaw law, LogTable table, std::optional<disorder::DisorderField> field);

  renewal::InterArrivalLaw law_;
  LogTable table_;
  std::optional<disorder::DisorderField> field_;
  std::vector<double> site_w_;
};

std::size_t table_bytes(int n);

/// h m + log Ψ(m, n) + log Z_{n,m} for m = 0..n (entry 0 is -inf).
std::vector<double> contact_log_weights(const ConstrainedDP& dp, const potential::PsiFactor& psi, double h, int n);

/// log Z^Ψ_{n,ω,β,h} for n <= dp.size() (n = -1 means dp.size()).
double full_partition(const ConstrainedDP& dp, const potential::PsiFactor& psi, double h, int n = -1);

struct OracleResult {
  double log_z = 0.0;
  /// Contact-set bitmask (bit i-1 for site i) -> Gibbs probability.
  std::map<std::uint32_t, double> probability;
};

/// Direct enumeration of all 2^{N-1} contact sets ending at N, for N <= 16.
OracleResult brute_force_oracle(const renewal::InterArrivalLaw& law, const potential::PsiFactor& psi,
                                const disorder::DisorderField* field, double h, int n);

enum class Extrapolation { LogNOverN, OneOverN };

struct SizeEstimate {
  int n = 0;
  int replica = 0;
  std::uint64_t seed = 0;
  double value = 0.0;  // log Z / N
};

struct FreeEnergyEstimate {
  double x = 0.0;  // h for f, ρ for g
  double beta = 0.0;
  std::vector<SizeEstimate> estimates;
  std::vector<double> per_replica;  // extrapolated value of each replica
  double extrapolated = 0.0;
  double stderr_ = 0.0;  // replica spread; 0 for a single replica
};

struct EstimateOptions {
  std::vector<int> sizes;  // ascending, each <= n_max
  int replicas = 1;
  std::uint64_t master_seed = 0;
  double beta = 0.0;
  disorder::Dist dist = disorder::Dist::Gaussian;
  Extrapolation model = Extrapolation::LogNOverN;
  int threads = 1;
  Limits limits;
};

/// Extrapolates one replica's values (log Z/N at each size) to N = ∞.
double extrapolate(std::span<const int> sizes, std::span<const double> values, Extrapolation model);

/// Quenched free energy on an h grid. One table per replica is built at the
/// largest size and reused for every h and every smaller size.
std::vector<FreeEnergyEstimate> estimate_f(const potential::PsiFactor& psi, const renewal::InterArrivalLaw& law,
                                           const std::vector<double>& h_grid, const EstimateOptions& opt);

/// Constrained free energy g(β, ρ) with m = round(ρN) on a ρ grid.
std::vector<FreeEnergyEstimate> estimate_g(const renewal::InterArrivalLaw& law, const std::vector<double>& rho_grid,
                                           const EstimateOptions& opt);

/// The disorder field of a replica, long enough for the largest size.
std::optional<disorder::DisorderField> replica_field(const EstimateOptions& opt, int replica);

}  // namespace pinlab::dp
