#pragma once

#include <span>
#include <vector>

#include "pinlab/log_table.hpp"
#include "pinlab/path.hpp"
#include "pinlab/rng.hpp"

namespace pinlab::renewal {

/// Which inter-arrival law a functional is evaluated under: the law truncated
/// and renormalized on 1..n_max, or the untruncated pure power law.
enum class Support { Truncated, Ideal };

/// Exponential moments of the inter-arrival law at tilt x >= 0.
struct LaplaceMoments {
  double l0 = 0.0;            // E[exp(-xη)]
  double one_minus_l0 = 0.0;  // E[1 - exp(-xη)], computed without cancellation
  double l1 = 0.0;            // E[η exp(-xη)]; +inf when divergent
  double l2 = 0.0;            // E[η² exp(-xη)]; +inf when divergent

  double tilted_mean() const { return l1 / l0; }
  double tilted_variance() const { return l2 / l0 - (l1 / l0) * (l1 / l0); }
};

/// Heavy-tailed inter-arrival law K(n) ∝ n^{-(1+alpha)} on 1..n_max.
class InterArrivalLaw {
 public:
  /// Builds an arbitrary law from masses K(1..n_max). With `validate` the
  /// normalization and positivity invariants are enforced.
  static InterArrivalLaw from_masses(double alpha, std::vector<double> masses, bool validate = true);

  double alpha() const { return alpha_; }
  int n_max() const { return n_max_; }
  bool is_pure_power_law() const { return pure_; }

  double mass(int n) const { return n >= 1 && n <= n_max_ ? mass_[static_cast<std::size_t>(n)] : 0.0; }
  double log_mass(int n) const;
  /// Indexed by jump length; entry 0 is 0 (resp. -inf).
  std::span<const double> masses() const { return mass_; }
  std::span<const double> log_masses() const { return log_mass_; }

  double mean() const { return mean_; }              // truncated law
  double ideal_mean() const { return ideal_mean_; }  // +inf when alpha <= 1
  double rho_c() const { return 1.0 / mean_; }
  double rho_c_ideal() const { return 1.0 / ideal_mean_; }
  double rho_c(Support s) const { return s == Support::Truncated ? rho_c() : rho_c_ideal(); }
  double log_k1(Support s = Support::Truncated) const;

  /// Throws ParameterError for negative x or for Ideal on a non power-law.
  LaplaceMoments laplace(double x, Support s = Support::Truncated) const;

  /// Human-readable invariant violations; empty when the law is valid.
  std::vector<std::string> check_invariants() const;

 private:
  friend InterArrivalLaw build_power_law(double alpha, int n_max);
  InterArrivalLaw() = default;
  void finish();

  double alpha_ = 0.0;
  int n_max_ = 0;
  bool pure_ = false;
  double zeta_ = 0.0;  // ζ(1 + alpha), pure power law only
  std::vector<double> mass_;
  std::vector<double> log_mass_;
  double mean_ = 0.0;
  double ideal_mean_ = 0.0;
};

/// K(n) = n^{-(1+alpha)} / Σ_{k<=n_max} k^{-(1+alpha)}.
/// Throws ParameterError when alpha <= 0 or n_max < 2.
InterArrivalLaw build_power_law(double alpha, int n_max);

/// K_q(n) ∝ K(n) exp(-q n) on the truncated support.
struct TiltedLaw {
  double q = 0.0;
  std::vector<double> mass;  // indexed by jump length, entry 0 unused
  double mean = 0.0;
  double variance = 0.0;
};

TiltedLaw tilt(const InterArrivalLaw& law, double q);

/// The tilt whose mean is 1/rho, found by bisection (|mean - 1/rho| <= 1e-10).
/// Throws DensityOutOfRange unless rho_c(truncated) <= rho < 1.
TiltedLaw tilt_for_density(const InterArrivalLaw& law, double rho);

/// logP[m][n] = log P(τ_m = n) for 0 <= m <= n <= N. Requires N <= n_max.
LogTable renewal_mass_table(const InterArrivalLaw& law, int n);

/// log P(n ∈ τ) for n = 0..N from u(n) = Σ_ℓ K(ℓ) u(n-ℓ).
std::vector<double> renewal_log_indicator(const InterArrivalLaw& law, int n);

/// Exact draw from the renewal conditioned on τ_m = N, using a table built
/// up to at least N. Throws DomainError when m is outside 1..N.
PathSample sample_conditioned(const InterArrivalLaw& law, const LogTable& table, int n, int m, Stream& rng);

}  // namespace pinlab::renewal
