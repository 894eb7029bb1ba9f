#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pinlab::disorder {

enum class Dist : std::uint32_t { Gaussian = 0, Rademacher = 1 };

const char* dist_name(Dist d);
/// Throws ParameterError on an unknown name.
Dist parse_dist(const std::string& name);

/// λ(β) = log E[exp(βω)].
double lambda(Dist d, double beta);

/// A quenched realization ω_1..ω_N, stored with a dummy ω_0 = 0 so that
/// values()[n] is the field at site n.
class DisorderField {
 public:
  DisorderField() = default;

  /// Deterministic in (dist, N, seed); a longer field with the same seed
  /// extends a shorter one. Throws ParameterError for N < 1 or beta < 0.
  static DisorderField generate(Dist dist, int n, std::uint64_t seed, double beta);
  /// A field with every ω_n = c, for identities and tests.
  static DisorderField constant(int n, double c, double beta);

  int size() const { return static_cast<int>(values_.size()) - 1; }
  const std::vector<double>& values() const { return values_; }
  double beta() const { return beta_; }
  Dist dist() const { return dist_; }
  std::uint64_t seed() const { return seed_; }
  double lambda_beta() const { return lambda(dist_, beta_); }

  /// β ω_n for n = 0..N.
  std::vector<double> site_weights() const;

 private:
  std::vector<double> values_;
  double beta_ = 0.0;
  Dist dist_ = Dist::Gaussian;
  std::uint64_t seed_ = 0;
};

/// (-λ(β), 0): the window that contains the quenched pinning critical point.
struct Window {
  double lower = 0.0, upper = 0.0;
};
Window annealed_bound_window(Dist d, double beta);

/// Seed of replica r under an experiment seed.
std::uint64_t replica_seed(std::uint64_t master, int replica);

}  // namespace pinlab::disorder
