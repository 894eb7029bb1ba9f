#include "pinlab/disorder.hpp"

#include <cmath>
#include <random>

#include "pinlab/error.hpp"
#include "pinlab/rng.hpp"

namespace pinlab::disorder {

const char* dist_name(Dist d) { return d == Dist::Gaussian ? "gaussian" : "rademacher"; }

Dist parse_dist(const std::string& name) {
  if (name == "gaussian") return Dist::Gaussian;
  if (name == "rademacher") return Dist::Rademacher;
  throw ParameterError("unknown disorder distribution '" + name + "'");
}

double lambda(Dist d, double beta) {
  if (d == Dist::Gaussian) return 0.5 * beta * beta;
  // log cosh β without overflow for large β.
  const double a = std::abs(beta);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

DisorderField DisorderField::generate(Dist dist, int n, std::uint64_t seed, double beta) {
  if (n < 1) throw ParameterError("disorder: N must be >= 1");
  if (!(beta >= 0.0)) throw ParameterError("disorder: beta must be >= 0");
  DisorderField f;
  f.dist_ = dist;
  f.seed_ = seed;
  f.beta_ = beta;
  f.values_.assign(static_cast<std::size_t>(n) + 1, 0.0);
  // One draw per site, consumed in site order, so fields are prefix-stable.
  Stream rng(seed);
  if (dist == Dist::Gaussian) {
    std::normal_distribution<double> gauss;
    for (int i = 1; i <= n; ++i) f.values_[static_cast<std::size_t>(i)] = gauss(rng);
  } else {
    for (int i = 1; i <= n; ++i) f.values_[static_cast<std::size_t>(i)] = (rng() >> 63) ? 1.0 : -1.0;
  }
  return f;
}

DisorderField DisorderField::constant(int n, double c, double beta) {
  if (n < 1) throw ParameterError("disorder: N must be >= 1");
  DisorderField f;
  f.beta_ = beta;
  f.values_.assign(static_cast<std::size_t>(n) + 1, c);
  f.values_[0] = 0.0;
  return f;
}

std::vector<double> DisorderField::site_weights() const {
  std::vector<double> w(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) w[i] = beta_ * values_[i];
  return w;
}

Window annealed_bound_window(Dist d, double beta) {
  if (!(beta >= 0.0)) throw ParameterError("annealed window: beta must be >= 0");
  return {beta == 0.0 ? 0.0 : -lambda(d, beta), 0.0};
}

std::uint64_t replica_seed(std::uint64_t master, int replica) {
  return derive_seed(master, 0x5eed0000ULL + static_cast<std::uint64_t>(replica));
}

}  // namespace pinlab::disorder
