#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pinlab/partition.hpp"
#include "pinlab/path.hpp"
#include "pinlab/rng.hpp"
#include "pinlab/stats.hpp"

namespace pinlab::sampler {

/// Exact draws from the Gibbs measure P^Ψ_{N,ω,β,h}: the contact number m
/// first, then the m increments backward through the constrained table.
/// Holds a reference to `dp`, which must outlive the sampler.
class GibbsSampler {
 public:
  GibbsSampler(const dp::ConstrainedDP& dp, const potential::PsiFactor& psi, double h, int n = -1);

  int length() const { return n_; }
  double log_z() const { return log_z_; }
  /// P(|τ ∩ (0,N]| = m) for m = 0..N.
  const std::vector<double>& m_law() const { return m_prob_; }

  PathSample sample(Stream& rng) const;
  /// Log-probability of the contact set under the sampler's own conditionals.
  double log_probability(std::span<const int> contacts) const;

 private:
  const dp::ConstrainedDP* dp_;
  int n_ = 0;
  double log_z_ = 0.0;
  std::vector<double> log_m_prob_;
  std::vector<double> m_prob_;
  std::vector<double> m_cdf_;
};

/// Draw d uses Stream(seed, d), so results do not depend on `threads`.
std::vector<PathSample> sample_many(const GibbsSampler& s, int draws, std::uint64_t seed, int threads = 1);

struct Summary {
  int draws = 0;
  stats::MeanStderr contact_frac, eta1_frac, eta2_frac;
};
Summary summarize(std::span<const PathSample> samples);

struct TailPoint {
  double gamma = 0.0;
  long exceed = 0;
  long draws = 0;
  double p_hat = 0.0;
  stats::Interval ci;
};

/// Monte Carlo estimate of P(η₁ > γN) with Wilson intervals, one entry per γ.
std::vector<TailPoint> excursion_tail_curve(std::span<const PathSample> samples, const std::vector<double>& gamma_grid);
std::vector<TailPoint> excursion_tail_curve(const GibbsSampler& s, const std::vector<double>& gamma_grid, int draws,
                                            std::uint64_t seed, int threads = 1);

/// log P(η₁ > γN) computed exactly by splitting paths on whether some
/// excursion exceeds ⌊γN⌋. O(N³); meant for N up to a few thousand. -inf for γ >= 1.
std::vector<double> exact_log_excursion_tail(const dp::ConstrainedDP& dp, const potential::PsiFactor& psi, double h,
                                             int n, const std::vector<double>& gamma_grid);

}  // namespace pinlab::sampler
