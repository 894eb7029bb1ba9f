#include "pinlab/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "pinlab/detail/backward.hpp"
#include "pinlab/error.hpp"
#include "pinlab/logspace.hpp"
#include "pinlab/parallel.hpp"

namespace pinlab::sampler {

GibbsSampler::GibbsSampler(const dp::ConstrainedDP& dp, const potential::PsiFactor& psi, double h, int n)
    : dp_(&dp), n_(n < 0 ? dp.size() : n) {
  if (n_ < 1 || n_ > dp.size()) throw DomainError("sampler: N outside the table");
  log_m_prob_ = dp::contact_log_weights(dp, psi, h, n_);
  log_z_ = log_sum_exp(log_m_prob_);
  if (!std::isfinite(log_z_)) throw DomainError("sampler: partition function is not finite");
  m_prob_.resize(log_m_prob_.size());
  m_cdf_.resize(log_m_prob_.size());
  double cum = 0.0;
  for (std::size_t m = 0; m < log_m_prob_.size(); ++m) {
    log_m_prob_[m] -= log_z_;
    m_prob_[m] = std::exp(log_m_prob_[m]);
    cum += m_prob_[m];
    m_cdf_[m] = cum;
  }
}

PathSample GibbsSampler::sample(Stream& rng) const {
  const double u = rng.uniform() * m_cdf_.back();
  auto it = std::upper_bound(m_cdf_.begin(), m_cdf_.end(), u);
  int m = static_cast<int>(it - m_cdf_.begin());
  if (m > n_) m = n_;
  // Never land on a zero-probability m through rounding.
  while (m_prob_[static_cast<std::size_t>(m)] == 0.0 && m > 1) --m;
  if (m_prob_[static_cast<std::size_t>(m)] == 0.0)
    while (m < n_ && m_prob_[static_cast<std::size_t>(m)] == 0.0) ++m;
  return PathSample::from_contacts(
      n_, detail::sample_backward(dp_->table(), dp_->law().log_masses(), dp_->site_weights(), n_, m, rng));
}

double GibbsSampler::log_probability(std::span<const int> contacts) const {
  if (contacts.empty() || contacts.back() != n_) return kNegInf;
  for (std::size_t i = 0; i < contacts.size(); ++i)
    if (contacts[i] < 1 || (i > 0 && contacts[i] <= contacts[i - 1])) return kNegInf;
  const auto m = contacts.size();
  return log_m_prob_[m] +
         detail::log_backward_probability(dp_->table(), dp_->law().log_masses(), dp_->site_weights(), contacts);
}

std::vector<PathSample> sample_many(const GibbsSampler& s, int draws, std::uint64_t seed, int threads) {
  std::vector<PathSample> out(static_cast<std::size_t>(std::max(draws, 0)));
  parallel_for(draws, threads, [&](int d) {
    Stream rng(seed, static_cast<std::uint64_t>(d));
    out[static_cast<std::size_t>(d)] = s.sample(rng);
  });
  return out;
}

Summary summarize(std::span<const PathSample> samples) {
  std::vector<double> c, e1, e2;
  for (const auto& s : samples) {
    const auto o = observables(s);
    c.push_back(o.contact_frac);
    e1.push_back(o.eta1_frac);
    e2.push_back(o.eta2_frac);
  }
  Summary out;
  out.draws = static_cast<int>(samples.size());
  if (samples.empty()) return out;
  out.contact_frac = stats::mean_stderr(c);
  out.eta1_frac = stats::mean_stderr(e1);
  out.eta2_frac = stats::mean_stderr(e2);
  return out;
}

std::vector<TailPoint> excursion_tail_curve(std::span<const PathSample> samples, const std::vector<double>& gamma_grid) {
  std::vector<TailPoint> out;
  for (double g : gamma_grid) {
    TailPoint p;
    p.gamma = g;
    p.draws = static_cast<long>(samples.size());
    for (const auto& s : samples)
      if (s.eta_sorted.front() > g * s.length) ++p.exceed;
    p.p_hat = p.draws ? static_cast<double>(p.exceed) / p.draws : 0.0;
    p.ci = stats::wilson(p.exceed, p.draws);
    out.push_back(p);
  }
  return out;
}

std::vector<TailPoint> excursion_tail_curve(const GibbsSampler& s, const std::vector<double>& gamma_grid, int draws,
                                            std::uint64_t seed, int threads) {
  const auto samples = sample_many(s, draws, seed, threads);
  return excursion_tail_curve(samples, gamma_grid);
}

namespace {

// log Σ_{m} e^{hm} Ψ(m,N) B[m][N], where B restricts to paths with some
// excursion longer than `cap`.
double log_big_excursion_mass(const dp::ConstrainedDP& dp, const potential::PsiFactor& psi, double h, int n, int cap) {
  const auto& law = dp.law();
  const auto sw = dp.site_weights();
  // big[n'] for the current m, built from the previous row of big and of the full table.
  std::vector<double> prev(static_cast<std::size_t>(n) + 1, kNegInf), cur(prev.size());
  std::vector<double> terms;
  std::vector<double> weights;
  for (int m = 1; m <= n; ++m) {
    std::fill(cur.begin(), cur.end(), kNegInf);
    for (int pos = m; pos <= n; ++pos) {
      terms.clear();
      for (int ell = 1; ell <= pos - (m - 1); ++ell) {
        const double lk = law.log_mass(ell);
        if (is_neg_inf(lk)) continue;
        const double from = ell <= cap ? prev[static_cast<std::size_t>(pos - ell)] : dp.log_z(pos - ell, m - 1);
        if (!is_neg_inf(from)) terms.push_back(lk + from);
      }
      if (terms.empty()) continue;
      cur[static_cast<std::size_t>(pos)] = log_sum_exp(terms) + (sw.empty() ? 0.0 : sw[static_cast<std::size_t>(pos)]);
    }
    const double top = cur[static_cast<std::size_t>(n)];
    if (!is_neg_inf(top)) weights.push_back(h * m + psi.log_psi(m, n) + top);
    std::swap(prev, cur);
  }
  return log_sum_exp(weights);
}

}  // namespace

std::vector<double> exact_log_excursion_tail(const dp::ConstrainedDP& dp, const potential::PsiFactor& psi, double h,
                                             int n, const std::vector<double>& gamma_grid) {
  if (n < 1 || n > dp.size()) throw DomainError("excursion tail: N outside the table");
  const double log_z = dp::full_partition(dp, psi, h, n);
  std::vector<double> out;
  for (double g : gamma_grid) {
    if (g >= 1.0) {
      out.push_back(kNegInf);
      continue;
    }
    const int cap = g < 0.0 ? 0 : static_cast<int>(std::floor(g * n));
    out.push_back(std::min(0.0, log_big_excursion_mass(dp, psi, h, n, cap) - log_z));
  }
  return out;
}

}  // namespace pinlab::sampler
