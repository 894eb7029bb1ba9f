#include "pinlab/detail/backward.hpp"

#include <algorithm>
#include <cmath>

#include "pinlab/error.hpp"

namespace pinlab::detail {

namespace {

double weight_at(std::span<const double> site_w, int n) {
  return site_w.empty() ? 0.0 : site_w[static_cast<std::size_t>(n)];
}

// log of the probability that the contact preceding n (which is the k-th) sits at n - ℓ.
double step_log_prob(const LogTable& t, std::span<const double> log_k, std::span<const double> site_w, int n,
                     int k, int ell) {
  return log_k[static_cast<std::size_t>(ell)] + weight_at(site_w, n) + t.at(k - 1, n - ell) - t.at(k, n);
}

}  // namespace

void fill_log_table(LogTable& table, std::span<const double> k, std::span<const double> log_k,
                    std::span<const double> site_w) {
  const int n_top = table.size();
  table.row(0)[0] = 0.0;
  for (int m = 1; m <= n_top; ++m) {
    // Row m-1 is finite on n = m-1..N; only n <= N-1 feeds row m.
    const auto prev = table.row(m - 1).subspan(0, static_cast<std::size_t>(n_top - (m - 1)));
    const auto in = m == 1 ? prev.subspan(0, 1) : prev;
    auto out = table.row(m);
    convolve_log_row(in, m - 1, k, log_k, out, m);
    if (!site_w.empty())
      for (int n = m; n <= n_top; ++n) out[static_cast<std::size_t>(n - m)] += site_w[static_cast<std::size_t>(n)];
  }
}

std::vector<int> sample_backward(const LogTable& table, std::span<const double> log_k,
                                 std::span<const double> site_w, int n, int m, Stream& rng) {
  if (m < 1 || m > n) throw DomainError("backward sampler: need 1 <= m <= N");
  std::vector<int> contacts;
  contacts.reserve(static_cast<std::size_t>(m));
  contacts.push_back(n);
  int pos = n;
  for (int k = m; k >= 2; --k) {
    const double u = rng.uniform();
    const int max_ell = pos - (k - 1);
    double cum = 0.0;
    int chosen = -1;
    int last_positive = 1;
    for (int ell = 1; ell <= max_ell; ++ell) {
      const double p = std::exp(step_log_prob(table, log_k, site_w, pos, k, ell));
      if (p > 0.0) last_positive = ell;
      cum += p;
      if (u < cum) {
        chosen = ell;
        break;
      }
    }
    // Rounding can leave the accumulated mass a few ulps short of 1.
    if (chosen < 0) chosen = last_positive;
    pos -= chosen;
    contacts.push_back(pos);
  }
  std::reverse(contacts.begin(), contacts.end());
  return contacts;
}

double log_backward_probability(const LogTable& table, std::span<const double> log_k,
                                std::span<const double> site_w, std::span<const int> contacts) {
  const int m = static_cast<int>(contacts.size());
  double lp = 0.0;
  for (int k = m; k >= 2; --k) {
    const int pos = contacts[static_cast<std::size_t>(k - 1)];
    const int prev = contacts[static_cast<std::size_t>(k - 2)];
    lp += step_log_prob(table, log_k, site_w, pos, k, pos - prev);
  }
  return lp;
}

}  // namespace pinlab::detail
