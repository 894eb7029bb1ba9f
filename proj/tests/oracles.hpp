#pragma once

// Independent reference computations for the tests. Nothing here uses the
// table kernel or the samplers under test.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "pinlab/renewal.hpp"

namespace oracle {

/// Bitmask of contacts in 1..N (bit i-1 <-> site i) from an ascending list.
inline std::uint32_t mask_of(const std::vector<int>& contacts) {
  std::uint32_t mask = 0;
  for (int c : contacts) mask |= 1U << (c - 1);
  return mask;
}

inline std::vector<int> contacts_of(std::uint32_t mask, int n) {
  std::vector<int> out;
  for (int i = 1; i <= n; ++i)
    if (mask & (1U << (i - 1))) out.push_back(i);
  return out;
}

/// Every composition of n into exactly m positive parts, as contact sets.
inline void for_each_composition(int n, int m, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> contacts;
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (left == 1) {
      contacts.push_back(n);
      fn(contacts);
      contacts.pop_back();
      return;
    }
    for (int next = pos + 1; next <= n - (left - 1); ++next) {
      contacts.push_back(next);
      rec(next, left - 1);
      contacts.pop_back();
    }
  };
  rec(0, m);
}

/// Q_{N,m}: probability of each contact set conditioned on τ_m = N.
inline std::map<std::uint32_t, double> conditioned_law(const pinlab::renewal::InterArrivalLaw& law, int n, int m) {
  std::map<std::uint32_t, double> out;
  long double total = 0.0L;
  for_each_composition(n, m, [&](const std::vector<int>& c) {
    long double w = 1.0L;
    int prev = 0;
    for (int x : c) {
      w *= law.mass(x - prev);
      prev = x;
    }
    out[mask_of(c)] = static_cast<double>(w);
    total += w;
  });
  for (auto& [k, v] : out) v = static_cast<double>(v / total);
  return out;
}

/// P(τ_m = n) by direct multiple convolution in long double.
inline double renewal_mass(const pinlab::renewal::InterArrivalLaw& law, int n, int m) {
  long double total = 0.0L;
  for_each_composition(n, m, [&](const std::vector<int>& c) {
    long double w = 1.0L;
    int prev = 0;
    for (int x : c) {
      w *= law.mass(x - prev);
      prev = x;
    }
    total += w;
  });
  return static_cast<double>(total);
}

/// Gibbs weights over all contact sets ending at N:
///   exp(h m + log Ψ(m, N) + Σ_{i in A} site_w[i]) Π K(gaps).
/// Returned as (mask, log weight) pairs in long double.
inline std::vector<std::pair<std::uint32_t, long double>> gibbs_log_weights(
    const pinlab::renewal::InterArrivalLaw& law, int n, double h, const std::function<double(int, int)>& log_psi,
    const std::vector<double>& site_w) {
  std::vector<std::pair<std::uint32_t, long double>> out;
  const std::uint32_t free_sites = n - 1;
  for (std::uint32_t sub = 0; sub < (1U << free_sites); ++sub) {
    const std::uint32_t mask = sub | (1U << (n - 1));
    long double lw = 0.0L;
    int prev = 0, m = 0;
    for (int i = 1; i <= n; ++i) {
      if (!(mask & (1U << (i - 1)))) continue;
      lw += std::log(static_cast<long double>(law.mass(i - prev)));
      if (!site_w.empty()) lw += site_w[static_cast<std::size_t>(i)];
      prev = i;
      ++m;
    }
    lw += h * m + log_psi(m, n);
    out.emplace_back(mask, lw);
  }
  return out;
}

}  // namespace oracle
