// Hot loop of every table build. Compiled with reassociation enabled so the
// block dot products vectorize; inputs are always finite here.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <vector>

#include "pinlab/log_table.hpp"

namespace pinlab::detail {

namespace {

constexpr int kBlock = 64;
// exp(-700) is still normal; anything below is flushed to zero to keep the
// dot products out of the denormal range.
constexpr double kFlush = -700.0;

double dot(const double* a, const double* b, int len) {
  double acc = 0.0;
  for (int t = 0; t < len; ++t) acc += a[t] * b[t];
  return acc;
}

}  // namespace

void convolve_log_row(std::span<const double> in, int in_lo, std::span<const double> k,
                      std::span<const double> log_k, std::span<double> out, int out_lo) {
  const int in_len = static_cast<int>(in.size());
  const int out_len = static_cast<int>(out.size());
  if (out_len == 0) return;
  const int out_hi = out_lo + out_len - 1;
  assert(out_lo > in_lo);
  const int reach = out_hi - in_lo;  // longest jump needed
  assert(reach < static_cast<int>(k.size()));

  // Block-scaled linear copy of the input row.
  const int n_blocks = (in_len + kBlock - 1) / kBlock;
  std::vector<double> scale(static_cast<std::size_t>(n_blocks));
  std::vector<double> prefix_max(static_cast<std::size_t>(n_blocks));
  std::vector<double> lin(static_cast<std::size_t>(n_blocks) * kBlock, 0.0);
  for (int b = 0; b < n_blocks; ++b) {
    const int j0 = b * kBlock;
    const int j1 = std::min(in_len, j0 + kBlock);
    double mx = in[static_cast<std::size_t>(j0)];
    for (int j = j0 + 1; j < j1; ++j) mx = std::max(mx, in[static_cast<std::size_t>(j)]);
    scale[static_cast<std::size_t>(b)] = mx;
    prefix_max[static_cast<std::size_t>(b)] = b == 0 ? mx : std::max(prefix_max[static_cast<std::size_t>(b - 1)], mx);
    for (int j = j0; j < j1; ++j) {
      const double d = in[static_cast<std::size_t>(j)] - mx;
      lin[static_cast<std::size_t>(j)] = d < kFlush ? 0.0 : std::exp(d);
    }
  }

  // rev[t] = k[reach - t], so k[n - j] = rev[reach - n + j] is ascending in j.
  std::vector<double> rev(static_cast<std::size_t>(reach) + 1);
  for (int t = 0; t <= reach; ++t) rev[static_cast<std::size_t>(t)] = k[static_cast<std::size_t>(reach - t)];

  for (int n = std::max(out_lo, in_lo + 1); n <= out_hi; ++n) {
    const int valid = std::min(n - in_lo, in_len);  // j = in_lo .. in_lo + valid - 1
    const int full = valid / kBlock;
    const int rem = valid - full * kBlock;

    // Full blocks: every index of the block contributes, so entries flushed
    // relative to the block maximum are negligible against the maximum's own
    // term (jump weights differ by a bounded polynomial factor).
    double log_full = kNegInf;
    if (full > 0) {
      const double ref = prefix_max[static_cast<std::size_t>(full - 1)];
      const double* r = rev.data() + (reach - n + in_lo);
      double sum = 0.0;
      for (int b = 0; b < full; ++b) {
        const double w = scale[static_cast<std::size_t>(b)] - ref;
        if (w < kFlush) continue;
        const double d = dot(lin.data() + b * kBlock, r + b * kBlock, kBlock);
        sum += std::exp(w) * d;
      }
      log_full = ref + std::log(sum);
    }

    // Trailing partial block: its maximum may lie beyond n - 1, so it is
    // accumulated in log space.
    double log_part = kNegInf;
    if (rem > 0) {
      const int j0 = full * kBlock;
      double mx = kNegInf;
      for (int j = j0; j < j0 + rem; ++j)
        mx = std::max(mx, in[static_cast<std::size_t>(j)] + log_k[static_cast<std::size_t>(n - in_lo - j)]);
      double s = 0.0;
      for (int j = j0; j < j0 + rem; ++j)
        s += std::exp(in[static_cast<std::size_t>(j)] + log_k[static_cast<std::size_t>(n - in_lo - j)] - mx);
      log_part = mx + std::log(s);
    }
    out[static_cast<std::size_t>(n - out_lo)] = log_add(log_full, log_part);
  }
}

}  // namespace pinlab::detail
