#pragma once

#include <span>
#include <vector>

#include "pinlab/log_table.hpp"
#include "pinlab/rng.hpp"

namespace pinlab::detail {

/// Fills rows 1..N of `table` from row 0 via
///   v[m][n] = site_w[n] + log Σ_ℓ k[ℓ] exp(v[m-1][n-ℓ]).
/// `site_w` is indexed by n (empty means all zero).
void fill_log_table(LogTable& table, std::span<const double> k, std::span<const double> log_k,
                    std::span<const double> site_w);

/// Backward draw of the m contacts of a path ending at `n` from a table
/// filled by fill_log_table; returns ascending contacts ending at n.
std::vector<int> sample_backward(const LogTable& table, std::span<const double> log_k,
                                 std::span<const double> site_w, int n, int m, Stream& rng);

/// Log-probability that sample_backward returns `contacts` given m = |contacts|.
double log_backward_probability(const LogTable& table, std::span<const double> log_k,
                                std::span<const double> site_w, std::span<const int> contacts);

}  // namespace pinlab::detail
