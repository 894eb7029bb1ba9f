#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "pinlab/logspace.hpp"

namespace pinlab {

/// Triangular table of log-values v[m][n] for 0 <= m <= n <= N, stored
/// row-major by m with row m holding n = m..N. Entries outside the triangle
/// read as -inf.
class LogTable {
 public:
  LogTable() = default;
  explicit LogTable(int n);

  int size() const { return n_; }

  double at(int m, int n) const {
    if (m < 0 || n < m || n > n_) return kNegInf;
    return data_[offset(m) + static_cast<std::size_t>(n - m)];
  }

  /// Row m, indexed by n - m.
  std::span<double> row(int m) { return {data_.data() + offset(m), static_cast<std::size_t>(n_ - m + 1)}; }
  std::span<const double> row(int m) const {
    return {data_.data() + offset(m), static_cast<std::size_t>(n_ - m + 1)};
  }

  std::span<const double> raw() const { return data_; }
  std::span<double> raw() { return data_; }

  static std::size_t entry_count(int n) {
    const auto nn = static_cast<std::size_t>(n) + 1;
    return nn * (nn + 1) / 2;
  }

 private:
  std::size_t offset(int m) const {
    const auto mm = static_cast<std::size_t>(m);
    return mm * (static_cast<std::size_t>(n_) + 1) - mm * (mm - 1) / 2;
  }

  int n_ = 0;
  std::vector<double> data_;
};

/// Header of the binary table cache. All multi-byte fields little-endian.
///
///   bytes 0-7   magic "PINLABT\0"
///   u32         version (1)
///   u32         flags (bit 0: disorder block present)
///   f64         alpha
///   u64         n_max
///   u64         N
///   [u64 seed, f64 beta, u32 dist, u32 reserved]   when flags bit 0 is set
///   f64 * (N+1)(N+2)/2   row-major triangular log-values
struct TableHeader {
  double alpha = 0.0;
  std::uint64_t n_max = 0;
  std::uint64_t n = 0;
  struct Disorder {
    std::uint64_t seed = 0;
    double beta = 0.0;
    std::uint32_t dist = 0;
  };
  std::optional<Disorder> disorder;
};

void write_table(std::ostream& out, const TableHeader& header, const LogTable& table);
/// Throws pinlab::Error on a malformed or truncated stream.
LogTable read_table(std::istream& in, TableHeader* header = nullptr);

namespace detail {

/// out[i] = log Σ_{j=in_lo}^{n-1} exp(in[j - in_lo]) · k[n - j] for n = out_lo + i.
/// `in` must be finite on its whole range; `k` and `log_k` are indexed by jump
/// length and must cover every length that can occur.
void convolve_log_row(std::span<const double> in, int in_lo, std::span<const double> k,
                      std::span<const double> log_k, std::span<double> out, int out_lo);

}  // namespace detail

}  // namespace pinlab
