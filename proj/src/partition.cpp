#include "pinlab/partition.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "pinlab/detail/backward.hpp"
#include "pinlab/error.hpp"
#include "pinlab/logspace.hpp"
#include "pinlab/parallel.hpp"
#include "pinlab/stats.hpp"

namespace pinlab::dp {

std::size_t table_bytes(int n) { return LogTable::entry_count(n) * sizeof(double); }

ConstrainedDP::ConstrainedDP(renewal::InterArrivalLaw law, LogTable table, std::optional<disorder::DisorderField> field)
    : law_(std::move(law)), table_(std::move(table)), field_(std::move(field)) {
  if (field_) {
    site_w_ = field_->site_weights();
    site_w_.resize(static_cast<std::size_t>(table_.size()) + 1);
  }
}

ConstrainedDP ConstrainedDP::build(const renewal::InterArrivalLaw& law, int n,
                                   std::optional<disorder::DisorderField> field, Limits limits) {
  if (n < 1) throw ParameterError("constrained table: N must be >= 1");
  if (n > law.n_max())
    throw ParameterError("constrained table: N = " + std::to_string(n) + " exceeds n_max = " + std::to_string(law.n_max()));
  if (field && field->size() < n) throw ParameterError("constrained table: disorder field shorter than N");
  if (n > limits.max_n || table_bytes(n) > limits.max_bytes)
    throw CapacityError("constrained table: N = " + std::to_string(n) + " needs " + std::to_string(table_bytes(n)) +
                        " bytes; caps are max_N = " + std::to_string(limits.max_n) +
                        ", max_memory = " + std::to_string(limits.max_bytes) + " bytes");
  ConstrainedDP dp(law, LogTable(n), std::move(field));
  detail::fill_log_table(dp.table_, law.masses(), law.log_masses(), dp.site_w_);
  return dp;
}

ConstrainedDP ConstrainedDP::from_table(const renewal::InterArrivalLaw& law, LogTable table,
                                        std::optional<disorder::DisorderField> field) {
  if (table.size() > law.n_max()) throw ParameterError("constrained table: N exceeds n_max");
  if (field && field->size() < table.size()) throw ParameterError("constrained table: disorder field shorter than N");
  return ConstrainedDP(law, std::move(table), std::move(field));
}

void ConstrainedDP::save(std::ostream& out) const {
  TableHeader hdr;
  hdr.alpha = law_.alpha();
  hdr.n_max = static_cast<std::uint64_t>(law_.n_max());
  hdr.n = static_cast<std::uint64_t>(size());
  if (field_) hdr.disorder = TableHeader::Disorder{field_->seed(), field_->beta(), static_cast<std::uint32_t>(field_->dist())};
  write_table(out, hdr, table_);
}

ConstrainedDP ConstrainedDP::load(std::istream& in, const renewal::InterArrivalLaw& law) {
  TableHeader hdr;
  auto table = read_table(in, &hdr);
  if (hdr.alpha != law.alpha() || hdr.n_max != static_cast<std::uint64_t>(law.n_max()))
    throw Error("table cache: header does not match the inter-arrival law");
  std::optional<disorder::DisorderField> field;
  if (hdr.disorder)
    field = disorder::DisorderField::generate(static_cast<disorder::Dist>(hdr.disorder->dist), table.size(),
                                              hdr.disorder->seed, hdr.disorder->beta);
  return from_table(law, std::move(table), std::move(field));
}

std::vector<double> contact_log_weights(const ConstrainedDP& dp, const potential::PsiFactor& psi, double h, int n) {
  if (n < 1 || n > dp.size()) throw DomainError("partition: N outside the table");
  std::vector<double> w(static_cast<std::size_t>(n) + 1, kNegInf);
  for (int m = 1; m <= n; ++m) {
    const double lz = dp.log_z(n, m);
    if (is_neg_inf(lz)) continue;
    w[static_cast<std::size_t>(m)] = h * m + psi.log_psi(m, n) + lz;
  }
  return w;
}

double full_partition(const ConstrainedDP& dp, const potential::PsiFactor& psi, double h, int n) {
  if (n < 0) n = dp.size();
  return log_sum_exp(contact_log_weights(dp, psi, h, n));
}

OracleResult brute_force_oracle(const renewal::InterArrivalLaw& law, const potential::PsiFactor& psi,
                                const disorder::DisorderField* field, double h, int n) {
  if (n < 1 || n > 16) throw CapacityError("brute-force oracle: N must lie in 1..16");
  if (n > law.n_max()) throw ParameterError("brute-force oracle: N exceeds n_max");
  if (field && field->size() < n) throw ParameterError("brute-force oracle: disorder field shorter than N");
  const std::uint32_t count = 1U << (n - 1);
  std::vector<double> lw(count);
  for (std::uint32_t sub = 0; sub < count; ++sub) {
    const std::uint32_t mask = sub | (1U << (n - 1));
    double w = 0.0;
    int prev = 0, m = 0;
    for (int i = 1; i <= n; ++i) {
      if (!(mask >> (i - 1) & 1U)) continue;
      w += law.log_mass(i - prev);
      if (field) w += field->beta() * field->values()[static_cast<std::size_t>(i)];
      prev = i;
      ++m;
    }
    lw[sub] = w + h * m + psi.log_psi(m, n);
  }
  OracleResult out;
  out.log_z = log_sum_exp(lw);
  for (std::uint32_t sub = 0; sub < count; ++sub)
    out.probability[sub | (1U << (n - 1))] = std::exp(lw[sub] - out.log_z);
  return out;
}

double extrapolate(std::span<const int> sizes, std::span<const double> values, Extrapolation model) {
  if (sizes.size() != values.size() || sizes.empty()) throw DomainError("extrapolate: need paired, non-empty data");
  if (sizes.size() == 1) return values[0];
  std::vector<double> x, w;
  for (int n : sizes) {
    const double nn = n;
    x.push_back(model == Extrapolation::LogNOverN ? std::log(nn) / nn : 1.0 / nn);
    w.push_back(nn);
  }
  return stats::fit_line(x, values, w).intercept;
}

std::optional<disorder::DisorderField> replica_field(const EstimateOptions& opt, int replica) {
  if (opt.beta == 0.0) return std::nullopt;
  const int n = opt.sizes.back();
  return disorder::DisorderField::generate(opt.dist, n, disorder::replica_seed(opt.master_seed, replica), opt.beta);
}

namespace {

void check_sizes(const EstimateOptions& opt, const renewal::InterArrivalLaw& law) {
  if (opt.sizes.empty()) throw ParameterError("estimate: sizes must be non-empty");
  for (std::size_t i = 1; i < opt.sizes.size(); ++i)
    if (opt.sizes[i] <= opt.sizes[i - 1]) throw ParameterError("estimate: sizes must be strictly ascending");
  if (opt.sizes.back() > law.n_max()) throw ParameterError("estimate: sizes must not exceed n_max");
  if (opt.replicas < 1) throw ParameterError("estimate: replicas must be >= 1");
}

// values[r][point][size] -> estimates keyed by grid point.
std::vector<FreeEnergyEstimate> assemble(const std::vector<double>& grid, const EstimateOptions& opt, int replicas,
                                         const std::vector<std::vector<std::vector<double>>>& values) {
  std::vector<FreeEnergyEstimate> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto& e = out[i];
    e.x = grid[i];
    e.beta = opt.beta;
    for (int r = 0; r < replicas; ++r) {
      const auto& v = values[static_cast<std::size_t>(r)][i];
      const std::uint64_t seed = opt.beta == 0.0 ? 0 : disorder::replica_seed(opt.master_seed, r);
      for (std::size_t s = 0; s < opt.sizes.size(); ++s) e.estimates.push_back({opt.sizes[s], r, seed, v[s]});
      e.per_replica.push_back(extrapolate(opt.sizes, v, opt.model));
    }
    const auto ms = stats::mean_stderr(e.per_replica);
    e.extrapolated = ms.mean;
    e.stderr_ = ms.stderr_;
  }
  return out;
}

template <class Eval>
std::vector<FreeEnergyEstimate> run_estimate(const renewal::InterArrivalLaw& law, const std::vector<double>& grid,
                                             const EstimateOptions& opt, Eval eval) {
  check_sizes(opt, law);
  const int replicas = opt.beta == 0.0 ? 1 : opt.replicas;
  std::vector<std::vector<std::vector<double>>> values(static_cast<std::size_t>(replicas));
  parallel_for(replicas, opt.threads, [&](int r) {
    const auto dp = ConstrainedDP::build(law, opt.sizes.back(), replica_field(opt, r), opt.limits);
    auto& mine = values[static_cast<std::size_t>(r)];
    mine.assign(grid.size(), std::vector<double>(opt.sizes.size()));
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t s = 0; s < opt.sizes.size(); ++s) mine[i][s] = eval(dp, grid[i], opt.sizes[s]) / opt.sizes[s];
  });
  return assemble(grid, opt, replicas, values);
}

}  // namespace

std::vector<FreeEnergyEstimate> estimate_f(const potential::PsiFactor& psi, const renewal::InterArrivalLaw& law,
                                           const std::vector<double>& h_grid, const EstimateOptions& opt) {
  return run_estimate(law, h_grid, opt,
                      [&](const ConstrainedDP& dp, double h, int n) { return full_partition(dp, psi, h, n); });
}

std::vector<FreeEnergyEstimate> estimate_g(const renewal::InterArrivalLaw& law, const std::vector<double>& rho_grid,
                                           const EstimateOptions& opt) {
  for (double rho : rho_grid)
    if (!(rho > 0.0 && rho <= 1.0)) throw DomainError("estimate_g: rho must lie in (0,1]");
  return run_estimate(law, rho_grid, opt, [](const ConstrainedDP& dp, double rho, int n) {
    const int m = std::max(1, static_cast<int>(std::lround(rho * n)));
    return dp.log_z(n, m);
  });
}

}  // namespace pinlab::dp
