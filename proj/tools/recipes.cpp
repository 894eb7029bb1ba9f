#include "recipes.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>

#include "pinlab/error.hpp"
#include "pinlab/logspace.hpp"
#include "pinlab/parallel.hpp"
#include "pinlab/rng.hpp"

namespace pinlab::app {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string hex_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

stats::MeanStderr across(const std::vector<double>& per_replica, const std::vector<double>& pooled) {
  // Replica spread is the honest error for quenched averages; a single
  // replica falls back to the spread over its draws.
  return per_replica.size() > 1 ? stats::mean_stderr(per_replica) : stats::mean_stderr(pooled);
}

}  // namespace

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

dp::ConstrainedDP load_or_build(const renewal::InterArrivalLaw& law, int n,
                                const std::optional<disorder::DisorderField>& field, const TableCache& cache) {
  if (cache.dir.empty()) return dp::ConstrainedDP::build(law, n, field, cache.limits);
  std::string key = "alpha=" + hex_double(law.alpha()) + ";n_max=" + std::to_string(law.n_max()) +
                    ";N=" + std::to_string(n);
  if (field)
    key += ";dist=" + std::string(disorder::dist_name(field->dist())) + ";beta=" + hex_double(field->beta()) +
           ";seed=" + std::to_string(field->seed());
  char name[40];
  std::snprintf(name, sizeof name, "table-%016llx.bin", static_cast<unsigned long long>(fnv1a(key)));
  const auto path = cache.dir / name;
  if (std::filesystem::exists(path)) {
    try {
      std::ifstream in(path, std::ios::binary);
      auto dp = dp::ConstrainedDP::load(in, law);
      const bool same_field = field ? (dp.field() && dp.field()->seed() == field->seed() &&
                                       dp.beta() == field->beta() && dp.field()->dist() == field->dist())
                                    : !dp.field();
      if (dp.size() == n && same_field) return dp;
    } catch (const Error&) {
      // A damaged or foreign file is rebuilt below.
    }
  }
  auto dp = dp::ConstrainedDP::build(law, n, field, cache.limits);
  std::filesystem::create_directories(cache.dir);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    dp.save(out);
  }
  std::filesystem::rename(tmp, path);
  return dp;
}

OracleReport oracle_matrix(const OracleOptions& opt) {
  using potential::Potential;
  const std::vector<Potential> pots = {Potential{potential::Zero{}}, Potential{potential::Affine{0.5, -0.2}},
                                       Potential{potential::Overtwist{1.0}}, Potential{potential::Supercoil{1.0, 1.0}}};
  OracleReport rep;
  int n_top = 1;
  for (int n : opt.sizes) n_top = std::max(n_top, n);
  const auto field = disorder::DisorderField::generate(disorder::Dist::Gaussian, n_top, opt.seed, 1.0);

  for (double alpha : opt.alphas) {
    const auto law = renewal::build_power_law(alpha, std::max(n_top, 64));
    auto dp_law = law;
    if (opt.corrupt_k) {
      std::vector<double> m(law.masses().begin() + 1, law.masses().end());
      for (auto& x : m) x *= 1.05;
      dp_law = renewal::InterArrivalLaw::from_masses(alpha, std::move(m), false);
    }

    const auto hom = dp::ConstrainedDP::build(dp_law, n_top);
    const auto ref = renewal::renewal_mass_table(law, n_top);
    double red = 0.0;
    for (int n = 1; n <= n_top; ++n)
      for (int m = 1; m <= n; ++m) red = std::max(red, std::abs(hom.log_z(n, m) - ref.at(m, n)));
    rep.rows.push_back({"beta0_reduction", "-", alpha, 0.0, 0.0, n_top, red});
    rep.max_reduction = std::max(rep.max_reduction, red);

    for (double beta : {0.0, 1.0}) {
      const auto dp = beta == 0.0 ? hom : dp::ConstrainedDP::build(dp_law, n_top, field);
      const disorder::DisorderField* fp = beta == 0.0 ? nullptr : &field;
      for (const auto& p : pots) {
        const auto psi = potential::PsiFactor::exact(p);
        for (int n : opt.sizes)
          for (double h : opt.h_grid) {
            const auto br = dp::brute_force_oracle(law, psi, fp, h, n);
            const double dz = std::abs(dp::full_partition(dp, psi, h, n) - br.log_z);
            rep.rows.push_back({"partition", p.name(), alpha, beta, h, n, dz});
            rep.max_partition = std::max(rep.max_partition, dz);

            const sampler::GibbsSampler s(dp, psi, h, n);
            double ds = 0.0;
            for (const auto& [mask, prob] : br.probability) {
              std::vector<int> c;
              for (int i = 1; i <= n; ++i)
                if (mask >> (i - 1) & 1U) c.push_back(i);
              ds = std::max(ds, std::abs(std::exp(s.log_probability(c)) - prob));
            }
            rep.rows.push_back({"sampler_law", p.name(), alpha, beta, h, n, ds});
            rep.max_sampler = std::max(rep.max_sampler, ds);
          }
      }
    }
  }
  rep.pass = rep.max_partition <= opt.tol && rep.max_sampler <= opt.tol && rep.max_reduction <= opt.tol;
  return rep;
}

SweepResult sweep(const renewal::InterArrivalLaw& law, const potential::PsiFactor& psi, const SweepOptions& opt) {
  if (opt.h_grid.empty() || opt.sizes.empty()) throw ParameterError("sweep: empty grid");
  if (opt.replicas < 1) throw ParameterError("sweep: replicas must be >= 1");
  const int replicas = opt.beta == 0.0 ? 1 : opt.replicas;
  const int sampled = std::min(replicas, opt.draws > 0 ? std::max(opt.sample_replicas, 0) : 0);
  const int n_top = opt.sizes.back();
  const std::size_t nh = opt.h_grid.size(), ns = opt.sizes.size();

  // [replica][h][size]
  std::vector<std::vector<std::vector<double>>> logz(static_cast<std::size_t>(replicas));
  std::vector<std::vector<double>> deriv(static_cast<std::size_t>(replicas));
  std::vector<std::vector<std::vector<std::vector<double>>>> draws_c(static_cast<std::size_t>(replicas)),
      draws_e1(static_cast<std::size_t>(replicas)), draws_e2(static_cast<std::size_t>(replicas));

  const int inner_threads = replicas == 1 ? opt.threads : 1;
  parallel_for(replicas, opt.threads, [&](int r) {
    std::optional<disorder::DisorderField> field;
    if (opt.beta > 0.0)
      field = disorder::DisorderField::generate(opt.dist, n_top, disorder::replica_seed(opt.replica_master, r), opt.beta);
    const auto dp = load_or_build(law, n_top, field, opt.cache);
    const auto ri = static_cast<std::size_t>(r);

    auto& lz = logz[ri];
    lz.assign(nh, std::vector<double>(ns));
    for (std::size_t i = 0; i < nh; ++i)
      for (std::size_t s = 0; s < ns; ++s)
        lz[i][s] = dp::full_partition(dp, psi, opt.h_grid[i], opt.sizes[s]) / opt.sizes[s];

    if (opt.fd_step > 0.0) {
      for (double h : opt.h_grid) {
        std::vector<double> up(ns), down(ns);
        for (std::size_t s = 0; s < ns; ++s) {
          up[s] = dp::full_partition(dp, psi, h + opt.fd_step, opt.sizes[s]) / opt.sizes[s];
          down[s] = dp::full_partition(dp, psi, h - opt.fd_step, opt.sizes[s]) / opt.sizes[s];
        }
        deriv[ri].push_back((dp::extrapolate(opt.sizes, up, opt.model) - dp::extrapolate(opt.sizes, down, opt.model)) /
                            (2.0 * opt.fd_step));
      }
    }

    if (r < sampled) {
      draws_c[ri].assign(nh, std::vector<std::vector<double>>(ns));
      draws_e1[ri] = draws_c[ri];
      draws_e2[ri] = draws_c[ri];
      for (std::size_t i = 0; i < nh; ++i)
        for (std::size_t s = 0; s < ns; ++s) {
          const sampler::GibbsSampler gs(dp, psi, opt.h_grid[i], opt.sizes[s]);
          const std::uint64_t seed = derive_seed(derive_seed(opt.sample_seed, ri), i * 4096 + s);
          for (const auto& p : sampler::sample_many(gs, opt.draws, seed, inner_threads)) {
            const auto o = observables(p);
            draws_c[ri][i][s].push_back(o.contact_frac);
            draws_e1[ri][i][s].push_back(o.eta1_frac);
            draws_e2[ri][i][s].push_back(o.eta2_frac);
          }
        }
    }
  });

  SweepResult out;
  for (std::size_t i = 0; i < nh; ++i) {
    dp::FreeEnergyEstimate e;
    e.x = opt.h_grid[i];
    e.beta = opt.beta;
    for (int r = 0; r < replicas; ++r) {
      const auto& v = logz[static_cast<std::size_t>(r)][i];
      const std::uint64_t seed = opt.beta == 0.0 ? 0 : disorder::replica_seed(opt.replica_master, r);
      for (std::size_t s = 0; s < ns; ++s) e.estimates.push_back({opt.sizes[s], r, seed, v[s]});
      e.per_replica.push_back(dp::extrapolate(opt.sizes, v, opt.model));
    }
    const auto ms = stats::mean_stderr(e.per_replica);
    e.extrapolated = ms.mean;
    e.stderr_ = ms.stderr_;
    out.f.push_back(std::move(e));

    if (opt.fd_step > 0.0) {
      DerivativeRow d;
      d.h = opt.h_grid[i];
      for (int r = 0; r < replicas; ++r) d.per_replica.push_back(deriv[static_cast<std::size_t>(r)][i]);
      d.dfdh = stats::mean_stderr(d.per_replica);
      out.dfdh.push_back(std::move(d));
    }

    if (sampled > 0)
      for (std::size_t s = 0; s < ns; ++s) {
        PathRow row;
        row.beta = opt.beta;
        row.h = opt.h_grid[i];
        row.n = opt.sizes[s];
        row.replicas = sampled;
        row.draws = opt.draws;
        std::vector<double> pc, p1, p2, r2;
        for (int r = 0; r < sampled; ++r) {
          const auto ri = static_cast<std::size_t>(r);
          const auto& c = draws_c[ri][i][s];
          const auto& e1 = draws_e1[ri][i][s];
          const auto& e2 = draws_e2[ri][i][s];
          row.contact_by_replica.push_back(stats::mean_stderr(c).mean);
          row.eta1_by_replica.push_back(stats::mean_stderr(e1).mean);
          r2.push_back(stats::mean_stderr(e2).mean);
          pc.insert(pc.end(), c.begin(), c.end());
          p1.insert(p1.end(), e1.begin(), e1.end());
          p2.insert(p2.end(), e2.begin(), e2.end());
        }
        row.contact = across(row.contact_by_replica, pc);
        row.eta1 = across(row.eta1_by_replica, p1);
        row.eta2 = across(r2, p2);
        out.paths.push_back(std::move(row));
      }
  }
  return out;
}

ConvexityReport convexity(const SweepResult& s, dp::Extrapolation model) {
  if (s.f.size() < 3) throw ParameterError("convexity: the h grid needs at least 3 points");
  ConvexityReport rep;
  rep.pass = true;
  const std::size_t replicas = s.f.front().per_replica.size();

  // Extrapolation-fit stderr per grid point, used when there is one replica.
  std::vector<double> fit_err;
  for (const auto& e : s.f) {
    std::vector<double> x, y, w;
    for (const auto& est : e.estimates) {
      const double n = est.n;
      x.push_back(model == dp::Extrapolation::LogNOverN ? std::log(n) / n : 1.0 / n);
      y.push_back(est.value);
      w.push_back(n);
    }
    fit_err.push_back(x.size() > 2 ? stats::fit_line(x, y, w).intercept_stderr : 0.0);
  }

  for (std::size_t i = 1; i + 1 < s.f.size(); ++i) {
    ConvexityRow row;
    row.h = s.f[i].x;
    const double dl = s.f[i].x - s.f[i - 1].x, dr = s.f[i + 1].x - s.f[i].x;
    // Non-uniform three-point second derivative.
    const auto d2 = [&](double a, double b, double c) { return 2.0 * (a / (dl * (dl + dr)) - b / (dl * dr) + c / (dr * (dl + dr))); };
    if (replicas > 1) {
      std::vector<double> per;
      for (std::size_t r = 0; r < replicas; ++r)
        per.push_back(d2(s.f[i - 1].per_replica[r], s.f[i].per_replica[r], s.f[i + 1].per_replica[r]));
      const auto ms = stats::mean_stderr(per);
      row.d2 = ms.mean;
      row.err = ms.stderr_;
    } else {
      row.d2 = d2(s.f[i - 1].extrapolated, s.f[i].extrapolated, s.f[i + 1].extrapolated);
      const double a = 2.0 / (dl * (dl + dr)), b = 2.0 / (dl * dr), c = 2.0 / (dr * (dl + dr));
      row.err = std::sqrt(std::pow(a * fit_err[i - 1], 2) + std::pow(b * fit_err[i], 2) + std::pow(c * fit_err[i + 1], 2));
    }
    row.positive = row.d2 - 2.0 * row.err > 0.0;
    rep.pass = rep.pass && row.positive;
    rep.rows.push_back(row);
  }
  return rep;
}

std::vector<ExponentRow> exponent_table(double alpha, int n_max, const potential::Potential& p,
                                        const ExponentWindows& w) {
  const auto law = renewal::build_power_law(alpha, n_max);
  const energy::GEvaluator ev(law, renewal::Support::Ideal);
  const double kap = alpha > 1.0 ? energy::kappa(alpha) : kNaN;
  std::vector<ExponentRow> out;

  const auto record = [&](const std::string& name, double expected, double ratio_expected, auto&& fit) {
    ExponentRow row;
    row.name = name;
    row.alpha = alpha;
    row.expected = expected;
    row.ratio_expected = ratio_expected;
    row.exponent = row.exponent_stderr = row.ratio = kNaN;
    try {
      const energy::ExponentFit f = fit();
      row.exponent = f.exponent;
      row.exponent_stderr = f.exponent_stderr;
      row.ratio = f.ratio;
    } catch (const Error& e) {
      row.note = e.what();
    }
    out.push_back(std::move(row));
  };

  record("g_near_rho_c", alpha > 1.0 ? kap : 1.0 / (1.0 - alpha), kNaN, [&] { return energy::g_exponent(ev, w.g); });
  record("pinning", std::max(1.0, 1.0 / alpha), alpha > 1.0 ? law.rho_c_ideal() : kNaN,
         [&] { return w.pinning ? energy::pinning_exponent(ev, *w.pinning) : energy::pinning_exponent(ev); });

  const auto crit = energy::critical_points(p, ev);
  if (crit.h_b)
    record("kink_at_h_b", kap, kNaN,
           [&] { return w.kink ? energy::kink_exponent(p, ev, *w.kink) : energy::kink_exponent(p, ev); });
  if (std::isfinite(crit.h_c) && !p.is_trivial()) {
    const bool quadratic = alpha > 0.5;
    record("delocalization", std::max(2.0, 1.0 / alpha), quadratic ? 1.0 : kNaN, [&] {
      return w.delocalization ? energy::delocalization_exponent(p, ev, *w.delocalization)
                              : energy::delocalization_exponent(p, ev);
    });
  }
  return out;
}

SweepOptions sweep_options(const ExperimentConfig& cfg, int threads) {
  SweepOptions o;
  o.h_grid = cfg.h_grid;
  o.sizes = cfg.sizes;
  o.beta = cfg.beta;
  o.dist = cfg.dist;
  o.replicas = cfg.replicas;
  o.sample_replicas = cfg.sample_replicas ? cfg.sample_replicas : cfg.replicas;
  o.draws = cfg.draws;
  o.replica_master = cfg.replica_master();
  o.sample_seed = derive_seed(cfg.master_seed, 0x5a3b1e);
  o.model = cfg.model;
  o.threads = threads;
  o.cache = {cfg.cache_directory, cfg.limits};
  return o;
}

}  // namespace pinlab::app
