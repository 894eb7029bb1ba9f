#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>

#include "output.hpp"
#include "pinlab/error.hpp"
#include "pinlab/rng.hpp"
#include "recipes.hpp"

namespace pinlab::app {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kZ95 = 1.959963984540054;

struct Context {
  const ExperimentConfig& cfg;
  const RunOptions& ro;
  std::ostream& log;
  std::filesystem::path dir;
  CommandResult result;

  void emit(const Table& t) {
    result.files.push_back(write_table(t, dir, cfg.format));
    log << "wrote " << result.files.back().string() << "\n";
  }
};

std::vector<std::pair<std::string, Cell>> law_meta(const ExperimentConfig& cfg) {
  return {{"potential", cfg.potential.name()},
          {"q", cfg.q_mode},
          {"alpha", cfg.alpha},
          {"n_max", static_cast<long long>(cfg.n_max)},
          {"support", std::string(cfg.support == renewal::Support::Ideal ? "ideal" : "truncated")}};
}

std::vector<std::pair<std::string, Cell>> disorder_meta(const ExperimentConfig& cfg) {
  return {{"beta", cfg.beta},
          {"dist", std::string(disorder::dist_name(cfg.dist))},
          {"replicas", static_cast<long long>(cfg.beta == 0.0 ? 1 : cfg.replicas)},
          {"replica_master_seed", std::to_string(cfg.replica_master())},
          {"master_seed", std::to_string(cfg.master_seed)},
          {"extrapolation", std::string(cfg.model == dp::Extrapolation::LogNOverN ? "logN_over_N" : "one_over_N")}};
}

void append(std::vector<std::pair<std::string, Cell>>& a, const std::vector<std::pair<std::string, Cell>>& b) {
  a.insert(a.end(), b.begin(), b.end());
}

Table raw_estimates(const std::string& name, const std::vector<dp::FreeEnergyEstimate>& f, const std::string& x) {
  Table t;
  t.name = name;
  t.columns = {"N", "replica", "seed", x, "beta", "logZ_over_N"};
  for (const auto& e : f)
    for (const auto& s : e.estimates)
      t.add({static_cast<long long>(s.n), static_cast<long long>(s.replica), std::to_string(s.seed), e.x, e.beta, s.value});
  return t;
}

void add_f_rows(Table& t, const std::vector<dp::FreeEnergyEstimate>& f) {
  for (const auto& e : f) t.add({e.x, e.beta, e.extrapolated, e.stderr_});
}

std::vector<Cell> stat_cells(const stats::MeanStderr& m) {
  return {m.mean, m.stderr_, m.mean - kZ95 * m.stderr_, m.mean + kZ95 * m.stderr_};
}

const std::vector<std::string> kPathColumns = {
    "contact_frac", "contact_frac_se", "contact_frac_lo", "contact_frac_hi", "eta1_frac", "eta1_frac_se",
    "eta1_frac_lo", "eta1_frac_hi",     "eta2_frac",       "eta2_frac_se",    "eta2_frac_lo", "eta2_frac_hi"};

void cmd_phase_diagram(Context& c) {
  const auto& cfg = c.cfg;
  const auto law = cfg.law();
  const energy::GEvaluator ev(law, cfg.support);
  const auto pd = energy::phase_diagram(cfg.potential, ev, cfg.h_grid);
  Table t;
  t.name = "phase_diagram";
  t.meta = law_meta(cfg);
  t.meta.push_back({"rho_c", pd.critical.rho_c});
  t.meta.push_back({"h_c", pd.critical.h_c});
  t.meta.push_back({"h_b", pd.critical.h_b ? Cell{*pd.critical.h_b} : Cell{std::string("none")}});
  t.columns = {"h", "f_H", "f_H_reg", "rho_h", "regime", "tie"};
  for (const auto& r : pd.rows)
    t.add({r.h, r.f, r.f_reg, r.rho, std::string(energy::regime_name(r.regime)), static_cast<long long>(r.tie)});
  c.emit(t);

  if (cfg.beta > 0.0) {
    auto opt = sweep_options(cfg, c.ro.threads);
    opt.draws = 0;
    const auto s = sweep(law, cfg.psi(), opt);
    auto raw = raw_estimates("estimate_f", s.f, "h");
    raw.meta = law_meta(cfg);
    append(raw.meta, disorder_meta(cfg));
    c.emit(raw);
    Table f;
    f.name = "f_estimate";
    f.meta = raw.meta;
    f.columns = {"h", "beta", "f_hat", "stderr"};
    add_f_rows(f, s.f);
    c.emit(f);
  }
}

void cmd_bigjump_scan(Context& c) {
  const auto& cfg = c.cfg;
  if (cfg.beta != 0.0)
    throw ConfigError("disorder.beta", "bigjump-scan runs the homogeneous model; use disorder-scan for beta > 0");
  const auto law = cfg.law();
  const energy::GEvaluator ev(law, cfg.support);
  const auto crit = energy::critical_points(cfg.potential, ev);
  std::vector<double> hs;
  for (double h : cfg.h_grid)
    if (!(std::isfinite(crit.h_c) && h <= crit.h_c)) hs.push_back(h);
  if (hs.empty()) throw ConfigError("grids.h_grid", "every h lies in the delocalized phase");

  auto opt = sweep_options(cfg, c.ro.threads);
  opt.h_grid = hs;
  const auto s = sweep(law, cfg.psi(), opt);

  Table t;
  t.name = "bigjump_scan";
  t.meta = law_meta(cfg);
  t.meta.push_back({"rho_c", crit.rho_c});
  t.meta.push_back({"h_c", crit.h_c});
  t.meta.push_back({"h_b", crit.h_b ? Cell{*crit.h_b} : Cell{std::string("none")}});
  t.meta.push_back({"draws", static_cast<long long>(cfg.draws)});
  t.meta.push_back({"master_seed", std::to_string(cfg.master_seed)});
  t.columns = {"h", "N", "draws"};
  t.columns.insert(t.columns.end(), kPathColumns.begin(), kPathColumns.end());
  t.columns.insert(t.columns.end(), {"rho_h", "eta1_theory"});
  for (const auto& row : s.paths) {
    const auto lf = energy::legendre_f(cfg.potential, ev, row.h);
    const double theory = crit.rho_c > 0.0 ? std::max(0.0, 1.0 - lf.rho / crit.rho_c) : 0.0;
    std::vector<Cell> cells = {row.h, static_cast<long long>(row.n), static_cast<long long>(row.draws)};
    for (const auto* m : {&row.contact, &row.eta1, &row.eta2})
      for (auto& x : stat_cells(*m)) cells.push_back(x);
    cells.push_back(lf.rho);
    cells.push_back(theory);
    t.add(std::move(cells));
  }
  c.emit(t);
}

void cmd_disorder_scan(Context& c) {
  const auto& cfg = c.cfg;
  if (!(cfg.beta > 0.0)) throw ConfigError("disorder.beta", "disorder-scan needs beta > 0");
  const auto law = cfg.law();
  const auto psi = cfg.psi();
  auto opt = sweep_options(cfg, c.ro.threads);
  opt.fd_step = cfg.fd_step;
  const auto dis = sweep(law, psi, opt);
  auto base_opt = opt;
  base_opt.beta = 0.0;
  const auto base = sweep(law, psi, base_opt);

  const energy::GEvaluator ev(law, cfg.support);
  const auto crit = energy::critical_points(cfg.potential, ev);
  auto meta = law_meta(cfg);
  append(meta, disorder_meta(cfg));
  meta.push_back({"draws", static_cast<long long>(cfg.draws)});
  meta.push_back({"fd_step", cfg.fd_step});
  meta.push_back({"rho_c", crit.rho_c});

  Table t;
  t.name = "disorder_scan";
  t.meta = meta;
  t.columns = {"beta", "h", "N", "replicas", "draws"};
  t.columns.insert(t.columns.end(), kPathColumns.begin(), kPathColumns.end());
  t.columns.push_back("eta1_theory_beta0");
  for (const auto* s : {&base, &dis})
    for (const auto& row : s->paths) {
      const auto lf = energy::legendre_f(cfg.potential, ev, row.h);
      const double theory = crit.rho_c > 0.0 ? std::max(0.0, 1.0 - lf.rho / crit.rho_c) : 0.0;
      std::vector<Cell> cells = {row.beta, row.h, static_cast<long long>(row.n), static_cast<long long>(row.replicas),
                                 static_cast<long long>(row.draws)};
      for (const auto* m : {&row.contact, &row.eta1, &row.eta2})
        for (auto& x : stat_cells(*m)) cells.push_back(x);
      cells.push_back(theory);
      t.add(std::move(cells));
    }
  c.emit(t);

  Table f;
  f.name = "f_estimate";
  f.meta = meta;
  f.columns = {"h", "beta", "f_hat", "stderr", "dfdh", "dfdh_se", "contact_frac_Nmax", "contact_frac_Nmax_se"};
  for (const auto* s : {&base, &dis})
    for (std::size_t i = 0; i < s->f.size(); ++i) {
      const auto& e = s->f[i];
      const auto& d = s->dfdh[i];
      const auto& top = s->paths[(i + 1) * cfg.sizes.size() - 1];
      f.add({e.x, e.beta, e.extrapolated, e.stderr_, d.dfdh.mean, d.dfdh.stderr_, top.contact.mean, top.contact.stderr_});
    }
  c.emit(f);

  auto raw = raw_estimates("estimate_f", base.f, "h");
  const auto more = raw_estimates("estimate_f", dis.f, "h");
  raw.rows.insert(raw.rows.end(), more.rows.begin(), more.rows.end());
  raw.meta = meta;
  c.emit(raw);
}

void cmd_exponents(Context& c) {
  const auto& cfg = c.cfg;
  ExponentWindows w;
  const auto window = [&](const std::string& name) -> std::optional<energy::FitWindow> {
    const auto it = cfg.fit_windows.find(name);
    if (it == cfg.fit_windows.end()) return std::nullopt;
    return energy::FitWindow{it->second.first, it->second.second, 12};
  };
  w.g = window("g");
  w.pinning = window("pinning");
  w.kink = window("kink");
  w.delocalization = window("delocalization");
  Table t;
  t.name = "exponents";
  t.meta = law_meta(cfg);
  t.meta.push_back({"evaluator_support", std::string("ideal")});
  t.columns = {"name", "alpha", "exponent", "exponent_se", "expected", "ratio", "ratio_expected", "note"};
  for (const auto& r : exponent_table(cfg.alpha, cfg.n_max, cfg.potential, w))
    t.add({r.name, r.alpha, r.exponent, r.exponent_stderr, r.expected, r.ratio, r.ratio_expected, r.note});
  c.emit(t);
}

void cmd_convexity_check(Context& c) {
  const auto& cfg = c.cfg;
  if (!std::holds_alternative<potential::Zero>(cfg.potential.kind()))
    throw ConfigError("potential.kind", "convexity-check needs the pure pinning weight (kind = zero)");
  if (cfg.h_grid.size() < 3) throw ConfigError("grids.h_grid", "convexity-check needs at least 3 points");
  auto opt = sweep_options(cfg, c.ro.threads);
  opt.draws = 0;
  const auto s = sweep(cfg.law(), cfg.psi(), opt);
  const auto rep = convexity(s, cfg.model);

  Table t;
  t.name = "convexity";
  t.meta = law_meta(cfg);
  append(t.meta, disorder_meta(cfg));
  t.meta.push_back({"pass", static_cast<long long>(rep.pass)});
  t.columns = {"h", "d2f", "d2f_se", "positive_2sigma"};
  for (const auto& r : rep.rows) t.add({r.h, r.d2, r.err, static_cast<long long>(r.positive)});
  c.emit(t);
  Table f;
  f.name = "f_estimate";
  f.meta = t.meta;
  f.columns = {"h", "beta", "f_hat", "stderr"};
  add_f_rows(f, s.f);
  c.emit(f);
  c.log << "convexity: " << (rep.pass ? "PASS" : "FAIL") << "\n";
  if (!rep.pass) c.result.exit_code = 2;
}

void cmd_oracle_check(Context& c) {
  const auto& cfg = c.cfg;
  OracleOptions o;
  o.sizes = cfg.oracle_sizes;
  o.alphas = cfg.oracle_alphas;
  o.h_grid = cfg.oracle_h;
  o.tol = cfg.oracle_tol;
  o.corrupt_k = c.ro.corrupt_k;
  const auto rep = oracle_matrix(o);
  Table t;
  t.name = "oracle_check";
  t.meta = {{"tolerance", o.tol},
            {"max_partition_dev", rep.max_partition},
            {"max_sampler_dev", rep.max_sampler},
            {"max_beta0_reduction_dev", rep.max_reduction},
            {"corrupted_k", static_cast<long long>(o.corrupt_k)},
            {"pass", static_cast<long long>(rep.pass)}};
  t.columns = {"check", "potential", "alpha", "beta", "N", "h", "max_abs_dev"};
  for (const auto& r : rep.rows) t.add({r.check, r.potential, r.alpha, r.beta, static_cast<long long>(r.n), r.h, r.deviation});
  c.emit(t);
  c.log << "max |dlogZ| = " << rep.max_partition << ", max sampler law error = " << rep.max_sampler
        << ", max beta=0 reduction error = " << rep.max_reduction << "\n";
  c.log << "oracle-check: " << (rep.pass ? "PASS" : "FAIL") << "\n";
  if (!rep.pass) c.result.exit_code = 2;
}

void cmd_sample(Context& c) {
  const auto& cfg = c.cfg;
  const auto law = cfg.law();
  const auto psi = cfg.psi();
  const int n_top = cfg.sizes.back();
  const int replicas = cfg.beta == 0.0 ? 1 : (cfg.sample_replicas ? cfg.sample_replicas : cfg.replicas);
  const TableCache cache{cfg.cache_directory, cfg.limits};
  const std::uint64_t seed = derive_seed(cfg.master_seed, 0x5a3b1e);

  Table s, tail;
  s.name = "samples";
  s.meta = law_meta(cfg);
  append(s.meta, disorder_meta(cfg));
  s.columns = {"replica", "h", "N", "draw", "m", "contact_frac", "eta1_frac", "eta2_frac"};
  tail.name = "excursion_tail";
  tail.meta = s.meta;
  tail.columns = {"replica", "h", "N", "gamma", "exceed", "draws", "p_hat", "ci_lo", "ci_hi", "p_exact"};
  std::ofstream contacts;
  if (n_top <= 64) {
    std::filesystem::create_directories(c.dir);
    contacts.open(c.dir / "contacts.jsonl", std::ios::binary);
  }

  for (int r = 0; r < replicas; ++r) {
    std::optional<disorder::DisorderField> field;
    if (cfg.beta > 0.0)
      field = disorder::DisorderField::generate(cfg.dist, n_top, disorder::replica_seed(cfg.replica_master(), r), cfg.beta);
    const auto dp = load_or_build(law, n_top, field, cache);
    const auto ri = static_cast<std::uint64_t>(r);
    for (std::size_t i = 0; i < cfg.h_grid.size(); ++i)
      for (std::size_t k = 0; k < cfg.sizes.size(); ++k) {
        const double h = cfg.h_grid[i];
        const int n = cfg.sizes[k];
        const sampler::GibbsSampler gs(dp, psi, h, n);
        const auto draws = sampler::sample_many(gs, cfg.draws, derive_seed(derive_seed(seed, ri), i * 4096 + k), c.ro.threads);
        for (std::size_t d = 0; d < draws.size(); ++d) {
          const auto o = observables(draws[d]);
          s.add({static_cast<long long>(r), h, static_cast<long long>(n), static_cast<long long>(d),
                 static_cast<long long>(draws[d].m), o.contact_frac, o.eta1_frac, o.eta2_frac});
          if (contacts.is_open()) {
            contacts << "{\"replica\":" << r << ",\"h\":" << format_number(h) << ",\"N\":" << n << ",\"draw\":" << d
                     << ",\"contacts\":[";
            for (std::size_t j = 0; j < draws[d].contacts.size(); ++j) contacts << (j ? "," : "") << draws[d].contacts[j];
            contacts << "]}\n";
          }
        }
        const auto curve = sampler::excursion_tail_curve(draws, cfg.gamma_grid);
        std::vector<double> exact(cfg.gamma_grid.size(), kNaN);
        if (n <= 2048) {
          const auto lt = sampler::exact_log_excursion_tail(dp, psi, h, n, cfg.gamma_grid);
          for (std::size_t g = 0; g < lt.size(); ++g) exact[g] = std::exp(lt[g]);
        }
        for (std::size_t g = 0; g < curve.size(); ++g)
          tail.add({static_cast<long long>(r), h, static_cast<long long>(n), curve[g].gamma,
                    static_cast<long long>(curve[g].exceed), static_cast<long long>(curve[g].draws), curve[g].p_hat,
                    curve[g].ci.lo, curve[g].ci.hi, exact[g]});
      }
  }
  c.emit(s);
  c.emit(tail);
  if (contacts.is_open()) c.result.files.push_back(c.dir / "contacts.jsonl");
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"phase-diagram",   "bigjump-scan", "disorder-scan", "exponents",
                                                 "convexity-check", "oracle-check", "sample"};
  return names;
}

CommandResult run_command(const std::string& name, const ExperimentConfig& cfg, const RunOptions& ro, std::ostream& log) {
  Context c{cfg, ro, log, ro.out.empty() ? cfg.directory : ro.out, {}};
  static const std::map<std::string, void (*)(Context&)> table = {
      {"phase-diagram", cmd_phase_diagram}, {"bigjump-scan", cmd_bigjump_scan},
      {"disorder-scan", cmd_disorder_scan}, {"exponents", cmd_exponents},
      {"convexity-check", cmd_convexity_check}, {"oracle-check", cmd_oracle_check},
      {"sample", cmd_sample}};
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("command", "unknown subcommand '" + name + "'");
  it->second(c);
  return c.result;
}

}  // namespace pinlab::app
