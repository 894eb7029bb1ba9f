#include "pinlab/free_energy.hpp"

#include <cmath>
#include <limits>

#include "pinlab/error.hpp"
#include "pinlab/logspace.hpp"
#include "pinlab/stats.hpp"

namespace pinlab::energy {

namespace {

constexpr double kLogXMin = -200.0;
constexpr double kLogXMax = std::log(700.0);

// Largest ρ in [lo, hi] with h + H′(ρ) >= 0, by bisection on interior points.
double concave_argmax(const potential::Potential& p, double h, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (h + p.H_prime(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// log E[e^{-xη}] accurate both near 0 and for large tilts.
double log_l0(const renewal::LaplaceMoments& m) { return m.l0 < 0.5 ? std::log(m.l0) : std::log1p(-m.one_minus_l0); }

bool is_log_corrected(double alpha) { return alpha == 1.0 || alpha == 2.0; }

}  // namespace

GEvaluator::GEvaluator(renewal::InterArrivalLaw law, Support support) : law_(std::move(law)), support_(support) {
  if (support_ == Support::Ideal && !law_.is_pure_power_law())
    throw ParameterError("g evaluator: ideal support needs a pure power law");
}

GEvaluator::Point GEvaluator::at_tilt(double x) const {
  const auto mom = law_.laplace(x, support_);
  Point pt;
  pt.x = x;
  pt.rho = std::isinf(mom.l1) ? 0.0 : mom.l0 / mom.l1;
  pt.g_prime = log_l0(mom);
  pt.g = x + pt.rho * pt.g_prime;
  return pt;
}

GValue GEvaluator::operator()(double rho) const {
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("g: rho must lie in [0,1]");
  if (rho <= rho_c()) return {0.0, 0.0, 0.0};
  if (rho == 1.0) return {log_k1(), kNegInf, kPosInf};
  // ρ(x) = 1/E_x[η] increases from ρ_c to 1 as x runs over (0, ∞).
  double lo = kLogXMin, hi = 0.0;
  while (at_tilt(std::exp(hi)).rho < rho && hi < kLogXMax) hi += 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (at_tilt(std::exp(mid)).rho < rho)
      lo = mid;
    else
      hi = mid;
  }
  const double x = std::exp(0.5 * (lo + hi));
  const auto mom = law_.laplace(x, support_);
  const double gp = log_l0(mom);
  return {x + rho * gp, gp, x};
}

CriticalPoints critical_points(const potential::Potential& p, const GEvaluator& ev) {
  CriticalPoints cp;
  cp.rho_c = ev.rho_c();
  cp.h_c = -p.H_prime_at_0();
  if (cp.rho_c > 0.0) cp.h_b = p.is_trivial() ? cp.h_c : -p.H_prime(cp.rho_c);
  return cp;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Delocalized:
      return "delocalized";
    case Regime::BigJump:
      return "big-jump-localized";
    case Regime::FullyLocalized:
      return "fully-localized";
  }
  return "?";
}

LegendreResult legendre_f(const potential::Potential& p, const GEvaluator& ev, double h) {
  const auto cp = critical_points(p, ev);
  LegendreResult out;
  out.h = h;
  if (std::isfinite(cp.h_c) && h <= cp.h_c)
    out.regime = Regime::Delocalized;
  else if (cp.h_b && h <= *cp.h_b)
    out.regime = Regime::BigJump;
  else
    out.regime = Regime::FullyLocalized;

  const double rc = cp.rho_c;
  const auto at_rho = [&](double rho) {
    out.rho = rho;
    out.f = h * rho + p.H(rho) + ev(rho).g;
    return out;
  };

  if (p.is_trivial()) {
    const double s = h + p.H_prime_at_0();
    if (s < 0.0 || (s == 0.0 && rc == 0.0)) return at_rho(0.0);
    if (s == 0.0) {
      out.tie = true;
      return at_rho(rc);
    }
  } else {
    if (std::isfinite(cp.h_c) && h <= cp.h_c) return at_rho(0.0);
    if (rc > 0.0 && h + p.H_prime(rc) <= 0.0) return at_rho(concave_argmax(p, h, 0.0, rc));
  }

  // Beyond ρ_c, parametrize by the tilt: ρ(x) = L0/L1 and g′ = log L0 are
  // both monotone in x, so h + H′(ρ(x)) + g′ has a single sign change.
  const auto slope = [&](double t) {
    const auto pt = ev.at_tilt(std::exp(t));
    if (pt.rho >= 1.0) return kNegInf;
    if (pt.rho <= 0.0) return kPosInf;
    return h + p.H_prime(pt.rho) + pt.g_prime;
  };
  double lo = kLogXMin, hi = 0.0;
  if (slope(lo) <= 0.0) {
    out.diagnostic = "maximizer below the smallest resolvable tilt";
    const auto pt = ev.at_tilt(std::exp(lo));
    out.rho = pt.rho;
    out.f = h * pt.rho + p.H(pt.rho) + pt.g;
    return out;
  }
  while (slope(hi) > 0.0) {
    if (hi >= kLogXMax) {
      out.diagnostic = "maximizer at the rho = 1 resolution limit";
      break;
    }
    lo = hi;
    hi += 1.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (slope(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const auto pt = ev.at_tilt(std::exp(0.5 * (lo + hi)));
  out.rho = pt.rho;
  out.f = h * pt.rho + p.H(pt.rho) + pt.g;
  return out;
}

double f_reg(const potential::Potential& p, double h, double* rho) {
  double r;
  if (p.is_trivial()) {
    r = h + p.H_prime_at_0() > 0.0 ? 1.0 : 0.0;
  } else if (std::isfinite(p.H_prime_at_0()) && h + p.H_prime_at_0() <= 0.0) {
    r = 0.0;
  } else {
    r = concave_argmax(p, h, 0.0, 1.0);
    if (r > 1.0 - 1e-15) r = 1.0;
  }
  if (rho) *rho = r;
  return h * r + p.H(r);
}

PhaseDiagram phase_diagram(const potential::Potential& p, const GEvaluator& ev, const std::vector<double>& h_grid) {
  PhaseDiagram pd;
  pd.potential = p.name();
  pd.alpha = ev.law().alpha();
  pd.critical = critical_points(p, ev);
  for (double h : h_grid) {
    const auto r = legendre_f(p, ev, h);
    pd.rows.push_back({h, r.f, f_reg(p, h), r.rho, r.regime, r.tie});
  }
  return pd;
}

double conjugate_g(const potential::Potential& p, const GEvaluator& ev, double rho, double h_lo, double h_hi) {
  const double hr = p.H(rho);
  const auto obj = [&](double h) { return legendre_f(p, ev, h).f - rho * h - hr; };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = h_lo, b = h_hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = obj(c), fd = obj(d);
  while (b - a > 1e-10 * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = obj(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = obj(d);
    }
  }
  return std::min(fc, fd);
}

double kappa(double alpha) { return std::max(alpha / (alpha - 1.0), 2.0); }

namespace {

ExponentFit finish_fit(std::vector<double> x, std::vector<double> y, const char* what) {
  for (double v : y)
    if (!(v > 0.0) || !std::isfinite(v))
      throw FitWindowError(std::string(what) + ": fit window reaches values below numerical resolution");
  ExponentFit out;
  const auto fit = stats::fit_power_law(x, y);
  out.exponent = fit.slope;
  out.exponent_stderr = fit.slope_stderr;
  out.x = std::move(x);
  out.y = std::move(y);
  out.ratio = std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace

ExponentFit g_exponent(const GEvaluator& ev, std::optional<FitWindow> window) {
  const double alpha = ev.law().alpha();
  if (is_log_corrected(alpha))
    throw FitWindowError("g exponent: logarithmic corrections at alpha = 1 and 2 are not fitted");
  const double rc = ev.rho_c();
  std::vector<double> xs, ys;
  if (alpha > 1.0) {
    const FitWindow w = window.value_or(FitWindow{1e-4, 1e-2, 12});
    if (rc + w.hi >= 1.0) throw FitWindowError("g exponent: window exceeds rho = 1");
    for (double d : stats::geometric_grid(w.lo, w.hi, w.points)) {
      xs.push_back(d);
      ys.push_back(-ev(rc + d).g);
    }
  } else {
    const FitWindow w = window.value_or(FitWindow{1e-3, 1e-1, 12});
    if (rc >= w.lo)
      throw FitWindowError("g exponent: truncated rho_c = " + std::to_string(rc) + " covers the window start");
    for (double r : stats::geometric_grid(w.lo, w.hi, w.points)) {
      xs.push_back(r);
      ys.push_back(-ev(r).g);
    }
  }
  return finish_fit(std::move(xs), std::move(ys), "g exponent");
}

ExponentFit pinning_exponent(const GEvaluator& ev, FitWindow window) {
  if (ev.law().alpha() == 1.0) throw FitWindowError("pinning exponent: logarithmic correction at alpha = 1");
  const potential::Potential zero;
  std::vector<double> xs, ys;
  for (double h : stats::geometric_grid(window.lo, window.hi, window.points)) {
    xs.push_back(h);
    ys.push_back(legendre_f(zero, ev, h).f);
  }
  const double ratio = ys.front() / xs.front();
  auto out = finish_fit(std::move(xs), std::move(ys), "pinning exponent");
  out.ratio = ratio;
  return out;
}

ExponentFit kink_exponent(const potential::Potential& p, const GEvaluator& ev, FitWindow window) {
  const auto cp = critical_points(p, ev);
  if (!cp.h_b) throw FitWindowError("kink exponent: no big-jump point (rho_c = 0)");
  if (ev.law().alpha() == 2.0) throw FitWindowError("kink exponent: logarithmic correction at alpha = 2");
  std::vector<double> xs, ys;
  for (double d : stats::geometric_grid(window.lo, window.hi, window.points)) {
    const double h = *cp.h_b + d;
    xs.push_back(d);
    ys.push_back(f_reg(p, h) - legendre_f(p, ev, h).f);
  }
  return finish_fit(std::move(xs), std::move(ys), "kink exponent");
}

ExponentFit delocalization_exponent(const potential::Potential& p, const GEvaluator& ev, FitWindow window) {
  const auto cp = critical_points(p, ev);
  if (!std::isfinite(cp.h_c)) throw FitWindowError("delocalization exponent: h_c = -inf");
  const double h0 = p.H_at_0();
  std::vector<double> xs, ys;
  for (double d : stats::geometric_grid(window.lo, window.hi, window.points)) {
    xs.push_back(d);
    ys.push_back(legendre_f(p, ev, cp.h_c + d).f - h0);
  }
  const double ratio = p.c_h() ? ys.front() * 2.0 * *p.c_h() / (xs.front() * xs.front())
                               : std::numeric_limits<double>::quiet_NaN();
  auto out = finish_fit(std::move(xs), std::move(ys), "delocalization exponent");
  out.ratio = ratio;
  return out;
}

}  // namespace pinlab::energy
