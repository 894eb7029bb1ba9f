#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pinlab/potentials.hpp"
#include "pinlab/renewal.hpp"

namespace pinlab::energy {

using renewal::Support;

struct GValue {
  double g = 0.0;
  double g_prime = 0.0;
  double x = 0.0;  // minimizer x_ρ; +inf at ρ = 1
};

/// g(ρ) = inf_{x>=0} (x + ρ log E[e^{-xη}]) for one inter-arrival law.
class GEvaluator {
 public:
  explicit GEvaluator(renewal::InterArrivalLaw law, Support support = Support::Truncated);

  const renewal::InterArrivalLaw& law() const { return law_; }
  Support support() const { return support_; }
  double rho_c() const { return law_.rho_c(support_); }
  double log_k1() const { return law_.log_k1(support_); }

  /// DomainError outside [0,1].
  GValue operator()(double rho) const;

  /// The density whose minimizer is x > 0, together with g and g′ there.
  struct Point {
    double x = 0.0, rho = 0.0, g = 0.0, g_prime = 0.0;
  };
  Point at_tilt(double x) const;

 private:
  renewal::InterArrivalLaw law_;
  Support support_;
};

struct CriticalPoints {
  double h_c = 0.0;            // -H′(0); -inf when H′(0) = +inf
  std::optional<double> h_b;   // -H′(ρ_c), only when ρ_c > 0
  double rho_c = 0.0;
};

CriticalPoints critical_points(const potential::Potential& p, const GEvaluator& ev);

enum class Regime { Delocalized, BigJump, FullyLocalized };
const char* regime_name(Regime r);

struct LegendreResult {
  double h = 0.0;
  double f = 0.0;
  double rho = 0.0;
  Regime regime = Regime::FullyLocalized;
  /// Trivial H exactly at h_c: every ρ in [0, ρ_c] is a maximizer and ρ is
  /// reported as the right limit ρ_c.
  bool tie = false;
  std::string diagnostic;  // non-empty if the maximizer hit a numerical boundary
};

/// f_H(h) = sup_ρ (hρ + H(ρ) + g(ρ)) and its maximizer ρ_h.
LegendreResult legendre_f(const potential::Potential& p, const GEvaluator& ev, double h);

/// f_H^reg(h) = sup_ρ (hρ + H(ρ)); the maximizer is stored in *rho when given.
double f_reg(const potential::Potential& p, double h, double* rho = nullptr);

struct PhaseRow {
  double h = 0.0, f = 0.0, f_reg = 0.0, rho = 0.0;
  Regime regime = Regime::FullyLocalized;
  bool tie = false;
};

struct PhaseDiagram {
  std::string potential;
  double alpha = 0.0;
  CriticalPoints critical;
  std::vector<PhaseRow> rows;
};

PhaseDiagram phase_diagram(const potential::Potential& p, const GEvaluator& ev, const std::vector<double>& h_grid);

/// ĝ(ρ) = inf_h (f_H(h) - ρh - H(ρ)) by golden section over [h_lo, h_hi].
double conjugate_g(const potential::Potential& p, const GEvaluator& ev, double rho, double h_lo, double h_hi);

/// κ = max(α/(α-1), 2).
double kappa(double alpha);

struct FitWindow {
  double lo = 0.0, hi = 0.0;
  int points = 12;
};

struct ExponentFit {
  double exponent = 0.0;
  double exponent_stderr = 0.0;
  std::vector<double> x, y;
  /// Auxiliary limit read at the small end of the window (f/h for the pinning
  /// fit, (f - H(0))·2c_H/δh² for the delocalization fit); NaN otherwise.
  double ratio = 0.0;
};

/// Slope of -g against ρ - ρ_c (α > 1, default window [1e-4, 1e-2]) or
/// against ρ (α < 1, default window [1e-3, 1e-1]). FitWindowError for α in
/// {1, 2} or when truncation leaves the window inside [0, ρ_c].
ExponentFit g_exponent(const GEvaluator& ev, std::optional<FitWindow> window = std::nullopt);

/// Slope of f(0,h) against h for the pure pinning model, default window
/// [1e-4, 1e-2]; ratio is f/h at the small end.
ExponentFit pinning_exponent(const GEvaluator& ev, FitWindow window = {1e-4, 1e-2, 12});

/// Slope of f_reg - f against h - h_b, default window [1e-3, 1e-1].
ExponentFit kink_exponent(const potential::Potential& p, const GEvaluator& ev, FitWindow window = {1e-3, 1e-1, 12});

/// Slope of f - H(0) against h - h_c, default window [1e-3, 1e-1].
ExponentFit delocalization_exponent(const potential::Potential& p, const GEvaluator& ev,
                                    FitWindow window = {1e-3, 1e-1, 12});

}  // namespace pinlab::energy
