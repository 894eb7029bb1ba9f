#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pinlab::potential {

struct Zero {};
/// H(ρ) = aρ + b.
struct Affine {
  double a = 0.0, b = 0.0;
};
/// H(ρ) = aρ - c_h ρ²/2, so H′(0) = a is finite with curvature c_h.
struct ConcaveQuadratic {
  double a = 0.0, c_h = 1.0;
};
/// H(ρ) = -χ(1-ρ)²/ρ.
struct Overtwist {
  double chi = 1.0;
};
/// H(ρ) = sup_ζ ψ(ζ, ρ) with twist/writhe exchange weight w.
struct Supercoil {
  double chi = 1.0, w = 1.0;
};

using Kind = std::variant<Zero, Affine, ConcaveQuadratic, Overtwist, Supercoil>;

/// Concave energy density H on [0,1].
class Potential {
 public:
  /// Throws ParameterError for non-positive chi, w or c_h.
  explicit Potential(Kind kind = Zero{});

  const Kind& kind() const { return kind_; }
  std::string name() const;

  /// H(ρ); -inf where the potential diverges. DomainError outside [0,1].
  double H(double rho) const;
  /// H′(ρ) for ρ in (0,1). DomainError at or beyond the boundary.
  double H_prime(double rho) const;

  double H_at_0() const;
  double H_at_1() const;
  double H_prime_at_0() const;  // +inf for the circular-DNA models
  std::optional<double> c_h() const;
  /// H″ ≡ 0.
  bool is_trivial() const;

 private:
  Kind kind_;
};

struct SupercoilInner {
  double zeta0 = 0.0;
  double gap = 0.0;        // ρ - ζ₀, kept separately for precision
  double psi = 0.0;        // ψ(ζ₀, ρ) = H(ρ)
  double q = 0.0;          // sqrt(ρ / (ζ₀(ρ-ζ₀)|∂²_ζψ|))
  double d2_zeta = 0.0;    // ∂²_ζψ(ζ₀, ρ)
  double dpsi_drho = 0.0;  // ∂_ρψ(ζ₀, ρ) = H′(ρ)
};

double supercoil_psi(double chi, double w, double zeta, double rho);
double supercoil_dpsi_dzeta(double chi, double w, double zeta, double rho);
double supercoil_dpsi_drho(double chi, double w, double zeta, double rho);

/// Maximizer of ψ(·, ρ) over [0, ρ] by bisection on the stationarity
/// condition, for ρ in (0,1].
SupercoilInner supercoil_inner(double chi, double w, double rho);

enum class QMode { Unit, OvertwistExact, SupercoilExact, SupercoilLaplace, Custom };

/// The full weight Ψ(m,N) = Q(m,N) exp(N H(m/N)).
class PsiFactor {
 public:
  using LogQ = std::function<double(int m, int n)>;

  /// Q ≡ 1.
  static PsiFactor unit(const Potential& p);
  /// The model's own finite-N weight: Q ≡ 1 except for Supercoil, where the
  /// binomial sum is evaluated exactly.
  static PsiFactor exact(const Potential& p);
  /// Supercoil only: N H(m/N) + log q(m/N).
  static PsiFactor laplace(const Potential& p);
  static PsiFactor custom(const Potential& p, LogQ log_q);

  const Potential& potential() const { return potential_; }
  QMode mode() const { return mode_; }

  /// DomainError unless 1 <= m <= N.
  double log_psi(int m, int n) const;
  double log_q(int m, int n) const;

 private:
  PsiFactor(Potential p, QMode mode) : potential_(std::move(p)), mode_(mode) {}

  Potential potential_;
  QMode mode_;
  LogQ custom_;
};

/// log k! for k >= 0, tabulated once and shared.
double log_factorial(int k);

struct QBoundRow {
  int n = 0;
  double max_rate = 0.0;  // max over the ρ grid of |log Q(⌊ρN⌉, N)| / N
};

/// Empirical check that log Q(m,N)/N -> 0 on compact subsets of (0,1).
struct QBoundReport {
  std::vector<QBoundRow> rows;
  bool ok = false;  // rates non-increasing in N and the last one below tol
};

QBoundReport check_q_bounds(const PsiFactor& psi, const std::vector<double>& rho_grid,
                            const std::vector<int>& sizes, double tol = 0.05);

}  // namespace pinlab::potential
