#include "pinlab/potentials.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

#include "pinlab/error.hpp"
#include "pinlab/logspace.hpp"

namespace pinlab::potential {

namespace {

template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

// x log x with the removable singularity at 0.
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

void check_unit(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("H: rho must lie in [0,1]");
}

}  // namespace

Potential::Potential(Kind kind) : kind_(kind) {
  std::visit(Overload{[](const Zero&) {}, [](const Affine&) {},
                      [](const ConcaveQuadratic& p) {
                        if (!(p.c_h > 0.0)) throw ParameterError("concave quadratic: c_H must be > 0");
                      },
                      [](const Overtwist& p) {
                        if (!(p.chi > 0.0)) throw ParameterError("overtwist: chi must be > 0");
                      },
                      [](const Supercoil& p) {
                        if (!(p.chi > 0.0)) throw ParameterError("supercoil: chi must be > 0");
                        if (!(p.w > 0.0)) throw ParameterError("supercoil: w must be > 0");
                      }},
             kind_);
}

std::string Potential::name() const {
  std::ostringstream os;
  std::visit(Overload{[&](const Zero&) { os << "zero"; },
                      [&](const Affine& p) { os << "affine(a=" << p.a << ",b=" << p.b << ")"; },
                      [&](const ConcaveQuadratic& p) { os << "concave_quadratic(a=" << p.a << ",c_H=" << p.c_h << ")"; },
                      [&](const Overtwist& p) { os << "overtwist(chi=" << p.chi << ")"; },
                      [&](const Supercoil& p) { os << "supercoil(chi=" << p.chi << ",w=" << p.w << ")"; }},
             kind_);
  return os.str();
}

double Potential::H(double rho) const {
  check_unit(rho);
  return std::visit(Overload{[](const Zero&) { return 0.0; },
                             [&](const Affine& p) { return p.a * rho + p.b; },
                             [&](const ConcaveQuadratic& p) { return p.a * rho - 0.5 * p.c_h * rho * rho; },
                             [&](const Overtwist& p) {
                               return rho == 0.0 ? kNegInf : -p.chi * (1.0 - rho) * (1.0 - rho) / rho;
                             },
                             [&](const Supercoil& p) {
                               return rho == 0.0 ? kNegInf : supercoil_inner(p.chi, p.w, rho).psi;
                             }},
                    kind_);
}

double Potential::H_prime(double rho) const {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("H': rho must lie in (0,1)");
  return std::visit(Overload{[](const Zero&) { return 0.0; }, [](const Affine& p) { return p.a; },
                             [&](const ConcaveQuadratic& p) { return p.a - p.c_h * rho; },
                             [&](const Overtwist& p) { return p.chi * (1.0 - rho * rho) / (rho * rho); },
                             [&](const Supercoil& p) {
                               return supercoil_inner(p.chi, p.w, rho).dpsi_drho;
                             }},
                    kind_);
}

double Potential::H_at_0() const { return H(0.0); }
double Potential::H_at_1() const { return H(1.0); }

double Potential::H_prime_at_0() const {
  return std::visit(Overload{[](const Zero&) { return 0.0; }, [](const Affine& p) { return p.a; },
                             [](const ConcaveQuadratic& p) { return p.a; },
                             [](const Overtwist&) { return kPosInf; }, [](const Supercoil&) { return kPosInf; }},
                    kind_);
}

std::optional<double> Potential::c_h() const {
  if (const auto* p = std::get_if<ConcaveQuadratic>(&kind_)) return p->c_h;
  return std::nullopt;
}

bool Potential::is_trivial() const {
  return std::holds_alternative<Zero>(kind_) || std::holds_alternative<Affine>(kind_);
}

namespace {

// ψ with the two complementary masses ζ and u = ρ - ζ passed separately, so
// that a maximizer hugging either end keeps full relative precision.
double psi_split(double chi, double w, double zeta, double u, double rho) {
  const double r = 1.0 - rho - zeta;
  return zeta * w - rho * std::log(2.0) - chi * r * r / rho + xlogx(rho) - xlogx(zeta) - xlogx(u);
}

double dpsi_drho_split(double chi, double zeta, double u, double rho) {
  const double r = 1.0 - rho - zeta;
  return -std::log(2.0) + chi * r * (1.0 + rho - zeta) / (rho * rho) + std::log(rho / u);
}

}  // namespace

double supercoil_psi(double chi, double w, double zeta, double rho) {
  return psi_split(chi, w, zeta, rho - zeta, rho);
}

double supercoil_dpsi_dzeta(double chi, double w, double zeta, double rho) {
  return w + 2.0 * chi * (1.0 - rho - zeta) / rho - std::log(zeta) + std::log(rho - zeta);
}

double supercoil_dpsi_drho(double chi, double, double zeta, double rho) {
  return dpsi_drho_split(chi, zeta, rho - zeta, rho);
}

SupercoilInner supercoil_inner(double chi, double w, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw DomainError("supercoil: rho must lie in (0,1]");
  // In s = log(ζ/(ρ-ζ)) stationarity reads s = w + 2χ(1-ρ-ζ(s))/ρ, whose
  // right side decreases in s and is confined to the bracket below.
  const auto zeta_of = [rho](double s) { return rho / (1.0 + std::exp(-s)); };
  const auto gap_of = [rho](double s) { return rho / (1.0 + std::exp(s)); };
  double lo = w + 2.0 * chi * (1.0 - 2.0 * rho) / rho, hi = w + 2.0 * chi * (1.0 - rho) / rho;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (mid < w + 2.0 * chi * (1.0 - rho - zeta_of(mid)) / rho)
      lo = mid;
    else
      hi = mid;
  }
  const double s = 0.5 * (lo + hi);
  SupercoilInner out;
  out.zeta0 = zeta_of(s);
  out.gap = gap_of(s);
  out.psi = psi_split(chi, w, out.zeta0, out.gap, rho);
  out.d2_zeta = -2.0 * chi / rho - 1.0 / out.zeta0 - 1.0 / out.gap;
  out.q = std::sqrt(rho / (out.zeta0 * out.gap * std::abs(out.d2_zeta)));
  out.dpsi_drho = dpsi_drho_split(chi, out.zeta0, out.gap, rho);
  return out;
}

double log_factorial(int k) {
  if (k < 0) throw DomainError("log_factorial: negative argument");
  static std::once_flag once;
  static std::vector<double> table;
  constexpr int kTabulated = 1 << 16;
  std::call_once(once, [] {
    table.resize(kTabulated);
    table[0] = 0.0;
    for (int i = 1; i < kTabulated; ++i) table[static_cast<std::size_t>(i)] = table[static_cast<std::size_t>(i) - 1] + std::log(i);
  });
  if (k < kTabulated) return table[static_cast<std::size_t>(k)];
  return std::lgamma(static_cast<double>(k) + 1.0);
}

PsiFactor PsiFactor::unit(const Potential& p) { return PsiFactor(p, QMode::Unit); }

PsiFactor PsiFactor::exact(const Potential& p) {
  if (std::holds_alternative<Supercoil>(p.kind())) return PsiFactor(p, QMode::SupercoilExact);
  if (std::holds_alternative<Overtwist>(p.kind())) return PsiFactor(p, QMode::OvertwistExact);
  return PsiFactor(p, QMode::Unit);
}

PsiFactor PsiFactor::laplace(const Potential& p) {
  if (!std::holds_alternative<Supercoil>(p.kind())) throw ParameterError("laplace Psi: supercoil potential only");
  return PsiFactor(p, QMode::SupercoilLaplace);
}

PsiFactor PsiFactor::custom(const Potential& p, LogQ log_q) {
  PsiFactor f(p, QMode::Custom);
  f.custom_ = std::move(log_q);
  return f;
}

double PsiFactor::log_psi(int m, int n) const {
  if (n < 1 || m < 1 || m > n) throw DomainError("log_psi: need 1 <= m <= N");
  const double rho = static_cast<double>(m) / n;
  switch (mode_) {
    case QMode::Unit:
      return n * potential_.H(rho);
    case QMode::OvertwistExact: {
      const double chi = std::get<Overtwist>(potential_.kind()).chi;
      const double d = n - m;
      return -chi * d * d / m;
    }
    case QMode::SupercoilExact: {
      const auto& p = std::get<Supercoil>(potential_.kind());
      const double base = -m * std::log(2.0) + log_factorial(m);
      std::vector<double> terms(static_cast<std::size_t>(m) + 1);
      for (int j = 0; j <= m; ++j) {
        const double d = n - m - j;
        terms[static_cast<std::size_t>(j)] =
            -log_factorial(j) - log_factorial(m - j) + j * p.w - p.chi * d * d / m;
      }
      return base + log_sum_exp(terms);
    }
    case QMode::SupercoilLaplace: {
      const auto& p = std::get<Supercoil>(potential_.kind());
      const auto in = supercoil_inner(p.chi, p.w, rho);
      return n * in.psi + std::log(in.q);
    }
    case QMode::Custom:
      return n * potential_.H(rho) + custom_(m, n);
  }
  return kNegInf;
}

double PsiFactor::log_q(int m, int n) const {
  if (mode_ == QMode::Custom) {
    if (n < 1 || m < 1 || m > n) throw DomainError("log_q: need 1 <= m <= N");
    return custom_(m, n);
  }
  return log_psi(m, n) - n * potential_.H(static_cast<double>(m) / n);
}

QBoundReport check_q_bounds(const PsiFactor& psi, const std::vector<double>& rho_grid, const std::vector<int>& sizes,
                            double tol) {
  QBoundReport rep;
  rep.ok = !sizes.empty();
  for (int n : sizes) {
    QBoundRow row{n, 0.0};
    for (double rho : rho_grid) {
      const int m = std::max(1, static_cast<int>(std::lround(rho * n)));
      row.max_rate = std::max(row.max_rate, std::abs(psi.log_q(m, n)) / n);
    }
    if (!rep.rows.empty() && row.max_rate > rep.rows.back().max_rate + 1e-15) rep.ok = false;
    rep.rows.push_back(row);
  }
  if (!rep.rows.empty() && rep.rows.back().max_rate > tol) rep.ok = false;
  return rep;
}

}  // namespace pinlab::potential
