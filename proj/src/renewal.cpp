#include "pinlab/renewal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "pinlab/detail/backward.hpp"
#include "pinlab/error.hpp"
#include "pinlab/logspace.hpp"

namespace pinlab::renewal {

namespace {

// Exact head of the ideal-law sums; the rest is Euler–Maclaurin.
constexpr int kHead = 1024;

// ∫_M^∞ t^{-p} e^{-x t} dt = x^{p-1} Γ(1-p, xM), evaluated through the
// scaled recurrence J_a = (x J_{a+1} - M^a e^{-xM}) / a, a = 1 - p, which
// stays finite as x -> 0.
double tail_integral(double p, double x, double big_m) {
  if (x == 0.0) return p > 1.0 ? std::pow(big_m, 1.0 - p) / (p - 1.0) : kPosInf;
  const double z = x * big_m;
  if (z > 740.0) return 0.0;
  const double a = 1.0 - p;
  if (a > 0.0) {
    const double lg = std::log(boost::math::tgamma(a, z));
    return std::exp(lg - a * std::log(x));
  }
  const double a0 = a - std::floor(a);  // in [0, 1)
  double j = a0 == 0.0 ? boost::math::expint(1, z)
                       : std::exp(std::log(boost::math::tgamma(a0, z)) - a0 * std::log(x));
  const double ez = std::exp(-z);
  for (double b = a0 - 1.0; b >= a - 1e-9; b -= 1.0) j = (x * j - std::pow(big_m, b) * ez) / b;
  return j;
}

// r-th derivative of t^{-p} e^{-x t} at t.
double power_exp_derivative(double p, double x, double t, int r) {
  double acc = 0.0;
  double falling = 1.0;  // (-p)(-p-1)...(-p-j+1)
  double binom = 1.0;
  for (int j = 0; j <= r; ++j) {
    if (j > 0) {
      falling *= (-p - (j - 1));
      binom = binom * (r - j + 1) / j;
    }
    acc += binom * std::pow(-x, r - j) * falling * std::pow(t, -p - j);
  }
  return acc * std::exp(-x * t);
}

// Σ_{n>=M} n^{-p} e^{-x n}.
double tail_sum(double p, double x, int big_m) {
  if (x == 0.0 && p <= 1.0) return kPosInf;
  static constexpr std::array<double, 4> kCoef = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0};
  const double m = big_m;
  double s = tail_integral(p, x, m) + 0.5 * std::pow(m, -p) * std::exp(-x * m);
  for (int k = 1; k <= 4; ++k) s -= kCoef[static_cast<std::size_t>(k - 1)] * power_exp_derivative(p, x, m, 2 * k - 1);
  return s;
}

// Σ_{n>=M} n^{-p} (1 - e^{-x n}).
double tail_complement(double p, double x, int big_m) {
  if (x == 0.0) return 0.0;
  return tail_sum(p, 0.0, big_m) - tail_sum(p, x, big_m);
}

}  // namespace

InterArrivalLaw build_power_law(double alpha, int n_max) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("power law: alpha must be > 0");
  if (n_max < 2) throw ParameterError("power law: n_max must be >= 2");
  InterArrivalLaw law;
  law.alpha_ = alpha;
  law.n_max_ = n_max;
  law.pure_ = true;
  const double s = 1.0 + alpha;
  CompensatedSum z;
  for (int n = n_max; n >= 1; --n) z.add(std::pow(static_cast<double>(n), -s));
  const double log_z = std::log(z.value());
  law.mass_.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  law.log_mass_.assign(static_cast<std::size_t>(n_max) + 1, kNegInf);
  for (int n = 1; n <= n_max; ++n) {
    const double lm = -s * std::log(static_cast<double>(n)) - log_z;
    law.log_mass_[static_cast<std::size_t>(n)] = lm;
    law.mass_[static_cast<std::size_t>(n)] = std::exp(lm);
  }
  CompensatedSum head;
  for (int n = kHead - 1; n >= 1; --n) head.add(std::pow(static_cast<double>(n), -s));
  law.zeta_ = head.value() + tail_sum(s, 0.0, kHead);
  law.finish();
  return law;
}

InterArrivalLaw InterArrivalLaw::from_masses(double alpha, std::vector<double> masses, bool validate) {
  if (masses.size() < 2) throw ParameterError("inter-arrival law: need at least two atoms");
  InterArrivalLaw law;
  law.alpha_ = alpha;
  law.n_max_ = static_cast<int>(masses.size());
  law.mass_.assign(1, 0.0);
  law.mass_.insert(law.mass_.end(), masses.begin(), masses.end());
  law.log_mass_.resize(law.mass_.size());
  for (std::size_t n = 0; n < law.mass_.size(); ++n)
    law.log_mass_[n] = law.mass_[n] > 0.0 ? std::log(law.mass_[n]) : kNegInf;
  law.finish();
  if (validate) {
    const auto problems = law.check_invariants();
    if (!problems.empty()) throw ParameterError("inter-arrival law: " + problems.front());
  }
  return law;
}

void InterArrivalLaw::finish() {
  CompensatedSum mean;
  for (int n = n_max_; n >= 1; --n) mean.add(n * mass_[static_cast<std::size_t>(n)]);
  mean_ = mean.value();
  if (pure_ && alpha_ > 1.0) {
    CompensatedSum head;
    for (int n = kHead - 1; n >= 1; --n) head.add(std::pow(static_cast<double>(n), -alpha_));
    ideal_mean_ = (head.value() + tail_sum(alpha_, 0.0, kHead)) / zeta_;
  } else {
    ideal_mean_ = kPosInf;
  }
}

double InterArrivalLaw::log_mass(int n) const {
  return n >= 1 && n <= n_max_ ? log_mass_[static_cast<std::size_t>(n)] : kNegInf;
}

double InterArrivalLaw::log_k1(Support s) const {
  if (s == Support::Ideal) {
    if (!pure_) throw ParameterError("ideal support requires a pure power law");
    return -std::log(zeta_);
  }
  return log_mass_[1];
}

LaplaceMoments InterArrivalLaw::laplace(double x, Support s) const {
  if (!(x >= 0.0)) throw ParameterError("laplace: tilt must be >= 0");
  LaplaceMoments out;
  if (s == Support::Truncated) {
    CompensatedSum l0, c0, l1, l2;
    for (int n = n_max_; n >= 1; --n) {
      const double k = mass_[static_cast<std::size_t>(n)];
      const double e = std::exp(-x * n);
      l0.add(k * e);
      c0.add(-k * std::expm1(-x * n));
      l1.add(n * k * e);
      l2.add(static_cast<double>(n) * n * k * e);
    }
    out.l0 = l0.value();
    out.one_minus_l0 = c0.value();
    out.l1 = l1.value();
    out.l2 = l2.value();
    return out;
  }
  if (!pure_) throw ParameterError("ideal support requires a pure power law");
  const double p = 1.0 + alpha_;
  CompensatedSum l0, c0, l1, l2;
  for (int n = kHead - 1; n >= 1; --n) {
    const double w = std::pow(static_cast<double>(n), -p);
    const double e = std::exp(-x * n);
    l0.add(w * e);
    c0.add(-w * std::expm1(-x * n));
    l1.add(n * w * e);
    l2.add(static_cast<double>(n) * n * w * e);
  }
  // The compensated sum cannot absorb an infinite tail.
  const auto finish = [&](CompensatedSum& head, double tail) {
    if (std::isinf(tail)) return kPosInf;
    head.add(tail);
    return head.value() / zeta_;
  };
  out.l0 = finish(l0, tail_sum(p, x, kHead));
  out.one_minus_l0 = finish(c0, tail_complement(p, x, kHead));
  out.l1 = finish(l1, tail_sum(p - 1.0, x, kHead));
  out.l2 = finish(l2, tail_sum(p - 2.0, x, kHead));
  return out;
}

std::vector<std::string> InterArrivalLaw::check_invariants() const {
  std::vector<std::string> problems;
  CompensatedSum total;
  for (int n = n_max_; n >= 1; --n) total.add(mass_[static_cast<std::size_t>(n)]);
  if (std::abs(total.value() - 1.0) > 1e-14) {
    std::ostringstream os;
    os << "masses sum to " << total.value() << ", not 1";
    problems.push_back(os.str());
  }
  for (int n = 1; n <= n_max_; ++n) {
    if (!(mass_[static_cast<std::size_t>(n)] > 0.0)) {
      problems.push_back("K(" + std::to_string(n) + ") is not positive");
      break;
    }
  }
  if (n_max_ >= 10) {
    double lo = kPosInf, hi = 0.0;
    for (int n = n_max_ / 10; n <= n_max_; ++n) {
      const double v = mass_[static_cast<std::size_t>(n)] * std::pow(static_cast<double>(n), 1.0 + alpha_);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!(hi <= lo * 1.01)) problems.push_back("tail is not of power-law shape over the last decade");
  }
  return problems;
}

TiltedLaw tilt(const InterArrivalLaw& law, double q) {
  const int n_max = law.n_max();
  double ref = kNegInf;
  for (int n = 1; n <= n_max; ++n) ref = std::max(ref, law.log_mass(n) - q * n);
  TiltedLaw t;
  t.q = q;
  t.mass.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  CompensatedSum z;
  for (int n = n_max; n >= 1; --n) {
    const double w = std::exp(law.log_mass(n) - q * n - ref);
    t.mass[static_cast<std::size_t>(n)] = w;
    z.add(w);
  }
  const double zz = z.value();
  CompensatedSum mean;
  for (int n = n_max; n >= 1; --n) {
    t.mass[static_cast<std::size_t>(n)] /= zz;
    mean.add(n * t.mass[static_cast<std::size_t>(n)]);
  }
  t.mean = mean.value();
  CompensatedSum var;
  for (int n = n_max; n >= 1; --n) {
    const double d = n - t.mean;
    var.add(d * d * t.mass[static_cast<std::size_t>(n)]);
  }
  t.variance = var.value();
  return t;
}

TiltedLaw tilt_for_density(const InterArrivalLaw& law, double rho) {
  const double target = 1.0 / rho;
  const double base_mean = law.mean();
  if (!(rho < 1.0) || !(rho > 0.0) || target > base_mean + 1e-10) {
    std::ostringstream os;
    os << "tilt: density " << rho << " outside [" << law.rho_c() << ", 1)";
    throw DensityOutOfRange(os.str());
  }
  if (std::abs(target - base_mean) <= 1e-10) return tilt(law, 0.0);
  double lo = 0.0, hi = 1.0;
  while (tilt(law, hi).mean > target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw DensityOutOfRange("tilt: bracket search failed");
  }
  TiltedLaw best = tilt(law, hi);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    TiltedLaw t = tilt(law, mid);
    if (t.mean > target)
      lo = mid;
    else
      hi = mid;
    if (std::abs(t.mean - target) < std::abs(best.mean - target)) best = std::move(t);
    if (std::abs(best.mean - target) <= 1e-12 || hi - lo <= 1e-15 * hi) break;
  }
  return best;
}

LogTable renewal_mass_table(const InterArrivalLaw& law, int n) {
  if (n < 1) throw ParameterError("renewal table: N must be >= 1");
  if (n > law.n_max()) throw ParameterError("renewal table: N exceeds n_max of the law");
  LogTable table(n);
  detail::fill_log_table(table, law.masses(), law.log_masses(), {});
  return table;
}

std::vector<double> renewal_log_indicator(const InterArrivalLaw& law, int n) {
  if (n > law.n_max()) throw ParameterError("renewal indicator: N exceeds n_max of the law");
  std::vector<double> u(static_cast<std::size_t>(n) + 1, kNegInf);
  u[0] = 0.0;
  std::vector<double> terms;
  for (int i = 1; i <= n; ++i) {
    terms.clear();
    for (int ell = 1; ell <= i; ++ell) terms.push_back(law.log_mass(ell) + u[static_cast<std::size_t>(i - ell)]);
    u[static_cast<std::size_t>(i)] = log_sum_exp(terms);
  }
  return u;
}

PathSample sample_conditioned(const InterArrivalLaw& law, const LogTable& table, int n, int m, Stream& rng) {
  if (m < 1 || m > n) throw DomainError("conditioned sampler: need 1 <= m <= N");
  if (n > table.size()) throw DomainError("conditioned sampler: table too small for N");
  return PathSample::from_contacts(n, detail::sample_backward(table, law.log_masses(), {}, n, m, rng));
}

}  // namespace pinlab::renewal
