#include <doctest.h>

#include <cmath>
#include <random>

#include "pinlab/error.hpp"
#include "pinlab/potentials.hpp"

using namespace pinlab;
using namespace pinlab::potential;

namespace {

std::vector<Potential> all_potentials() {
  return {Potential(Zero{}), Potential(Affine{0.5, -0.2}), Potential(ConcaveQuadratic{0.3, 1.0}),
          Potential(Overtwist{1.0}), Potential(Supercoil{1.0, 1.0}), Potential(Supercoil{2.0, 0.5})};
}

// Five-point stencil with a step scaled to the distance from the boundary.
double central_difference(const Potential& p, double rho) {
  const double h = 1e-3 * std::min(rho, 1.0 - rho);
  return (8.0 * (p.H(rho + h) - p.H(rho - h)) - (p.H(rho + 2 * h) - p.H(rho - 2 * h))) / (12.0 * h);
}

}  // namespace

TEST_CASE("overtwist closed form and boundary values") {
  const Potential p(Overtwist{1.0});
  CHECK(p.H(1.0) == 0.0);
  CHECK(p.H(0.5) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(p.H_at_0() == -INFINITY);
  CHECK(p.H_prime_at_0() == INFINITY);
  CHECK(std::abs(p.H_prime(0.5) - central_difference(p, 0.5)) < 1e-7);
  CHECK_FALSE(p.c_h());
}

TEST_CASE("affine and quadratic derivatives") {
  const Potential a(Affine{0.7, -1.0});
  for (double r : {0.1, 0.5, 0.9}) CHECK(a.H_prime(r) == 0.7);
  CHECK(a.is_trivial());
  const Potential q(ConcaveQuadratic{0.3, 2.0});
  CHECK(q.H_prime_at_0() == 0.3);
  CHECK(*q.c_h() == 2.0);
  CHECK_FALSE(q.is_trivial());
  // (H′(x) - H′(0) + c_H x)/x -> 0.
  for (double x : {1e-1, 1e-2, 1e-3}) CHECK(std::abs((q.H_prime(x) - q.H_prime_at_0() + 2.0 * x) / x) < 1e-12);
}

TEST_CASE("domain and parameter errors") {
  const Potential p(Overtwist{1.0});
  CHECK_THROWS_AS(p.H(-0.1), DomainError);
  CHECK_THROWS_AS(p.H(1.1), DomainError);
  CHECK_THROWS_AS(p.H_prime(0.0), DomainError);
  CHECK_THROWS_AS(p.H_prime(1.0), DomainError);
  CHECK_THROWS_AS(Potential(Overtwist{0.0}), ParameterError);
  CHECK_THROWS_AS(Potential(Supercoil{1.0, -1.0}), ParameterError);
  CHECK_THROWS_AS(Potential(ConcaveQuadratic{0.0, 0.0}), ParameterError);
  const auto psi = PsiFactor::exact(p);
  CHECK_THROWS_AS(psi.log_psi(0, 5), DomainError);
  CHECK_THROWS_AS(psi.log_psi(6, 5), DomainError);
}

TEST_CASE("every potential is concave with a consistent derivative") {
  for (const auto& p : all_potentials()) {
    CAPTURE(p.name());
    const int n = 1000;
    for (int i = 1; i + 1 < n; ++i) {
      const double a = static_cast<double>(i - 1) / n + 1e-3, b = static_cast<double>(i) / n + 1e-3,
                   c = static_cast<double>(i + 1) / n + 1e-3;
      if (c >= 1.0) break;
      CHECK(p.H(b) >= 0.5 * (p.H(a) + p.H(c)) - 1e-12);
    }
    for (double r : {0.05, 0.2, 0.5, 0.75, 0.95}) CHECK(std::abs(p.H_prime(r) - central_difference(p, r)) < 1e-6);
  }
}

TEST_CASE("supercoil inner maximization") {
  for (double rho : {0.2, 0.5, 0.8}) {
    const auto in = supercoil_inner(1.0, 1.0, rho);
    CHECK(in.zeta0 > 0.0);
    CHECK(in.zeta0 < rho);
    CHECK(std::abs(supercoil_dpsi_dzeta(1.0, 1.0, in.zeta0, rho)) < 1e-10);
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.0, rho);
    for (int i = 0; i < 10000; ++i) CHECK(in.psi >= supercoil_psi(1.0, 1.0, u(gen), rho));
  }
}

TEST_CASE("supercoil H matches a dense grid scan") {
  const double rho = 0.5;
  double best = -INFINITY;
  const int n = 1000000;
  for (int i = 1; i < n; ++i) best = std::max(best, supercoil_psi(1.0, 1.0, rho * i / n, rho));
  CHECK(std::abs(Potential(Supercoil{1.0, 1.0}).H(rho) - best) < 1e-9);
}

TEST_CASE("supercoil zeta0 matches golden section") {
  const double rho = 0.5;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = rho;
  while (b - a > 1e-12) {
    const double c = b - phi * (b - a), d = a + phi * (b - a);
    if (supercoil_psi(1.0, 1.0, c, rho) > supercoil_psi(1.0, 1.0, d, rho))
      b = d;
    else
      a = c;
  }
  CHECK(std::abs(supercoil_inner(1.0, 1.0, rho).zeta0 - 0.5 * (a + b)) < 1e-8);
}

TEST_CASE("supercoil envelope derivative matches finite differences of H") {
  const Potential p(Supercoil{1.0, 1.0});
  for (double r : {0.3, 0.6, 0.9}) CHECK(std::abs(p.H_prime(r) - central_difference(p, r)) < 1e-6);
}

TEST_CASE("exact Psi factors") {
  const auto ot = PsiFactor::exact(Potential(Overtwist{1.0}));
  CHECK(ot.log_psi(30, 30) == 0.0);
  CHECK(ot.log_psi(10, 30) == doctest::Approx(-40.0));

  const auto stiff = PsiFactor::exact(Potential(Supercoil{1e6, 1.0}));
  CHECK(std::abs(stiff.log_psi(50, 50) + 50 * std::log(2.0)) < 1e-6);

  const auto sc = PsiFactor::exact(Potential(Supercoil{1.0, 1.0}));
  long double direct = 0.0L;
  long double binom = 1.0L;
  for (int j = 0; j <= 10; ++j) {
    if (j > 0) binom = binom * (10 - j + 1) / j;
    const long double d = 20 - 10 - j;
    direct += binom / 1024.0L * std::exp(static_cast<long double>(j) - d * d / 10.0L);
  }
  CHECK(std::abs(sc.log_psi(10, 20) - static_cast<double>(std::log(direct))) < 1e-12);
}

TEST_CASE("Psi decomposes as Q exp(N H)") {
  for (const auto& p : all_potentials()) {
    const auto psi = PsiFactor::exact(p);
    for (int n : {7, 40, 300})
      for (int m = 1; m <= n; m += std::max(1, n / 13))
        CHECK(std::abs(psi.log_psi(m, n) - n * p.H(static_cast<double>(m) / n) - psi.log_q(m, n)) <= 1e-9);
  }
  const Potential p(Overtwist{1.0});
  const auto custom = PsiFactor::custom(p, [](int m, int) { return 0.5 * std::log(static_cast<double>(m)); });
  CHECK(custom.log_q(16, 20) == doctest::Approx(std::log(4.0)));
  CHECK(custom.log_psi(16, 20) == doctest::Approx(20 * p.H(0.8) + std::log(4.0)));
}

TEST_CASE("(1/N) log Psi converges to H at rate 1/N") {
  for (const auto& p : all_potentials()) {
    CAPTURE(p.name());
    const auto psi = PsiFactor::exact(p);
    for (double rho : {0.3, 0.6, 0.9}) {
      double worst_scaled = 0.0;
      for (int k = 7; k <= 13; ++k) {
        const int n = 1 << k;
        const int m = static_cast<int>(std::lround(rho * n));
        const double err = std::abs(psi.log_psi(m, n) / n - p.H(static_cast<double>(m) / n));
        worst_scaled = std::max(worst_scaled, err * n);
        CHECK(std::abs(p.H(static_cast<double>(m) / n) - p.H(rho)) <= (std::abs(p.H_prime(rho)) + 1.0) / n);
      }
      CHECK(worst_scaled < 5.0);
    }
  }
}

TEST_CASE("supercoil prefactor q is the finite-size correction") {
  const Potential p(Supercoil{1.0, 1.0});
  const auto exact = PsiFactor::exact(p);
  const auto fast = PsiFactor::laplace(p);
  double prev = INFINITY;
  for (int n : {128, 512, 2048, 8192}) {
    const int m = n / 2;
    const double gap = std::abs(exact.log_psi(m, n) - fast.log_psi(m, n));
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 1e-3);
  const auto rep = check_q_bounds(exact, {0.2, 0.4, 0.6, 0.8}, {128, 256, 512, 1024, 2048, 4096});
  CHECK(rep.ok);
  CHECK_THROWS_AS(PsiFactor::laplace(Potential(Overtwist{1.0})), ParameterError);
}

TEST_CASE("log factorial table") {
  CHECK(log_factorial(0) == 0.0);
  CHECK(log_factorial(10) == doctest::Approx(std::log(3628800.0)).epsilon(1e-14));
  CHECK(log_factorial(100000) == doctest::Approx(std::lgamma(100001.0)).epsilon(1e-14));
}
