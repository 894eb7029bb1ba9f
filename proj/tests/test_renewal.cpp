#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include <boost/math/special_functions/zeta.hpp>

#include "oracles.hpp"
#include "pinlab/error.hpp"
#include "pinlab/renewal.hpp"

using namespace pinlab;
using namespace pinlab::renewal;

TEST_CASE("power law: two-atom normalization") {
  const auto law = build_power_law(1.0, 2);
  CHECK(law.mass(1) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(law.mass(2) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(law.check_invariants().empty());
}

TEST_CASE("power law: parameter domain") {
  CHECK_THROWS_AS(build_power_law(0.0, 100), ParameterError);
  CHECK_THROWS_AS(build_power_law(-1.0, 100), ParameterError);
  CHECK_THROWS_AS(build_power_law(1.5, 1), ParameterError);
}

TEST_CASE("power law: truncated rho_c against direct summation") {
  const auto law = build_power_law(1.5, 4096);
  long double num = 0.0L, den = 0.0L;
  for (int n = 4096; n >= 1; --n) {
    const long double w = std::pow(static_cast<long double>(n), -2.5L);
    num += n * w;
    den += w;
  }
  CHECK(std::abs(law.rho_c() - static_cast<double>(den / num)) < 1e-3);
  CHECK(law.check_invariants().empty());
  // Ideal value ζ(2.5)/ζ(1.5).
  CHECK(law.rho_c_ideal() == doctest::Approx(boost::math::zeta(2.5) / boost::math::zeta(1.5)).epsilon(1e-12));
}

TEST_CASE("power law: alpha <= 1 has ideal rho_c = 0 but positive truncated rho_c") {
  const auto law = build_power_law(0.5, 4096);
  CHECK(law.rho_c_ideal() == 0.0);
  CHECK(std::isinf(law.ideal_mean()));
  CHECK(law.rho_c() > 0.0);
}

TEST_CASE("corrupted masses are rejected") {
  CHECK_THROWS_AS(InterArrivalLaw::from_masses(1.0, {0.5, 0.4}), ParameterError);
  const auto bad = InterArrivalLaw::from_masses(1.0, {0.5, 0.4}, false);
  CHECK_FALSE(bad.check_invariants().empty());
}

TEST_CASE("ideal Laplace moments match direct summation where the tail is negligible") {
  for (double alpha : {0.3, 0.7, 1.5, 2.5}) {
    const auto law = build_power_law(alpha, 16);
    const double x = 0.05;
    const double zeta = boost::math::zeta(1.0 + alpha);
    long double l0 = 0, l1 = 0, l2 = 0;
    for (int n = 40000; n >= 1; --n) {
      const long double w = std::pow(static_cast<long double>(n), -1.0L - alpha) * std::exp(-x * n) / zeta;
      l0 += w;
      l1 += n * w;
      l2 += static_cast<long double>(n) * n * w;
    }
    const auto mom = law.laplace(x, Support::Ideal);
    CHECK(mom.l0 == doctest::Approx(static_cast<double>(l0)).epsilon(1e-12));
    CHECK(mom.one_minus_l0 == doctest::Approx(static_cast<double>(1.0L - l0)).epsilon(1e-11));
    CHECK(mom.l1 == doctest::Approx(static_cast<double>(l1)).epsilon(1e-12));
    CHECK(mom.l2 == doctest::Approx(static_cast<double>(l2)).epsilon(1e-11));
  }
}

TEST_CASE("ideal Laplace moments at x = 0") {
  const auto law = build_power_law(2.5, 16);
  const auto mom = law.laplace(0.0, Support::Ideal);
  CHECK(mom.l0 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mom.one_minus_l0 == 0.0);
  CHECK(mom.l1 == doctest::Approx(boost::math::zeta(2.5) / boost::math::zeta(3.5)).epsilon(1e-13));
  CHECK(std::isinf(build_power_law(1.5, 16).laplace(0.0, Support::Ideal).l2));
  CHECK(std::isinf(build_power_law(0.7, 16).laplace(0.0, Support::Ideal).l1));
}

TEST_CASE("ideal complement stays accurate for tiny tilts") {
  // 1 - E[e^{-xη}] ~ C_K Γ(1-α)/α x^α as x -> 0 for α < 1.
  const double alpha = 0.3;
  const auto law = build_power_law(alpha, 16);
  const double ck = 1.0 / boost::math::zeta(1.0 + alpha);
  const double coef = ck * std::tgamma(1.0 - alpha) / alpha;
  double prev_ratio = 0.0;
  for (double x : {1e-8, 1e-11, 1e-14}) {
    const double r = law.laplace(x, Support::Ideal).one_minus_l0 / (coef * std::pow(x, alpha));
    CHECK(std::abs(r - 1.0) < 0.01);
    if (prev_ratio > 0) CHECK(std::abs(r - 1.0) < std::abs(prev_ratio - 1.0));
    prev_ratio = r;
  }
}

TEST_CASE("renewal table: trivial rows and hand convolution") {
  const auto law = build_power_law(1.0, 8);
  const auto table = renewal_mass_table(law, 8);
  CHECK(table.at(0, 0) == 0.0);
  for (int n = 1; n <= 8; ++n) {
    CHECK(std::isinf(table.at(0, n)));
    CHECK(table.at(1, n) == doctest::Approx(law.log_mass(n)).epsilon(1e-14));
  }
  CHECK(table.at(8, 8) == doctest::Approx(8 * law.log_mass(1)).epsilon(1e-14));
  double p = 0.0;
  for (int ell = 1; ell <= 3; ++ell) p += law.mass(ell) * law.mass(4 - ell);
  CHECK(std::exp(table.at(2, 4)) == doctest::Approx(p).epsilon(1e-14));
  for (int m = 1; m <= 8; ++m)
    CHECK(std::exp(table.at(m, 8)) == doctest::Approx(oracle::renewal_mass(law, 8, m)).epsilon(1e-13));
  CHECK_THROWS_AS(renewal_mass_table(law, 9), ParameterError);
}

TEST_CASE("renewal table: blocked kernel agrees with the naive log-space recursion") {
  // Long enough to exercise full and partial blocks with large dynamic range.
  for (double alpha : {0.7, 1.5}) {
    const int n = 300;
    const auto law = build_power_law(alpha, n);
    const auto table = renewal_mass_table(law, n);
    std::vector<std::vector<double>> ref(n + 1, std::vector<double>(n + 1, kNegInf));
    ref[0][0] = 0.0;
    std::vector<double> terms;
    double worst = 0.0;
    for (int m = 1; m <= n; ++m)
      for (int i = m; i <= n; ++i) {
        terms.clear();
        for (int ell = 1; ell <= i - m + 1; ++ell) terms.push_back(ref[m - 1][i - ell] + law.log_mass(ell));
        ref[m][i] = log_sum_exp(terms);
        worst = std::max(worst, std::abs(ref[m][i] - table.at(m, i)) / std::max(1.0, std::abs(ref[m][i])));
      }
    CHECK(worst < 1e-13);
  }
}

TEST_CASE("renewal table: rows sum to the renewal indicator") {
  const auto law = build_power_law(1.5, 400);
  const auto table = renewal_mass_table(law, 400);
  const auto u = renewal_log_indicator(law, 400);
  std::vector<double> col;
  for (int n = 1; n <= 400; n += 7) {
    col.clear();
    for (int m = 1; m <= n; ++m) col.push_back(table.at(m, n));
    CHECK(std::abs(log_sum_exp(col) - u[n]) < 1e-10 * std::max(1.0, std::abs(u[n])));
  }
}

TEST_CASE("renewal table: cache round trip preserves every entry") {
  const auto law = build_power_law(2.5, 64);
  const auto table = renewal_mass_table(law, 50);
  std::stringstream buf;
  TableHeader hdr{law.alpha(), static_cast<std::uint64_t>(law.n_max()), 50, std::nullopt};
  write_table(buf, hdr, table);
  TableHeader back;
  const auto copy = read_table(buf, &back);
  CHECK(back.alpha == 2.5);
  CHECK(back.n_max == 64);
  CHECK(!back.disorder);
  REQUIRE(copy.size() == 50);
  for (std::size_t i = 0; i < table.raw().size(); ++i) {
    const double a = table.raw()[i], b = copy.raw()[i];
    CHECK((a == b || (std::isinf(a) && std::isinf(b))));
  }
  std::stringstream junk("NOTATABLE");
  CHECK_THROWS_AS(read_table(junk), Error);
}

TEST_CASE("tilt: q = 0 at the untilted mean and concentration as rho -> 1") {
  const auto law = build_power_law(1.5, 4096);
  CHECK(std::abs(tilt_for_density(law, law.rho_c()).q) < 1e-9);
  const auto t = tilt_for_density(law, 0.999);
  CHECK(std::abs(t.mean - 1.0 / 0.999) <= 1e-10);
  CHECK(t.mass[1] >= 0.99);
  double prev_q = -1.0;
  for (int i = 0; i < 10; ++i) {
    const double rho = law.rho_c() + (0.99 - law.rho_c()) * (i + 0.5) / 10.0;
    const auto ti = tilt_for_density(law, rho);
    CHECK(std::abs(ti.mean - 1.0 / rho) <= 1e-10);
    CHECK(ti.q > prev_q);
    prev_q = ti.q;
  }
  CHECK_THROWS_AS(tilt_for_density(law, 0.9 * law.rho_c()), DensityOutOfRange);
  CHECK_THROWS_AS(tilt_for_density(law, 1.0), DensityOutOfRange);
}

TEST_CASE("tilt: mean decreasing in q") {
  const auto law = build_power_law(2.5, 512);
  double prev = 1e9;
  for (double q = -0.2; q < 5.0; q += 0.25) {
    const auto t = tilt(law, q);
    CHECK(t.mean < prev);
    prev = t.mean;
  }
}

TEST_CASE("conditioned sampler: degenerate cases") {
  const auto law = build_power_law(1.5, 32);
  const auto table = renewal_mass_table(law, 32);
  Stream rng(1);
  const auto all = sample_conditioned(law, table, 20, 20, rng);
  CHECK(all.m == 20);
  CHECK(all.eta_sorted.front() == 1);
  const auto one = sample_conditioned(law, table, 20, 1, rng);
  CHECK(one.contacts == std::vector<int>{20});
  CHECK(one.eta2_frac == 0.0);
  CHECK_THROWS_AS(sample_conditioned(law, table, 10, 11, rng), DomainError);
  CHECK_THROWS_AS(sample_conditioned(law, table, 10, 0, rng), DomainError);
}

TEST_CASE("conditioned sampler: empirical law matches enumeration of compositions") {
  const auto law = build_power_law(1.0, 8);
  const auto table = renewal_mass_table(law, 8);
  const auto exact = oracle::conditioned_law(law, 8, 3);
  std::map<std::uint32_t, int> counts;
  Stream rng(2024);
  const int draws = 1000000;
  for (int i = 0; i < draws; ++i) ++counts[oracle::mask_of(sample_conditioned(law, table, 8, 3, rng).contacts)];
  double worst = 0.0;
  for (const auto& [mask, p] : exact) worst = std::max(worst, std::abs(counts[mask] / double(draws) - p));
  CHECK(counts.size() == exact.size());
  CHECK(worst <= 3e-3);
}

TEST_CASE("conditioned sampler: agrees with rejection from a tilted law") {
  const auto law = build_power_law(1.0, 8);
  const auto table = renewal_mass_table(law, 8);
  const auto tilted = tilt(law, -0.3);
  std::discrete_distribution<int> jump(tilted.mass.begin(), tilted.mass.end());
  std::map<std::uint32_t, double> a, b;
  Stream rng(99), rng2(100);
  const int draws = 1000000;
  for (int i = 0; i < draws; ++i) a[oracle::mask_of(sample_conditioned(law, table, 8, 3, rng).contacts)] += 1.0 / draws;
  int accepted = 0;
  while (accepted < draws) {
    std::vector<int> c;
    int pos = 0;
    for (int j = 0; j < 3; ++j) c.push_back(pos += jump(rng2));
    if (pos != 8) continue;
    b[oracle::mask_of(c)] += 1.0 / draws;
    ++accepted;
  }
  double tv = 0.0;
  for (const auto& [mask, p] : a) tv += 0.5 * std::abs(p - b[mask]);
  for (const auto& [mask, p] : b)
    if (!a.count(mask)) tv += 0.5 * p;
  CHECK(tv <= 1e-2);
}

namespace {

struct JumpStats {
  double eta1 = 0.0, eta2 = 0.0, abs_dev = 0.0, max_eta1 = 0.0;
};

JumpStats conditioned_stats(const InterArrivalLaw& law, const LogTable& table, int n, double rho, int draws,
                            std::uint64_t seed, double target = 0.0) {
  JumpStats s;
  const int m = static_cast<int>(std::lround(rho * n));
  for (int i = 0; i < draws; ++i) {
    Stream rng(seed, static_cast<std::uint64_t>(i));
    const auto p = sample_conditioned(law, table, n, m, rng);
    s.eta1 += p.eta1_frac / draws;
    s.eta2 += p.eta2_frac / draws;
    s.abs_dev += std::abs(p.eta1_frac - target) / draws;
    s.max_eta1 = std::max(s.max_eta1, p.eta1_frac);
  }
  return s;
}

}  // namespace

TEST_CASE("conditioned sampler: big-jump regime below rho_c") {
  // Q_{N,m} only sees K on 1..N up to a constant per jump, so with N <= n_max
  // the limit is governed by the untruncated rho_c.
  const auto law = build_power_law(2.5, 2048);
  const auto table = renewal_mass_table(law, 2048);
  const double rho = 0.42;
  const double target = 1.0 - rho / law.rho_c_ideal();
  double prev_dev = 1.0, prev_eta2 = 1.0, last_mean = 0.0;
  for (int n : {256, 512, 1024, 2048}) {
    const auto s = conditioned_stats(law, table, n, rho, 400, 5, target);
    MESSAGE("N=" << n << " mean eta1/N=" << s.eta1 << " target=" << target << " mean |dev|=" << s.abs_dev
                 << " mean eta2/N=" << s.eta2);
    CHECK(s.abs_dev < prev_dev);
    CHECK(s.eta2 < prev_eta2);
    prev_dev = s.abs_dev;
    prev_eta2 = s.eta2;
    last_mean = s.eta1;
  }
  CHECK(std::abs(last_mean - target) < 0.01);
}

TEST_CASE("conditioned sampler: no macroscopic jump above rho_c") {
  const auto law = build_power_law(1.5, 1024);
  const auto table = renewal_mass_table(law, 1024);
  double prev = 1.0;
  for (int n : {256, 512, 1024}) {
    const auto s = conditioned_stats(law, table, n, 0.8, 200, 6);
    CHECK(s.max_eta1 < prev);
    prev = s.max_eta1;
  }
}
