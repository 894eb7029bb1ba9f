#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "pinlab/error.hpp"
#include "pinlab/free_energy.hpp"
#include "pinlab/logspace.hpp"
#include "pinlab/partition.hpp"
#include "pinlab/rng.hpp"
#include "pinlab/stats.hpp"

using namespace pinlab;
using namespace pinlab::dp;
using namespace pinlab::potential;

namespace {

long double log_sum(const std::vector<long double>& v) {
  long double mx = -INFINITY;
  for (auto x : v) mx = std::max(mx, x);
  long double s = 0.0L;
  for (auto x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

double enum_log_z(const renewal::InterArrivalLaw& law, const PsiFactor& psi, const std::vector<double>& site_w,
                  double h, int n) {
  std::vector<long double> lw;
  for (auto& [mask, w] : oracle::gibbs_log_weights(law, n, h, [&](int m, int nn) { return psi.log_psi(m, nn); }, site_w))
    lw.push_back(w);
  return static_cast<double>(log_sum(lw));
}

}  // namespace

TEST_CASE("partition: N=12 Gaussian field matches subset enumeration for every m") {
  const auto law = renewal::build_power_law(1.0, 64);
  const auto field = disorder::DisorderField::generate(disorder::Dist::Gaussian, 12, 7, 1.0);
  const auto dp = ConstrainedDP::build(law, 12, field);
  const auto w = field.site_weights();
  for (int m = 1; m <= 12; ++m) {
    std::vector<long double> terms;
    oracle::for_each_composition(12, m, [&](const std::vector<int>& c) {
      long double lw = 0.0L;
      int prev = 0;
      for (int x : c) {
        lw += std::log(static_cast<long double>(law.mass(x - prev))) + w[static_cast<std::size_t>(x)];
        prev = x;
      }
      terms.push_back(lw);
    });
    CHECK(std::abs(dp.log_z(12, m) - static_cast<double>(log_sum(terms))) <= 1e-10);
  }
  CHECK(dp.log_z(0, 0) == 0.0);
  for (int n = 1; n <= 12; ++n) CHECK(is_neg_inf(dp.log_z(n, 0)));
  CHECK(is_neg_inf(dp.log_z(5, 6)));
}

TEST_CASE("partition: homogeneous table is the renewal mass table") {
  const auto law = renewal::build_power_law(1.5, 256);
  const auto dp = ConstrainedDP::build(law, 64);
  const auto ref = renewal::renewal_mass_table(law, 64);
  for (int n = 0; n <= 64; ++n)
    for (int m = 0; m <= n; ++m) {
      const double a = dp.log_z(n, m), b = ref.at(m, n);
      if (is_neg_inf(b))
        CHECK(is_neg_inf(a));
      else
        CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)));
    }
  CHECK(dp.beta() == 0.0);
  CHECK(dp.site_weights().empty());
}

TEST_CASE("partition: constant field shifts every entry by beta c m") {
  const auto law = renewal::build_power_law(0.7, 128);
  const double beta = 0.8, c = -0.35;
  const auto dp = ConstrainedDP::build(law, 50, disorder::DisorderField::constant(50, c, beta));
  const auto ref = ConstrainedDP::build(law, 50);
  for (int n = 1; n <= 50; ++n)
    for (int m = 1; m <= n; ++m)
      CHECK(std::abs(dp.log_z(n, m) - (ref.log_z(n, m) + beta * c * m)) <= 1e-11 * std::max(1.0, std::abs(ref.log_z(n, m))));
}

TEST_CASE("partition: entries satisfy the one-step recursion") {
  const auto law = renewal::build_power_law(1.5, 200);
  const auto field = disorder::DisorderField::generate(disorder::Dist::Rademacher, 120, 5, 0.6);
  const auto dp = ConstrainedDP::build(law, 120, field);
  const auto w = field.site_weights();
  for (int n : {1, 2, 17, 64, 120})
    for (int m = 1; m <= n; m += 3) {
      std::vector<long double> terms;
      for (int l = 1; l <= n; ++l) {
        const double prev = dp.log_z(n - l, m - 1);
        if (!is_neg_inf(prev)) terms.push_back(prev + law.log_mass(l));
      }
      const double expected = static_cast<double>(log_sum(terms)) + w[static_cast<std::size_t>(n)];
      CHECK(std::abs(dp.log_z(n, m) - expected) <= 1e-11 * std::max(1.0, std::abs(expected)));
    }
}

TEST_CASE("partition: a table built at N serves smaller systems") {
  const auto law = renewal::build_power_law(1.2, 300);
  const auto big = ConstrainedDP::build(law, 300, disorder::DisorderField::generate(disorder::Dist::Gaussian, 300, 3, 1.0));
  const auto small = ConstrainedDP::build(law, 100, disorder::DisorderField::generate(disorder::Dist::Gaussian, 100, 3, 1.0));
  for (int n = 1; n <= 100; ++n)
    for (int m = 1; m <= n; ++m) CHECK(big.log_z(n, m) == doctest::Approx(small.log_z(n, m)).epsilon(1e-13));
}

TEST_CASE("partition: full partition special cases") {
  const auto law = renewal::build_power_law(1.5, 512);
  const auto dp = ConstrainedDP::build(law, 300);
  const auto u = renewal::renewal_log_indicator(law, 300);
  const auto unit = PsiFactor::unit(Potential{});
  for (int n : {1, 10, 150, 300}) CHECK(full_partition(dp, unit, 0.0, n) == doctest::Approx(u[static_cast<std::size_t>(n)]).epsilon(1e-12));
  CHECK(full_partition(dp, unit, 0.0) == full_partition(dp, unit, 0.0, 300));
  CHECK_THROWS_AS(full_partition(dp, unit, 0.0, 301), DomainError);

  // Affine H(ρ) = aρ + b shifts h by a and log Z by N b.
  const auto affine = PsiFactor::unit(Potential{Affine{0.5, -0.2}});
  CHECK(full_partition(dp, affine, 0.3, 200) == doctest::Approx(200 * -0.2 + full_partition(dp, unit, 0.8, 200)).epsilon(1e-12));
}

TEST_CASE("brute-force oracle: hand-expanded N=1 and N=2") {
  const auto law = renewal::build_power_law(1.5, 16);
  const auto field = disorder::DisorderField::generate(disorder::Dist::Gaussian, 2, 9, 1.0);
  const auto& om = field.values();
  const auto psi = PsiFactor::exact(Potential{Overtwist{1.0}});
  const double h = 0.4;

  auto r = brute_force_oracle(law, psi, &field, h, 1);
  CHECK(r.log_z == doctest::Approx(h + om[1] + psi.log_psi(1, 1) + law.log_mass(1)).epsilon(1e-14));
  REQUIRE(r.probability.size() == 1);
  CHECK(r.probability.at(1U) == doctest::Approx(1.0));

  r = brute_force_oracle(law, psi, &field, h, 2);
  const double a = h + om[2] + psi.log_psi(1, 2) + law.log_mass(2);
  const double b = 2 * h + om[1] + om[2] + psi.log_psi(2, 2) + 2 * law.log_mass(1);
  CHECK(r.log_z == doctest::Approx(std::log(std::exp(a) + std::exp(b))).epsilon(1e-14));
  CHECK(r.probability.at(0b10U) == doctest::Approx(std::exp(a - r.log_z)));
  CHECK(r.probability.at(0b11U) == doctest::Approx(std::exp(b - r.log_z)));

  CHECK_THROWS_AS(brute_force_oracle(law, psi, nullptr, h, 17), CapacityError);
  CHECK_THROWS_AS(brute_force_oracle(law, psi, nullptr, h, 0), CapacityError);
}

TEST_CASE("partition: oracle matrix over potentials, disorder, N, alpha and h") {
  const std::vector<Potential> pots = {Potential{Zero{}}, Potential{Affine{0.5, -0.2}}, Potential{Overtwist{1.0}},
                                       Potential{Supercoil{1.0, 1.0}}};
  double worst = 0.0;
  for (double alpha : {0.7, 1.5}) {
    const auto law = renewal::build_power_law(alpha, 64);
    const auto field = disorder::DisorderField::generate(disorder::Dist::Gaussian, 14, 7, 1.0);
    for (bool disordered : {false, true}) {
      const auto dp = disordered ? ConstrainedDP::build(law, 14, field) : ConstrainedDP::build(law, 14);
      const std::vector<double> sw = disordered ? field.site_weights() : std::vector<double>{};
      for (const auto& p : pots) {
        const auto psi = PsiFactor::exact(p);
        for (int n : {6, 10, 14})
          for (double h : {-0.5, 0.0, 0.8}) {
            const double got = full_partition(dp, psi, h, n);
            worst = std::max(worst, std::abs(got - enum_log_z(law, psi, sw, h, n)));
            const auto br = brute_force_oracle(law, psi, disordered ? &field : nullptr, h, n);
            worst = std::max(worst, std::abs(got - br.log_z));
          }
      }
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("partition: homogeneous constrained masses are super-multiplicative") {
  const auto law = renewal::build_power_law(1.3, 128);
  const auto dp = ConstrainedDP::build(law, 120);
  Stream rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const int n1 = 1 + static_cast<int>(rng() % 60), n2 = 1 + static_cast<int>(rng() % 60);
    const int m1 = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n1));
    const int m2 = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n2));
    CHECK(dp.log_z(n1 + n2, m1 + m2) >= dp.log_z(n1, m1) + dp.log_z(n2, m2) - 1e-12);
  }
}

TEST_CASE("partition: quenched average sits below the annealed partition function") {
  const auto law = renewal::build_power_law(1.5, 256);
  const auto unit = PsiFactor::unit(Potential{});
  const double beta = 1.0, lam = disorder::lambda(disorder::Dist::Gaussian, beta);
  const auto hom = ConstrainedDP::build(law, 200);
  const int replicas = 16;
  for (double h : {-1.0, -0.3, 0.5}) {
    for (int n : {50, 200}) {
      std::vector<double> vals;
      for (int r = 0; r < replicas; ++r) {
        const auto dp = ConstrainedDP::build(
            law, 200, disorder::DisorderField::generate(disorder::Dist::Gaussian, 200, disorder::replica_seed(1, r), beta));
        vals.push_back(full_partition(dp, unit, h, n) / n);
      }
      const auto ms = stats::mean_stderr(vals);
      CHECK(ms.mean <= full_partition(hom, unit, h + lam, n) / n + 2.0 * ms.stderr_);
    }
  }
}

TEST_CASE("partition: capacity caps and table persistence") {
  const auto law = renewal::build_power_law(1.5, 10000);
  CHECK_THROWS_AS(ConstrainedDP::build(law, 5000), CapacityError);
  Limits tight;
  tight.max_bytes = table_bytes(100) - 1;
  CHECK_THROWS_AS(ConstrainedDP::build(law, 100, std::nullopt, tight), CapacityError);
  CHECK_THROWS_AS(ConstrainedDP::build(law, 10001), ParameterError);
  CHECK_THROWS_AS(ConstrainedDP::build(law, 50, disorder::DisorderField::generate(disorder::Dist::Gaussian, 40, 1, 1.0)),
                  ParameterError);
  CHECK(table_bytes(1024) == 1025ULL * 1026 / 2 * 8);

  const auto field = disorder::DisorderField::generate(disorder::Dist::Rademacher, 80, 77, 0.7);
  const auto dp = ConstrainedDP::build(law, 80, field);
  std::stringstream ss;
  dp.save(ss);
  const auto back = ConstrainedDP::load(ss, law);
  REQUIRE(back.field().has_value());
  CHECK(back.field()->values() == field.values());
  CHECK(back.beta() == 0.7);
  CHECK(back.field()->dist() == disorder::Dist::Rademacher);
  for (int n = 0; n <= 80; ++n)
    for (int m = 0; m <= n; ++m) {
      if (is_neg_inf(dp.log_z(n, m)))
        CHECK(is_neg_inf(back.log_z(n, m)));
      else
        CHECK(back.log_z(n, m) == dp.log_z(n, m));
    }

  std::stringstream ss2;
  dp.save(ss2);
  CHECK_THROWS_AS(ConstrainedDP::load(ss2, renewal::build_power_law(1.4, 10000)), Error);
}

TEST_CASE("partition: extrapolation recovers synthetic limits") {
  const std::vector<int> sizes = {128, 256, 512, 1024};
  std::vector<double> v1, v2;
  for (int n : sizes) {
    v1.push_back(0.37 + 1.3 * std::log(n) / n);
    v2.push_back(-0.2 - 4.0 / n);
  }
  CHECK(extrapolate(sizes, v1, Extrapolation::LogNOverN) == doctest::Approx(0.37).epsilon(1e-12));
  CHECK(extrapolate(sizes, v2, Extrapolation::OneOverN) == doctest::Approx(-0.2).epsilon(1e-12));
  const std::vector<int> one = {64};
  const std::vector<double> val = {1.25};
  CHECK(extrapolate(one, val, Extrapolation::LogNOverN) == 1.25);
}

TEST_CASE("estimate_f: homogeneous overtwist against the Legendre machinery") {
  const auto law = renewal::build_power_law(2.5, 4096);
  const Potential p{Overtwist{1.0}};
  const energy::GEvaluator ev(law, renewal::Support::Truncated);
  EstimateOptions opt;
  opt.sizes = {256, 512, 1024, 2048, 4096};
  const std::vector<double> hs = {-4.67, -2.0, -0.2, 0.5, 1.5};
  const auto est = estimate_f(PsiFactor::exact(p), law, hs, opt);
  REQUIRE(est.size() == hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const auto lf = energy::legendre_f(p, ev, hs[i]);
    INFO("h = " << hs[i] << ", estimate " << est[i].extrapolated << ", legendre " << lf.f);
    CHECK(std::abs(est[i].extrapolated - lf.f) <= 5e-3);
    CHECK(est[i].stderr_ == 0.0);
    CHECK(est[i].estimates.size() == opt.sizes.size());
    if (i > 0) CHECK(est[i].extrapolated >= est[i - 1].extrapolated);
  }
}

TEST_CASE("estimate_f: deep in the delocalized phase f equals H(0)") {
  const auto law = renewal::build_power_law(1.5, 2048);
  const Potential p{ConcaveQuadratic{0.3, 1.0}};
  EstimateOptions opt;
  opt.sizes = {256, 512, 1024, 2048};
  const auto est = estimate_f(PsiFactor::exact(p), law, {-6.0, -4.0}, opt);
  for (const auto& e : est) CHECK(std::abs(e.extrapolated - p.H_at_0()) <= 5e-3);
}

TEST_CASE("estimate_g: homogeneous values match the g evaluator") {
  const auto law = renewal::build_power_law(1.5, 4096);
  const energy::GEvaluator ev(law, renewal::Support::Truncated);
  EstimateOptions opt;
  opt.sizes = {512, 1024, 2048, 4096};
  const std::vector<double> rhos = {0.3, 0.6, 0.9};
  const auto est = estimate_g(law, rhos, opt);
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    INFO("rho = " << rhos[i]);
    CHECK(std::abs(est[i].extrapolated - ev(rhos[i]).g) <= 5e-3);
  }
  CHECK_THROWS_AS(estimate_g(law, {0.0}, opt), DomainError);
  opt.sizes = {1024, 512};
  CHECK_THROWS_AS(estimate_g(law, {0.5}, opt), ParameterError);
}

TEST_CASE("estimate_g: disorder raises g and keeps it concave") {
  const auto law = renewal::build_power_law(1.5, 512);
  EstimateOptions opt;
  opt.sizes = {128, 256, 512};
  opt.replicas = 6;
  opt.master_seed = 31;
  std::vector<double> rhos;
  for (int i = 1; i <= 9; ++i) rhos.push_back(0.1 * i);
  const auto hom = estimate_g(law, rhos, EstimateOptions{opt.sizes});
  opt.beta = 1.0;
  const auto dis = estimate_g(law, rhos, opt);
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    CHECK(dis[i].per_replica.size() == 6);
    CHECK(dis[i].stderr_ > 0.0);
    CHECK(dis[i].extrapolated >= hom[i].extrapolated - 2.0 * dis[i].stderr_);
  }
  for (std::size_t i = 1; i + 1 < rhos.size(); ++i) {
    const double d2 = dis[i + 1].extrapolated - 2.0 * dis[i].extrapolated + dis[i - 1].extrapolated;
    const double err = std::sqrt(std::pow(dis[i + 1].stderr_, 2) + 4.0 * std::pow(dis[i].stderr_, 2) +
                                 std::pow(dis[i - 1].stderr_, 2));
    CHECK(d2 <= 2.0 * err);
  }
}
