#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "testutil.hpp"
#include "zigzag/lyapunov.hpp"
#include "zigzag/spectra.hpp"

using Catch::Matchers::WithinAbs;
using zigzag::Complex;
using zigzag::Potential;
using zigzag::SectorConstants;
using testutil::kPi;

namespace {
const double kQuarterPi2 = kPi * kPi / 4.0;
}

TEST_CASE("delta0 values", "[lyapunov]") {
  auto q0 = Potential::zero();
  CHECK_THAT(zigzag::delta0(q0, kQuarterPi2).real(), WithinAbs(-1.25, 1e-12));
  CHECK_THAT(zigzag::delta0(q0, 0.0).real(), WithinAbs(1.0, 1e-12));
  CHECK_THAT(zigzag::delta0(Potential::constant(2.0), kQuarterPi2 + 2.0).real(),
             WithinAbs(-1.25, 1e-12));

  // against the closed free-case formula across the window
  for (int i = 0; i <= 200; ++i) {
    double lam = -10.0 + i * (900.0 + 10.0) / 200.0;
    CHECK_THAT(zigzag::delta0(q0, lam).real(), WithinAbs(testutil::free_delta0(lam), 1e-10));
  }
}

TEST_CASE("delta0 two formulas agree", "[lyapunov]") {
  for (const auto& q : {testutil::cos2pi(), testutil::random_piecewise8(29)}) {
    for (int i = 0; i < 100; ++i) {
      double lam = -6.0 + 2.1 * i;
      auto t = zigzag::transfer_matrix(q, lam);
      Complex a = zigzag::delta0_from(zigzag::discriminants(t));
      Complex b = zigzag::delta0_trace_form(t);
      CHECK(std::abs(a - b) < 1e-10);
    }
  }
}

TEST_CASE("xi and rho", "[lyapunov]") {
  auto q0 = Potential::zero();
  auto s31 = SectorConstants::make(3, 1);

  auto [xi, rho] = zigzag::xi_rho(q0, kQuarterPi2, s31);
  CHECK_THAT(xi.real(), WithinAbs(-0.5, 1e-12));
  CHECK_THAT(rho.real(), WithinAbs(0.0, 1e-12));

  auto s30 = SectorConstants::make(3, 0);
  auto [xi0, rho0] = zigzag::xi_rho(q0, 11.7, s30);
  (void)xi0;
  CHECK(std::abs(rho0) == 0.0);  // s_0 = 0

  auto [xiz, rhoz] = zigzag::xi_rho(q0, 0.0, s31);
  CHECK_THAT(xiz.real(), WithinAbs(1.75, 1e-12));
  CHECK_THAT(rhoz.real(), WithinAbs(-8.4375, 1e-12));
}

TEST_CASE("lyapunov branches", "[lyapunov]") {
  auto q0 = Potential::zero();
  auto s31 = SectorConstants::make(3, 1);

  auto p0 = zigzag::lyapunov_k(q0, 0.0, SectorConstants::make(3, 0));
  CHECK_THAT(p0.delta_plus.real(), WithinAbs(1.0, 1e-12));
  CHECK_THAT(p0.delta_minus.real(), WithinAbs(1.0, 1e-12));

  auto pb = zigzag::lyapunov_k(q0, kQuarterPi2, s31);
  CHECK_THAT(pb.delta_plus.real(), WithinAbs(-0.5, 1e-12));
  CHECK_THAT(pb.delta_minus.real(), WithinAbs(-0.5, 1e-12));

  // lambda with Delta_0 = -1: the anti-periodic coincidence point
  double lam = (kPi / 2.0 - std::asin(1.0 / 3.0));
  lam *= lam;
  auto pa = zigzag::lyapunov_k(q0, lam, s31);
  CHECK_THAT(pa.delta0.real(), WithinAbs(-1.0, 1e-10));
  double hi = std::max(pa.delta_plus.real(), pa.delta_minus.real());
  double lo = std::min(pa.delta_plus.real(), pa.delta_minus.real());
  CHECK_THAT(hi, WithinAbs(0.5, 1e-9));
  CHECK_THAT(lo, WithinAbs(-1.0, 1e-9));
}

TEST_CASE("sector monodromy at the free point", "[lyapunov]") {
  auto q0 = Potential::zero();

  auto m0 = zigzag::monodromy_k(q0, kQuarterPi2, SectorConstants::make(3, 0));
  CHECK_THAT(m0.M.trace().real(), WithinAbs(-2.5, 1e-12));
  CHECK_THAT(m0.M.trace().imag(), WithinAbs(0.0, 1e-12));
  CHECK(std::abs(m0.M.det() - 1.0) < 1e-12);

  auto s31 = SectorConstants::make(3, 1);
  auto m1 = zigzag::monodromy_k(q0, kQuarterPi2, s31);
  Complex w = std::polar(1.0, -kPi / 3.0);  // e^{-i pi/3}
  CHECK(std::abs(m1.M.det() - w * w) < 1e-12);
  CHECK(std::abs(m1.M.trace() - (-2.0) * w) < 1e-12);

  // conjugated entire form is exactly e^{-i pi/3} diag(-1,-1) here
  auto e = zigzag::sector_monodromy_entire(q0, kQuarterPi2, s31);
  CHECK(std::abs(e.a + w) < 1e-12);
  CHECK(std::abs(e.d + w) < 1e-12);
  CHECK(std::abs(e.b) < 1e-12);
  CHECK(std::abs(e.c) < 1e-12);

  CHECK_THROWS_AS(zigzag::monodromy_k(q0, kPi * kPi, s31), zigzag::DirichletPoleError);
}

TEST_CASE("multipliers", "[lyapunov]") {
  auto q0 = Potential::zero();

  // Delta_0 = 1 at lambda = 0: periodic edge, tau = {1, 1}
  auto t0 = zigzag::multipliers_from_matrix(zigzag::monodromy_k(q0, 0.0, SectorConstants::make(3, 0)));
  CHECK(std::abs(t0.first - 1.0) < 1e-6);   // double root: split is sqrt(noise)
  CHECK(std::abs(t0.second - 1.0) < 1e-6);

  // Delta_0 = -5/4 at lambda = pi^2/4: tau = {-2, -1/2}
  auto tm = zigzag::multipliers_from_matrix(
      zigzag::monodromy_k(q0, kQuarterPi2, SectorConstants::make(3, 0)));
  double hi = std::max(std::abs(tm.first), std::abs(tm.second));
  double lo = std::min(std::abs(tm.first), std::abs(tm.second));
  CHECK_THAT(hi, WithinAbs(2.0, 1e-10));
  CHECK_THAT(lo, WithinAbs(0.5, 1e-10));
  CHECK_THAT(tm.first.real() + tm.second.real(), WithinAbs(-2.5, 1e-10));

  // k = 1: product of multipliers is s^{-1}
  auto s31 = SectorConstants::make(3, 1);
  auto t1 = zigzag::multipliers_from_matrix(zigzag::monodromy_k(q0, kQuarterPi2, s31));
  CHECK(std::abs(t1.first * t1.second - std::conj(s31.s_pow_k)) < 1e-12);
}

TEST_CASE("determinant and trace identities on a grid", "[lyapunov]") {
  std::vector<Potential> pots = {Potential::zero(), Potential::constant(2.0), testutil::cos2pi()};
  for (const auto& q : pots) {
    for (int N : {3, 5, 9}) {
      for (int k = 0; k <= (N - 1) / 2; ++k) {
        auto sc = SectorConstants::make(N, k);
        for (int i = 0; i < 40; ++i) {
          double lam = -4.0 + 9.87 * i + 0.21;
          auto t = zigzag::transfer_matrix(q, lam);
          if (std::abs(t.phi1) < zigzag::pole_tol_at(lam)) continue;
          auto mk = zigzag::monodromy_k(q, lam, sc);
          CHECK(std::abs(mk.M.det() - std::conj(sc.s_pow_k)) < 1e-10);
          Complex d0 = zigzag::delta0_from(zigzag::discriminants(t));
          Complex want = 2.0 * (d0 + sc.s_k * sc.s_k) * std::conj(sc.s_pow_half_k) / sc.c_k;
          CHECK(std::abs(mk.M.trace() - want) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("two routes to the Lyapunov branches agree", "[lyapunov]") {
  std::vector<Potential> pots = {Potential::zero(), testutil::cos2pi(),
                                 testutil::random_piecewise8(31)};
  for (const auto& q : pots) {
    for (int N : {3, 5}) {
      for (int k = 0; k <= (N - 1) / 2; ++k) {
        auto sc = SectorConstants::make(N, k);
        int used = 0;
        for (int i = 0; i < 200 && used < 150; ++i) {
          double lam = -3.0 + 0.7 * i + 0.137;
          auto t = zigzag::transfer_matrix(q, lam);
          if (std::abs(t.phi1) < 100 * zigzag::pole_tol_at(lam)) continue;
          ++used;
          auto pt = zigzag::lyapunov_k(q, lam, sc);
          auto [tp, tm] = zigzag::multipliers_from_matrix(zigzag::monodromy_k(q, lam, sc));
          Complex d1 = 0.5 * (tp + 1.0 / tp);
          Complex d2 = 0.5 * (tm + 1.0 / tm);
          double direct = std::max(std::abs(d1 - pt.delta_plus), std::abs(d2 - pt.delta_minus));
          double swapped = std::max(std::abs(d1 - pt.delta_minus), std::abs(d2 - pt.delta_plus));
          CHECK(std::min(direct, swapped) < 1e-8);
        }
      }
    }
  }
}

TEST_CASE("sector k and N-k give the same branches", "[lyapunov]") {
  auto q = testutil::cos2pi();
  for (int N : {3, 5, 9}) {
    for (int k = 1; k <= (N - 1) / 2; ++k) {
      for (double lam : {0.9, 7.7, 31.3, 88.8}) {
        auto a = zigzag::lyapunov_k(q, lam, SectorConstants::make(N, k));
        auto b = zigzag::lyapunov_k(q, lam, SectorConstants::make(N, N - k));
        double direct = std::max(std::abs(a.delta_plus - b.delta_plus),
                                 std::abs(a.delta_minus - b.delta_minus));
        double swapped = std::max(std::abs(a.delta_plus - b.delta_minus),
                                  std::abs(a.delta_minus - b.delta_plus));
        CHECK(std::min(direct, swapped) < 1e-10);
      }
    }
  }
}

TEST_CASE("conjugated monodromy is entire across the Dirichlet spectrum", "[lyapunov]") {
  auto q = testutil::cos2pi();
  auto mu = zigzag::dirichlet_spectrum(q, 50.0);
  REQUIRE(!mu.empty());
  auto sc = SectorConstants::make(5, 2);
  auto at = zigzag::sector_monodromy_entire(q, mu[0], sc);
  auto lo = zigzag::sector_monodromy_entire(q, mu[0] - 1e-3, sc);
  auto hi = zigzag::sector_monodromy_entire(q, mu[0] + 1e-3, sc);
  CHECK(zigzag::max_abs_entry(at) < 50.0);
  CHECK(zigzag::max_abs_diff(lo, at) < 0.1);
  CHECK(zigzag::max_abs_diff(hi, at) < 0.1);
}

TEST_CASE("reality pattern on the real axis", "[lyapunov]") {
  auto q = testutil::random_piecewise8(41);
  auto sc = SectorConstants::make(5, 1);
  for (int i = 0; i < 120; ++i) {
    double lam = -4.0 + 0.9 * i;
    auto pt = zigzag::lyapunov_k(q, lam, sc);
    CHECK(std::abs(pt.delta0.imag()) < 1e-10);
    CHECK(std::abs(pt.rho.imag()) < 1e-10);
    if (pt.rho.real() >= 1e-9) {
      CHECK(std::abs(pt.delta_plus.imag()) < 1e-9);
      CHECK(std::abs(pt.delta_minus.imag()) < 1e-9);
    } else if (pt.rho.real() <= -1e-9) {
      CHECK(std::abs(pt.delta_plus - std::conj(pt.delta_minus)) < 1e-9);
    }
  }
}
