#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "testutil.hpp"
#include "zigzag/oracle.hpp"
#include "zigzag/spectra.hpp"

using Catch::Matchers::WithinAbs;
using zigzag::BandStructure;
using zigzag::LabeledRoot;
using zigzag::Potential;
using zigzag::PointKind;
using testutil::kPi;

namespace {

const double kPi2 = kPi * kPi;

std::map<std::pair<int, int>, double> by_label(const std::vector<LabeledRoot>& pts) {
  std::map<std::pair<int, int>, double> m;
  for (const auto& p : pts) m[{p.n, p.sign}] = p.lambda;
  return m;
}

double lab(const std::map<std::pair<int, int>, double>& m, int n, int sign) {
  auto it = m.find({n, sign});
  REQUIRE(it != m.end());
  return it->second;
}

std::vector<const zigzag::SpectralPoint*> points_of(const BandStructure& bs, PointKind kind,
                                                    int k) {
  std::vector<const zigzag::SpectralPoint*> v;
  for (const auto& p : bs.points)
    if (p.kind == kind && p.k == k) v.push_back(&p);
  return v;
}

}  // namespace

TEST_CASE("solve_level at the free periodic level", "[spectra]") {
  auto rs = zigzag::solve_level(Potential::zero(), 1.0, 100.0);
  // 0 simple, then coincident pairs at (pi n)^2
  REQUIRE(rs.roots.size() == 7);
  CHECK_THAT(rs.roots[0].lambda, WithinAbs(0.0, 1e-10));
  CHECK(!rs.roots[0].coincident);
  CHECK(rs.roots[0].n == 0);
  CHECK(rs.roots[0].sign == +1);
  for (int n = 1; n <= 3; ++n) {
    const auto& lo = rs.roots[2 * n - 1];
    const auto& hi = rs.roots[2 * n];
    CHECK_THAT(lo.lambda, WithinAbs(kPi2 * n * n, 1e-9));
    CHECK_THAT(hi.lambda, WithinAbs(kPi2 * n * n, 1e-9));
    CHECK(lo.coincident);
    CHECK(lo.n == n);
    CHECK(lo.sign == -1);
    CHECK(hi.sign == +1);
  }
}

TEST_CASE("solve_level at the free anti-periodic level", "[spectra]") {
  auto rs = zigzag::solve_level(Potential::zero(), -1.0, 20.0);
  REQUIRE(rs.roots.size() == 3);
  CHECK_THAT(rs.roots[0].lambda, WithinAbs(1.51526108714, 1e-9));
  CHECK_THAT(rs.roots[1].lambda, WithinAbs(3.65051936346, 1e-9));
  CHECK_THAT(rs.roots[2].lambda, WithinAbs(19.119211613, 1e-8));
}

TEST_CASE("solve_level at the degenerate bottom level", "[spectra]") {
  auto rs = zigzag::solve_level(Potential::zero(), -1.25, 30.0);
  REQUIRE(rs.roots.size() == 4);
  CHECK_THAT(rs.roots[0].lambda, WithinAbs(2.46740110027, 1e-9));
  CHECK_THAT(rs.roots[1].lambda, WithinAbs(2.46740110027, 1e-9));
  CHECK_THAT(rs.roots[2].lambda, WithinAbs(22.2066099025, 1e-8));
  CHECK(rs.roots[0].coincident);
  CHECK(rs.roots[2].coincident);
}

TEST_CASE("solve_level range policing and certification", "[spectra]") {
  CHECK_THROWS_AS(zigzag::solve_level(Potential::zero(), 1.5, 10.0), zigzag::LevelRangeError);
  CHECK_THROWS_AS(zigzag::solve_level(Potential::zero(), -1.3, 10.0), zigzag::LevelRangeError);

  // every reported root re-evaluates to its level
  auto q = testutil::cos2pi();
  auto rs = zigzag::solve_level(q, -0.5, 150.0);
  for (const auto& r : rs.roots)
    CHECK(std::abs(zigzag::delta0(q, r.lambda).real() + 0.5) <= 1e-10 * (1.0 + r.lambda));
}

TEST_CASE("odd root count below the band markers", "[spectra]") {
  // 2n+1 pattern: roots in [0, (pi(n+1/2))^2] for c in (-5/4, 1)
  for (const auto& q : {Potential::zero(), testutil::cos2pi()}) {
    auto rs = zigzag::solve_level(q, -0.5, 340.0);
    for (int n = 2; n <= 5; ++n) {
      double cut = kPi2 * (n + 0.5) * (n + 0.5) + q.mean();
      long cnt = std::count_if(rs.roots.begin(), rs.roots.end(),
                               [cut](const zigzag::LevelRoot& r) { return r.lambda <= cut; });
      CHECK(cnt == 2 * n + 1);
    }
  }
}

TEST_CASE("periodic eigenvalues", "[spectra]") {
  auto q0 = Potential::zero();
  auto p1 = by_label(zigzag::periodic_eigenvalues(q0, 3, 1, 60.0));
  CHECK_THAT(lab(p1, 0, +1), WithinAbs(0.912629840865, 1e-9));

  auto p0 = by_label(zigzag::periodic_eigenvalues(q0, 3, 0, 60.0));
  CHECK_THAT(lab(p0, 0, +1), WithinAbs(0.0, 1e-10));
  CHECK_THAT(lab(p0, 2, -1), WithinAbs(kPi2, 1e-9));
  CHECK_THAT(lab(p0, 2, +1), WithinAbs(kPi2, 1e-9));
  CHECK_THAT(lab(p0, 4, -1), WithinAbs(4 * kPi2, 1e-9));

  auto ps = by_label(zigzag::periodic_eigenvalues(Potential::constant(2.0), 3, 1, 62.0));
  for (const auto& [key, lam] : p1) {
    REQUIRE(ps.count(key) == 1);
    CHECK_THAT(ps[key], WithinAbs(lam + 2.0, 1e-9));
  }

  CHECK_THROWS_AS(zigzag::periodic_eigenvalues(q0, 3, 2, 60.0), zigzag::DomainError);
}

TEST_CASE("anti-periodic eigenvalues", "[spectra]") {
  auto q0 = Potential::zero();
  auto a = zigzag::antiperiodic_eigenvalues(q0, 3, 0, 30.0);
  REQUIRE(a.size() == 4);
  CHECK(a[0].n == 1);
  CHECK(a[0].sign == -1);
  CHECK(a[1].n == 1);
  CHECK(a[1].sign == +1);
  CHECK(a[2].n == 3);
  CHECK_THAT(a[0].lambda, WithinAbs(1.51526108714, 1e-9));
  CHECK_THAT(a[1].lambda, WithinAbs(3.65051936346, 1e-9));
  CHECK_THAT(a[2].lambda, WithinAbs(19.119211613, 1e-8));
  CHECK_THAT(a[3].lambda, WithinAbs(25.524986442, 1e-8));

  // the level does not depend on k: identical sequences, bit for bit
  auto q = testutil::cos2pi();
  auto a0 = zigzag::antiperiodic_eigenvalues(q, 5, 0, 40.0);
  auto a2 = zigzag::antiperiodic_eigenvalues(q, 5, 2, 40.0);
  REQUIRE(a0.size() == a2.size());
  for (std::size_t i = 0; i < a0.size(); ++i) CHECK(a0[i].lambda == a2[i].lambda);

  auto as = zigzag::antiperiodic_eigenvalues(Potential::constant(2.0), 3, 0, 32.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK_THAT(as[i].lambda, WithinAbs(a[i].lambda + 2.0, 1e-9));
}

TEST_CASE("resonances at N=3", "[spectra]") {
  auto q0 = Potential::zero();
  auto r = by_label(zigzag::resonances(q0, 3, 1, 30.0));
  CHECK_THAT(lab(r, 0, +1), WithinAbs(0.707396508611, 1e-9));
  // k = N/3: odd pairs coincide at (pi(n-1/2))^2
  CHECK_THAT(lab(r, 1, -1), WithinAbs(2.46740110027, 1e-9));
  CHECK_THAT(lab(r, 1, +1), WithinAbs(2.46740110027, 1e-9));
  CHECK_THAT(lab(r, 3, -1), WithinAbs(22.2066099025, 1e-8));

  auto rs = by_label(zigzag::resonances(Potential::constant(2.0), 3, 1, 32.0));
  for (const auto& [key, lam] : r) {
    REQUIRE(rs.count(key) == 1);
    CHECK_THAT(rs[key], WithinAbs(lam + 2.0, 1e-9));
  }
}

TEST_CASE("resonances at N=5 realize the alternation", "[spectra]") {
  auto q0 = Potential::zero();
  auto pts = zigzag::resonances(q0, 5, 2, 30.0);
  REQUIRE(pts.size() >= 7);
  // merged resonance order with the level pattern +,-,-,+,+,-,-
  CHECK_THAT(pts[0].lambda, WithinAbs(1.0022765801, 1e-9));
  CHECK_THAT(pts[1].lambda, WithinAbs(2.0826178141, 1e-9));
  CHECK_THAT(pts[2].lambda, WithinAbs(2.88478289776, 1e-9));
  CHECK_THAT(pts[3].lambda, WithinAbs(4.58154765264, 1e-9));
  CHECK_THAT(pts[4].lambda, WithinAbs(17.1622143097, 1e-8));
  CHECK_THAT(pts[5].lambda, WithinAbs(21.0196615, 1e-6));
  CHECK_THAT(pts[6].lambda, WithinAbs(23.4261567, 1e-6));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    int expect_n = static_cast<int>((i + 1) / 2);
    CHECK(pts[i].n == expect_n);
  }
  CHECK_THROWS_AS(zigzag::resonances(q0, 5, 0, 30.0), zigzag::DomainError);
}

TEST_CASE("dirichlet spectrum", "[spectra]") {
  auto q0 = Potential::zero();
  auto mu = zigzag::dirichlet_spectrum(q0, 100.0);
  REQUIRE(mu.size() == 3);
  for (int n = 1; n <= 3; ++n) CHECK_THAT(mu[n - 1], WithinAbs(kPi2 * n * n, 1e-10));

  auto mus = zigzag::dirichlet_spectrum(Potential::constant(2.0), 102.0);
  for (int n = 1; n <= 3; ++n) CHECK_THAT(mus[n - 1], WithinAbs(kPi2 * n * n + 2.0, 1e-10));

  // against the independent shooting oracle
  auto q = testutil::cos2pi();
  auto muc = zigzag::dirichlet_spectrum(q, 100.0);
  REQUIRE(muc.size() == 3);
  for (double m : muc) CHECK(std::abs(testutil::shoot_phi1(q, m)) < 1e-9);
  double mu1 = testutil::bisect([&](double l) { return testutil::shoot_phi1(q, l); }, 8.0, 12.0);
  CHECK_THAT(muc[0], WithinAbs(mu1, 1e-9));
}

TEST_CASE("neumann spectrum", "[spectra]") {
  auto q0 = Potential::zero();
  auto nu = zigzag::neumann_spectrum(q0, 100.0);
  REQUIRE(nu.size() == 4);
  CHECK_THAT(nu[0], WithinAbs(0.0, 1e-10));
  for (int n = 1; n <= 3; ++n) CHECK_THAT(nu[n], WithinAbs(kPi2 * n * n, 1e-10));

  auto nus = zigzag::neumann_spectrum(Potential::constant(2.0), 102.0);
  CHECK_THAT(nus[0], WithinAbs(2.0, 1e-10));

  // nu_n and mu_n inside the closed even k=0 gap
  auto q = testutil::cos2pi();
  auto nc = zigzag::neumann_spectrum(q, 100.0);
  auto mc = zigzag::dirichlet_spectrum(q, 100.0);
  auto per = by_label(zigzag::periodic_eigenvalues(q, 3, 0, 100.0));
  for (int n = 1; n <= 2; ++n) {
    double lo = lab(per, 2 * n, -1), hi = lab(per, 2 * n, +1);
    CHECK(mc[n - 1] >= lo - 1e-9);
    CHECK(mc[n - 1] <= hi + 1e-9);
    CHECK(nc[n] >= lo - 1e-9);
    CHECK(nc[n] <= hi + 1e-9);
  }
}

TEST_CASE("critical points of Delta_0", "[spectra]") {
  auto q0 = Potential::zero();
  auto cp = zigzag::delta0_critical_points(q0, 45.0);
  REQUIRE(cp.criticals.size() == 4);
  for (int n = 1; n <= 4; ++n)
    CHECK_THAT(cp.criticals[n - 1], WithinAbs(kPi2 * n * n / 4.0, 1e-8));
  CHECK_THAT(cp.values[0], WithinAbs(-1.25, 1e-10));
  CHECK_THAT(cp.values[1], WithinAbs(1.0, 1e-10));

  auto cps = zigzag::delta0_critical_points(Potential::constant(2.0), 47.0);
  for (std::size_t i = 0; i < cp.criticals.size(); ++i)
    CHECK_THAT(cps.criticals[i], WithinAbs(cp.criticals[i] + 2.0, 1e-7));
}

TEST_CASE("free band structure N=3: no gaps", "[spectra][assembly]") {
  auto bs = zigzag::assemble_bands(Potential::zero(), 3, 400.0);
  for (const auto& g : bs.gaps) CHECK(g.closed);
  CHECK_THAT(bs.bands.front().lo, WithinAbs(0.0, 1e-10));
  for (std::size_t i = 0; i + 1 < bs.bands.size(); ++i)
    CHECK_THAT(bs.bands[i].hi, WithinAbs(bs.bands[i + 1].lo, 1e-9));
  REQUIRE(bs.flat_bands.size() == 6);
  for (int n = 1; n <= 6; ++n)
    CHECK_THAT(bs.flat_bands[n - 1], WithinAbs(kPi2 * n * n, 1e-9));
  CHECK(bs.q0 == 0.0);
  for (double k : bs.kappa) CHECK_THAT(k, WithinAbs(0.0, 1e-9));
  for (double h : bs.h) CHECK_THAT(h, WithinAbs(0.0, 1e-9));
}

TEST_CASE("free band structure N=5: growing odd gaps", "[spectra][assembly]") {
  auto bs = zigzag::assemble_bands(Potential::zero(), 5, 250.0);
  const double want_lo[5] = {2.082617814, 21.01966153, 59.69591405, 118.1113754, 196.2660455};
  const double want_hi[5] = {2.884782898, 23.42615678, 63.70673947, 123.726531, 203.4855313};
  std::vector<double> widths;
  for (const auto& g : bs.gaps) {
    if (g.n % 2 == 0) {
      CHECK(g.closed);  // even gaps empty in the free case
    } else {
      REQUIRE(!g.closed);
      CHECK(g.kind == zigzag::GapKind::Resonance);
      int j = (g.n - 1) / 2;
      REQUIRE(j < 5);
      CHECK_THAT(g.interval.lo, WithinAbs(want_lo[j], 1e-7));
      CHECK_THAT(g.interval.hi, WithinAbs(want_hi[j], 1e-7));
      widths.push_back(g.interval.width());
    }
  }
  REQUIRE(widths.size() >= 5);
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) CHECK(widths[i] < widths[i + 1]);
}

TEST_CASE("shift covariance of the whole band structure", "[spectra][assembly]") {
  auto a = zigzag::assemble_bands(Potential::zero(), 3, 100.0);
  auto b = zigzag::assemble_bands(Potential::constant(2.0), 3, 102.0);
  auto key = [](const zigzag::SpectralPoint& p) {
    return std::tuple<int, int, int, int>(static_cast<int>(p.kind), p.k, p.n, p.sign);
  };
  std::map<std::tuple<int, int, int, int>, double> left;
  for (const auto& p : a.points) left[key(p)] = p.lambda;
  std::size_t matched = 0;
  for (const auto& p : b.points) {
    auto it = left.find(key(p));
    if (it == left.end()) continue;
    ++matched;
    CHECK_THAT(p.lambda, WithinAbs(it->second + 2.0, 1e-9));
  }
  CHECK(matched >= a.points.size() - 4);  // the windows may disagree at the very top
  for (std::size_t i = 0; i < std::min(a.bands.size(), b.bands.size()); ++i) {
    CHECK_THAT(b.bands[i].lo, WithinAbs(a.bands[i].lo + 2.0, 1e-9));
    CHECK_THAT(b.bands[i].hi, WithinAbs(a.bands[i].hi + 2.0, 1e-9));
  }
}

TEST_CASE("interlacing and nesting for nontrivial potentials", "[spectra][assembly]") {
  struct Config {
    Potential q;
    int N;
    double lmax;
  };
  std::vector<Config> configs = {{testutil::cos2pi(), 5, 150.0},
                                 {testutil::random_piecewise8(2024), 5, 150.0}};
  for (const auto& cfg : configs) {
    auto bs = zigzag::assemble_bands(cfg.q, cfg.N, cfg.lmax);
    int m = bs.m;

    // band heads: lambda_{0,0}^+ < lambda_{1,0}^+ < ... < lambda_{m,0}^+ < lambda_{0,1}^-
    std::vector<double> bottoms;
    double first_anti = 0.0;
    for (int k = 0; k <= m; ++k) {
      auto per = points_of(bs, PointKind::Periodic, k);
      REQUIRE(!per.empty());
      bottoms.push_back(per.front()->lambda);
    }
    for (const auto& p : bs.points)
      if (p.kind == PointKind::Antiperiodic && p.n == 1 && p.sign == -1) first_anti = p.lambda;
    for (int k = 0; k < m; ++k) CHECK(bottoms[k] < bottoms[k + 1]);
    CHECK(bottoms.back() < first_anti);

    // even-edge tails: lambda_{m,2}^- < ... < lambda_{0,2}^-
    std::vector<double> lam2minus(m + 1);
    for (int k = 0; k <= m; ++k)
      for (const auto* p : points_of(bs, PointKind::Periodic, k))
        if (p->n == 2 && p->sign == -1) lam2minus[k] = p->lambda;
    for (int k = 0; k < m; ++k) CHECK(lam2minus[k + 1] < lam2minus[k]);

    // even gaps nest upward in k: gamma_{0,2n} inside gamma_{1,2n} inside ...
    for (int n = 2; n < static_cast<int>(bs.sector_gaps[0].size()); n += 2) {
      for (int k = 0; k < m; ++k) {
        const auto& inner = bs.sector_gaps[k][n - 1];
        const auto& outer = bs.sector_gaps[k + 1][n - 1];
        CHECK(outer.lo <= inner.lo + 1e-9);
        CHECK(inner.hi <= outer.hi + 1e-9);
      }
    }

    // extrema of Delta_0: minima <= -5/4, maxima >= 1
    auto cp = zigzag::delta0_critical_points(cfg.q, cfg.lmax);
    for (std::size_t i = 0; i < cp.values.size(); ++i) {
      if (i % 2 == 0)
        CHECK(cp.values[i] <= -1.25 + 1e-9 * (1 + cp.criticals[i]));
      else
        CHECK(cp.values[i] >= 1.0 - 1e-9 * (1 + cp.criticals[i]));
    }

    // mu_n, nu_n inside the closed even k=0 gaps
    auto per0 = by_label([&] {
      std::vector<LabeledRoot> v;
      for (const auto* p : points_of(bs, PointKind::Periodic, 0))
        v.push_back({p->lambda, p->n, p->sign, p->coincident});
      return v;
    }());
    auto nu = zigzag::neumann_spectrum(cfg.q, cfg.lmax);
    for (std::size_t n = 1; n <= bs.flat_bands.size(); ++n) {
      auto lo = per0.find({2 * static_cast<int>(n), -1});
      auto hi = per0.find({2 * static_cast<int>(n), +1});
      if (lo == per0.end() || hi == per0.end()) break;
      CHECK(bs.flat_bands[n - 1] >= lo->second - 1e-8);
      CHECK(bs.flat_bands[n - 1] <= hi->second + 1e-8);
      if (n < nu.size()) {
        CHECK(nu[n] >= lo->second - 1e-8);
        CHECK(nu[n] <= hi->second + 1e-8);
      }
    }
  }
}

TEST_CASE("stable gaps equal scalar Hill gaps in emptiness", "[spectra][assembly]") {
  // a stable gap G_{2n} is empty iff the scalar Hill gap gamma_n is empty
  auto q0 = Potential::zero();
  auto hg0 = zigzag::hill_gaps(q0, 120.0);
  for (const auto& g : hg0) CHECK(g.width() <= 1e-9);

  auto q = testutil::random_piecewise8(2024);
  auto hg = zigzag::hill_gaps(q, 120.0);
  auto bs = zigzag::assemble_bands(q, 5, 150.0);
  for (const auto& g : bs.gaps) {
    if (g.n % 2 != 0) continue;
    std::size_t hill_index = g.n / 2 - 1;
    if (hill_index >= hg.size()) break;
    bool hill_open = hg[hill_index].width() > 1e-7;
    bool graph_open = !g.closed && g.interval.width() > 1e-7;
    CHECK(hill_open == graph_open);
    if (graph_open) {
      // gamma_{0,2n} sits inside the scalar gap
      CHECK(g.interval.lo >= hg[hill_index].lo - 1e-8);
      CHECK(g.interval.hi <= hg[hill_index].hi + 1e-8);
    }
  }
}

TEST_CASE("band membership agrees with assembled sector bands", "[spectra][assembly]") {
  auto q = testutil::cos2pi();
  auto bs = zigzag::assemble_bands(q, 5, 90.0);
  for (int k = 1; k <= bs.m; ++k) {
    for (double lam = 0.35; lam < 60.0; lam += 2.37) {
      bool in_band = false;
      bool near_edge = false;
      for (const auto& b : bs.sector_bands[k]) {
        if (lam >= b.lo + 1e-6 && lam <= b.hi - 1e-6) in_band = true;
        if (std::abs(lam - b.lo) < 1e-6 || std::abs(lam - b.hi) < 1e-6) near_edge = true;
      }
      if (near_edge) continue;
      CHECK(zigzag::oracle::band_membership(q, 5, k, lam) == in_band);
    }
  }
}

TEST_CASE("even potential: odd gaps close and endpoints are {mu, nu}", "[spectra][assembly]") {
  auto q = testutil::cos2pi();
  auto bs = zigzag::assemble_bands(q, 9, 120.0);
  for (const auto& g : bs.gaps)
    if (g.n % 2 == 1) CHECK(g.interval.width() < 1e-8);

  // even q: gap edges of gamma_{0,2n} coincide with {mu_n, nu_n}
  auto nu = zigzag::neumann_spectrum(q, 120.0);
  auto per0 = points_of(bs, PointKind::Periodic, 0);
  for (std::size_t n = 1; n <= 2; ++n) {
    double lo = 0, hi = 0;
    for (const auto* p : per0) {
      if (p->n == static_cast<int>(2 * n) && p->sign == -1) lo = p->lambda;
      if (p->n == static_cast<int>(2 * n) && p->sign == +1) hi = p->lambda;
    }
    double mu_n = bs.flat_bands[n - 1], nu_n = nu[n];
    double a = std::min(mu_n, nu_n), b = std::max(mu_n, nu_n);
    CHECK_THAT(lo, WithinAbs(a, 1e-8));
    CHECK_THAT(hi, WithinAbs(b, 1e-8));
  }
}

TEST_CASE("forward spectral data", "[spectra]") {
  auto f0 = zigzag::forward_spectral_data(Potential::zero(), 4);
  CHECK(f0.q0 == 0.0);
  for (double k : f0.kappa) CHECK_THAT(k, WithinAbs(0.0, 1e-9));
  for (double h : f0.h) CHECK_THAT(h, WithinAbs(0.0, 1e-10));

  auto fc = zigzag::forward_spectral_data(Potential::constant(2.0), 4);
  CHECK_THAT(fc.q0, WithinAbs(2.0, 1e-14));
  for (double k : fc.kappa) CHECK_THAT(k, WithinAbs(0.0, 1e-9));
  for (double h : fc.h) CHECK_THAT(h, WithinAbs(0.0, 1e-10));

  // even potential: zero norming constants
  auto fe = zigzag::forward_spectral_data(testutil::cos2pi(), 10);
  for (double h : fe.h) CHECK(std::abs(h) < 1e-8);
}

TEST_CASE("N=1 degenerates to the k=0 sector", "[spectra][assembly]") {
  auto bs = zigzag::assemble_bands(Potential::zero(), 1, 60.0);
  CHECK(bs.m == 0);
  for (const auto& g : bs.gaps) {
    if (g.n % 2 == 0) CHECK(g.closed);
    else CHECK(!g.closed);  // gamma_{0,odd} is the anti-periodic gap, open for q=0
  }
}

TEST_CASE("sampled representation runs the whole pipeline", "[spectra]") {
  // cos 2 pi t given as samples: the linear interpolant differs from the
  // smooth potential by O(grid^2), so spectra agree to that resolution
  std::vector<double> vals;
  for (int i = 0; i <= 4096; ++i) vals.push_back(std::cos(2.0 * kPi * i / 4096.0));
  auto qs = Potential::samples(vals);
  auto qf = testutil::cos2pi();
  auto ms = zigzag::dirichlet_spectrum(qs, 100.0);
  auto mf = zigzag::dirichlet_spectrum(qf, 100.0);
  REQUIRE(ms.size() == mf.size());
  for (std::size_t i = 0; i < ms.size(); ++i)
    CHECK_THAT(ms[i], WithinAbs(mf[i], 1e-5));
  CHECK_THAT(zigzag::delta0(qs, 42.0).real(), WithinAbs(zigzag::delta0(qf, 42.0).real(), 1e-6));
}

TEST_CASE("negative-mean potential pushes the spectrum below zero", "[spectra][assembly]") {
  // q = -4 on [0, 1/2), +1 on [1/2, 1): mean -3/2.  Reference values from an
  // independent high-resolution shooting computation.
  auto q = Potential::piecewise({0.0, 0.5, 1.0}, {-4.0, 1.0});
  auto bs = zigzag::assemble_bands(q, 7, 120.0);
  CHECK_THAT(bs.bands.front().lo, WithinAbs(-1.672895297942, 1e-9));
  REQUIRE(!bs.flat_bands.empty());
  CHECK_THAT(bs.flat_bands.front(), WithinAbs(8.2120191504788, 1e-9));
  for (std::size_t i = 0; i + 1 < bs.bands.size(); ++i)
    CHECK(bs.bands[i].hi <= bs.bands[i + 1].lo + 1e-9 * (1.0 + 120.0));
  CHECK_THAT(bs.q0, WithinAbs(-1.5, 1e-14));
}

TEST_CASE("odd gaps open for a non-even potential when N is divisible by 3",
          "[spectra][assembly]") {
  auto bs = zigzag::assemble_bands(testutil::sin2pi(), 9, 60.0);
  REQUIRE(!bs.gaps.empty());
  const auto& g1 = bs.gaps.front();
  REQUIRE(g1.n == 1);
  CHECK(g1.kind == zigzag::GapKind::Resonance);
  REQUIRE(!g1.closed);
  CHECK_THAT(g1.interval.lo, WithinAbs(2.30991670998, 1e-7));
  CHECK_THAT(g1.interval.hi, WithinAbs(2.59247845876, 1e-7));
}

TEST_CASE("rich fourier potentials propagate cleanly", "[spectra]") {
  std::vector<double> a(40, 0.0), b(40, 0.0);
  for (int n = 0; n < 40; ++n) {
    a[n] = 1.0 / ((n + 1.0) * (n + 1.0));
    b[n] = (n % 2 ? -1.0 : 1.0) / ((n + 1.0) * (n + 1.0) * (n + 1.0));
  }
  auto q = Potential::fourier(0.5, a, b);
  for (double lam : {-2.0, 7.7, 93.0}) {
    auto t = zigzag::transfer_matrix(q, lam);
    CHECK(std::abs(t.det() - 1.0) < 1e-10);
    CHECK(std::abs(zigzag::delta0_from(zigzag::discriminants(t)) - zigzag::delta0_trace_form(t)) <
          1e-10);
  }
  // half-cosine coefficients against quadrature for the mixed representation
  for (int n = 1; n <= 4; ++n) {
    double want = testutil::quad(
        [&](double t) { return q.periodic(t) * std::cos(kPi * n * t); }, 0.0, 1.0);
    CHECK_THAT(q.half_cosine_coeff(n), WithinAbs(want, 1e-10));
  }
}

TEST_CASE("deterministic across worker counts", "[spectra]") {
  auto q = testutil::random_piecewise8(99);
  auto a = zigzag::assemble_bands(q, 3, 80.0, {}, 1);
  auto b = zigzag::assemble_bands(q, 3, 80.0, {}, 4);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i)
    CHECK(a.points[i].lambda == b.points[i].lambda);
}
