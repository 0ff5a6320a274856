#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "zigzag/asymptotics.hpp"
#include "zigzag/eigenfunctions.hpp"
#include "zigzag/errors.hpp"
#include "zigzag/hill.hpp"
#include "zigzag/lyapunov.hpp"
#include "zigzag/oracle.hpp"
#include "zigzag/potential.hpp"
#include "zigzag/spectra.hpp"

namespace zigzag {

struct ValidationResult {
  std::string name;
  bool pass;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationResult> results;
  std::vector<AsymptoticCheck> checks;
  bool all_pass() const {
    for (const auto& r : results)
      if (!r.pass) return false;
    return !results.empty();
  }
};

namespace detail {

template <typename Fn>
void run_check(ValidationReport& rep, const std::string& name, Fn&& fn) {
  try {
    rep.results.push_back({name, true, fn()});
  } catch (const std::exception& e) {
    rep.results.push_back({name, false, e.what()});
  }
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

}  // namespace detail

/// Invariant, oracle and asymptotics suite for one (q, N) configuration; the
/// backend of `validate`.  Tolerances flow into every scan, so a corrupted
/// tol_root surfaces as level-root certification failures.
inline ValidationReport run_validation(const Potential& q, int N, double lambda_max,
                                       Tolerances tol = {}, int workers = 1,
                                       std::uint64_t seed = 20110901) {
  ValidationReport rep;
  const int m = (N - 1) / 2;
  std::mt19937_64 rng(seed);

  detail::run_check(rep, "wronskian-det", [&] {
    std::uniform_real_distribution<double> dist(-5.0, lambda_max);
    double worst = 0.0;
    for (int i = 0; i < 300; ++i) {
      double lam = dist(rng);
      TransferMatrix t = transfer_matrix(q, lam, tol.matrix);
      worst = std::max(worst, std::abs(t.det() - 1.0));
      if (lam < -2.0) continue;
      for (int k = 0; k <= m; ++k) {
        SectorConstants sc = SectorConstants::make(N, k);
        // similarity-invariant determinant of M_k, finite across sigma_D
        Mat2 e = sector_monodromy_entire(t, sc);
        worst = std::max(worst, std::abs(e.det() - std::conj(sc.s_pow_k)));
      }
    }
    detail::require(worst <= 1e-10, "det residual " + detail::fmt(worst));
    return "max det residual " + detail::fmt(worst);
  });

  detail::run_check(rep, "delta0-two-forms", [&] {
    std::uniform_real_distribution<double> dist(-5.0, lambda_max);
    double worst = 0.0;
    for (int i = 0; i < 300; ++i) {
      TransferMatrix t = transfer_matrix(q, dist(rng), tol.matrix);
      worst = std::max(worst,
                       std::abs(delta0_from(discriminants(t)) - delta0_trace_form(t)));
    }
    detail::require(worst <= 1e-10, "two-form residual " + detail::fmt(worst));
    return "max |DY - trace form| " + detail::fmt(worst);
  });

  detail::run_check(rep, "shift-covariance", [&] {
    Potential qs = q.shifted(1.5);
    std::uniform_real_distribution<double> dist(-5.0, lambda_max);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      double lam = dist(rng);
      TransferMatrix a = transfer_matrix(qs, lam, tol.matrix);
      TransferMatrix b = transfer_matrix(q, lam - 1.5, tol.matrix);
      worst = std::max({worst, std::abs(a.theta1 - b.theta1), std::abs(a.phi1 - b.phi1),
                        std::abs(a.dtheta1 - b.dtheta1), std::abs(a.dphi1 - b.dphi1)});
    }
    detail::require(worst <= 1e-9, "shift residual " + detail::fmt(worst));
    return "max entry deviation " + detail::fmt(worst);
  });

  auto mu = dirichlet_spectrum(q, lambda_max, tol, workers);
  auto far_from_poles = [&mu](double lam) {
    for (double p : mu)
      if (std::abs(lam - p) < 0.05) return false;
    return true;
  };

  detail::run_check(rep, "oracle-monodromy", [&] {
    std::uniform_real_distribution<double> dist(-3.0, lambda_max);
    std::uniform_int_distribution<int> kdist(0, m);
    double worst = 0.0;
    int done = 0;
    while (done < 100) {
      double lam = dist(rng);
      if (!far_from_poles(lam)) continue;
      int k = kdist(rng);
      SectorConstants sc = SectorConstants::make(N, k);
      Mat2 direct = oracle::monodromy_direct(q, lam, k, N, tol).M;
      Mat2 closed = monodromy_k(q, lam, sc, tol.matrix, tol.pole).M;
      double scale = std::max(1.0, max_abs_entry(closed));
      worst = std::max(worst, max_abs_diff(direct, closed) / scale);
      ++done;
    }
    detail::require(worst <= 1e-8, "oracle deviation " + detail::fmt(worst));
    return "max entrywise deviation " + detail::fmt(worst);
  });

  detail::run_check(rep, "oracle-multiplier-identities", [&] {
    std::uniform_real_distribution<double> dist(-3.0, lambda_max);
    std::uniform_int_distribution<int> kdist(0, m);
    double worst = 0.0;
    int done = 0;
    while (done < 50) {
      double lam = dist(rng);
      if (!far_from_poles(lam)) continue;
      worst = std::max(worst, oracle::multiplier_relations(q, N, kdist(rng), lam, tol));
      ++done;
    }
    detail::require(worst <= 1e-8, "multiplier-identity residual " + detail::fmt(worst));
    return "max multiplier-identity residual " + detail::fmt(worst);
  });

  detail::run_check(rep, "lyapunov-two-routes", [&] {
    double worst = 0.0;
    int count = 0;
    for (int i = 0; i < 200 && count < 200; ++i) {
      double lam = -2.0 + (lambda_max + 2.0) * (i + 0.5) / 200.0;
      if (!far_from_poles(lam)) continue;
      ++count;
      for (int k = 0; k <= m; ++k) {
        SectorConstants sc = SectorConstants::make(N, k);
        LyapunovPoint p = lyapunov_k(q, lam, sc, tol.matrix);
        auto [tp, tm] = multipliers_from_matrix(monodromy_k(q, lam, sc, tol.matrix, tol.pole));
        Complex d1 = 0.5 * (tp + 1.0 / tp);
        Complex d2 = 0.5 * (tm + 1.0 / tm);
        double direct = std::max(std::abs(d1 - p.delta_plus), std::abs(d2 - p.delta_minus));
        double swapped = std::max(std::abs(d1 - p.delta_minus), std::abs(d2 - p.delta_plus));
        worst = std::max(worst, std::min(direct, swapped));
      }
    }
    detail::require(worst <= 1e-8, "two-route deviation " + detail::fmt(worst));
    return "max unordered-pair deviation " + detail::fmt(worst);
  });

  detail::run_check(rep, "level-root-certification", [&] {
    LevelScan scan = make_delta0_scan(q, lambda_max, tol, workers);
    std::size_t total = 0;
    total += scan.roots_at(1.0).size();
    total += scan.roots_at(-1.0).size();
    total += scan.roots_at(0.0).size();
    for (int k = 1; k <= m; ++k) total += resonances_from_scan(scan, N, k).size();
    return "certified " + std::to_string(total) + " roots against their levels";
  });

  detail::run_check(rep, "band-assembly", [&] {
    BandStructure bs = assemble_bands(q, N, lambda_max, tol, workers);
    // bands and gaps partition [E_0^+, ...] without overlap
    for (std::size_t i = 0; i + 1 < bs.bands.size(); ++i)
      detail::require(bs.bands[i].hi <= bs.bands[i + 1].lo + 1e-9 * (1.0 + lambda_max),
                      "bands overlap");
    // flat bands inside closed even k=0 gaps
    std::vector<double> lo2n, hi2n;
    for (const auto& p : bs.points)
      if (p.kind == PointKind::Periodic && p.k == 0 && p.n >= 2) {
        if (p.sign < 0) lo2n.push_back(p.lambda);
        else hi2n.push_back(p.lambda);
      }
    std::size_t nn = std::min({lo2n.size(), hi2n.size(), bs.flat_bands.size()});
    for (std::size_t i = 0; i < nn; ++i)
      detail::require(bs.flat_bands[i] >= lo2n[i] - 1e-8 && bs.flat_bands[i] <= hi2n[i] + 1e-8,
                      "flat band outside closed even gap");
    return std::to_string(bs.bands.size()) + " bands, " + std::to_string(bs.flat_bands.size()) +
           " flat bands";
  });

  detail::run_check(rep, "flatband-eigenfunctions", [&] {
    double worst = 0.0;
    std::size_t nmu = std::min<std::size_t>(3, mu.size());
    for (std::size_t i = 0; i < nmu; ++i)
      for (int k = 0; k <= m; ++k) {
        auto f = build_flatband(q, mu[i], k, N, tol);
        worst = std::max(worst, kirchhoff_residual(f, q, tol));
      }
    detail::require(worst <= 1e-9, "kirchhoff residual " + detail::fmt(worst));
    return "max Kirchhoff residual " + detail::fmt(worst);
  });

  auto asym = [&rep](const std::string& name, AsymptoticCheck c) {
    rep.results.push_back({name, c.pass,
                           c.pass ? "residual trend ok" : "criterion failed: " + c.criterion});
    rep.checks.push_back(std::move(c));
  };
  const int alo = 5, ahi = 24;
  detail::run_check(rep, "asymptotics", [&] {
    asym("asym-delta0-tail", check_delta0_tail(q, alo, ahi, tol));
    asym("asym-antiperiodic", check_antiperiodic_tail(q, alo, ahi, tol, workers));
    asym("asym-even-gap", check_even_gap_tail(q, alo, ahi, tol, workers));
    asym("asym-level-root", check_level_root_tail(q, -0.5, alo, ahi, tol, workers));
    asym("asym-delta-minus", check_delta_minus_tail(q, alo, ahi, tol));
    if (m >= 1) asym("asym-periodic-k", check_periodic_k_tail(q, N, 1, alo, ahi, tol, workers));
    for (int k = 1; k <= m; ++k)
      if (3 * k != N) {
        asym("asym-resonance-k", check_resonance_tail(q, N, k, alo, ahi, tol, workers));
        break;
      }
    if (N % 3 == 0) asym("asym-odd-gap", check_odd_gap_tail(q, N, alo, ahi, tol, workers));
    return std::string("subchecks dispatched");
  });

  return rep;
}

}  // namespace zigzag
