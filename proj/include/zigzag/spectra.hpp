#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "zigzag/errors.hpp"
#include "zigzag/hill.hpp"
#include "zigzag/lyapunov.hpp"
#include "zigzag/potential.hpp"
#include "zigzag/rootscan.hpp"

namespace zigzag {

// ---------------------------------------------------------------------------
// Level scan: all real roots of Delta_0(lambda) = c for c in [-5/4, 1].
//
// Delta_0' has only real simple zeros interlaced with the zeros of Delta_0,
// so between consecutive critical points the function is monotone and holds
// at most one root of Delta_0 - c.  The scan isolates every critical point
// from a pi/16 grid in sqrt(lambda) (one complex-step propagation per node
// yields value and derivative together), then brackets roots segment by
// segment.  Levels 1 and -5/4 are the only ones a local extremum can touch
// tangentially; those produce coincident pairs.
// ---------------------------------------------------------------------------

class LevelScan {
 public:
  struct Root {
    double lambda;
    bool coincident;
  };

  /// Optional sharp solver for the degenerate levels (installed by
  /// make_delta0_scan); returns nothing for levels it does not handle.
  using SpecialSolver = std::function<std::optional<std::vector<Root>>(double)>;

  LevelScan(scan::ValueDeriv ev, scan::ValueDeriv ev_precise, double q_bound, double lambda_max,
            Tolerances tol = {}, int workers = 1)
      : ev_(std::move(ev)), evp_(std::move(ev_precise)), tol_(tol), lmax_(lambda_max) {
    floor_ = scan::find_floor(ev_, q_bound);
    scan::GridData g = scan::evaluate_grid(ev_, scan::build_grid(floor_, lmax_), workers);
    f_floor_ = g.value.front();
    f_top_ = g.value.back();
    for (std::size_t i = 0; i + 1 < g.lambda.size(); ++i) {
      if ((g.deriv[i] > 0) == (g.deriv[i + 1] > 0)) continue;
      Crit c;
      double stop = std::max(tol_.root_at(g.lambda[i + 1]), 1e-7 * (1.0 + g.lambda[i + 1]));
      c.lam = scan::refine_critical(ev_, g.lambda[i], g.lambda[i + 1], g.deriv[i],
                                    g.deriv[i + 1], stop, &c.f);
      crits_.push_back(c);
    }
  }

  double lambda_floor() const { return floor_; }
  double lambda_max() const { return lmax_; }

  std::vector<double> critical_lambdas() const {
    std::vector<double> v;
    v.reserve(crits_.size());
    for (const auto& c : crits_) v.push_back(c.lam);
    return v;
  }

  std::vector<double> critical_values() const {
    std::vector<double> v;
    v.reserve(crits_.size());
    for (const auto& c : crits_) v.push_back(c.f);
    return v;
  }

  /// Criticals refined to full precision (for export; the scan itself only
  /// needs them as segment boundaries).
  std::pair<std::vector<double>, std::vector<double>> polished_criticals() {
    std::vector<double> lam, val;
    for (auto& c : crits_) {
      polish(c);
      lam.push_back(c.lam);
      val.push_back(c.f);
    }
    return {lam, val};
  }

  void set_special_solver(SpecialSolver s) { special_ = std::move(s); }

  /// All roots of f = c on [lambda_floor, lambda_max], ascending; tangencies
  /// appear as coincident pairs.  Every root is certified against tol.f.
  std::vector<Root> roots_at(double c) {
    if (!(c >= -1.25 - 1e-9 && c <= 1.0 + 1e-9))
      throw LevelRangeError("solve_level: level " + std::to_string(c) +
                            " outside [-5/4, 1]; roots need not be real");
    if (special_) {
      if (auto r = special_(c)) return *r;
    }

    std::vector<char> tangent(crits_.size(), 0);
    for (std::size_t i = 0; i < crits_.size(); ++i) {
      if (std::abs(crits_[i].f - c) > 10.0 * tol_.tangent) continue;
      polish(crits_[i]);
      if (std::abs(crits_[i].f - c) <= tol_.tangent) tangent[i] = 1;
    }

    std::vector<Root> roots;
    for (std::size_t i = 0; i < crits_.size(); ++i)
      if (tangent[i]) roots.push_back({crits_[i].lam, true}), roots.push_back({crits_[i].lam, true});

    auto level_ev = [&](double x) {
      auto [f, df] = ev_(x);
      return std::make_pair(f - c, df);
    };
    std::size_t nb = crits_.size() + 2;
    auto bnd_lam = [&](std::size_t j) {
      return j == 0 ? floor_ : (j + 1 == nb ? lmax_ : crits_[j - 1].lam);
    };
    auto bnd_f = [&](std::size_t j) {
      return j == 0 ? f_floor_ : (j + 1 == nb ? f_top_ : crits_[j - 1].f);
    };
    auto is_tangent_bnd = [&](std::size_t j) {
      return j > 0 && j + 1 < nb && tangent[j - 1];
    };
    for (std::size_t j = 0; j + 1 < nb; ++j) {
      if (is_tangent_bnd(j) || is_tangent_bnd(j + 1)) continue;
      double fa = bnd_f(j) - c, fb = bnd_f(j + 1) - c;
      double a = bnd_lam(j), b = bnd_lam(j + 1);
      if (b <= a) continue;
      if (std::abs(fb) <= 1e-13 * (1.0 + std::abs(b))) {
        if (j + 2 == nb) roots.push_back({b, false});  // root exactly at lambda_max
        continue;
      }
      if (std::abs(fa) <= 1e-13 * (1.0 + std::abs(a))) {
        if (j == 0) roots.push_back({a, false});
        continue;
      }
      if ((fa > 0) == (fb > 0)) continue;
      double r = scan::refine_root(level_ev, a, b, fa, fb, tol_.root_at(0.5 * (a + b)));
      roots.push_back({r, false});
    }
    std::sort(roots.begin(), roots.end(),
              [](const Root& x, const Root& y) { return x.lambda < y.lambda; });

    for (std::size_t i = 0; i < roots.size(); ++i) {
      if (i > 0 && roots[i].lambda == roots[i - 1].lambda && roots[i].coincident) continue;
      double res = std::abs(ev_(roots[i].lambda).first - c);
      if (res > tol_.f_at(roots[i].lambda))
        throw AccuracyError("solve_level: root at " + std::to_string(roots[i].lambda) +
                                " re-evaluates off its level by " + std::to_string(res),
                            res);
    }
    return roots;
  }

 private:
  struct Crit {
    double lam;
    double f;
    bool polished = false;
  };

  // Secant polish of a critical point with higher-accuracy evaluations; the
  // tangency verdict and the emitted pair position both come from here.
  void polish(Crit& c) {
    if (c.polished) return;
    double span = 1e-4 * (1.0 + std::abs(c.lam));
    double x0 = c.lam, x1 = c.lam + 1e-7 * (1.0 + std::abs(c.lam));
    auto d0 = evp_(x0), d1 = evp_(x1);
    double best_x = x0, best_df = std::abs(d0.second), best_f = d0.first;
    for (int it = 0; it < 8; ++it) {
      if (d1.second == d0.second) break;
      double x2 = x1 - d1.second * (x1 - x0) / (d1.second - d0.second);
      if (!(std::abs(x2 - c.lam) <= span)) break;
      x0 = x1;
      d0 = d1;
      x1 = x2;
      d1 = evp_(x1);
      if (std::abs(d1.second) < best_df) {
        best_df = std::abs(d1.second);
        best_x = x1;
        best_f = d1.first;
      }
      if (std::abs(x1 - x0) <= 0.25 * tol_.root_at(x1)) break;
    }
    c.lam = best_x;
    c.f = best_f;
    c.polished = true;
  }

  scan::ValueDeriv ev_, evp_;
  Tolerances tol_;
  double floor_ = 0.0, lmax_ = 0.0;
  double f_floor_ = 0.0, f_top_ = 0.0;
  std::vector<Crit> crits_;
  SpecialSolver special_;
};

inline LevelScan make_delta0_scan(const Potential& q, double lambda_max, Tolerances tol = {},
                                  int workers = 1);

// ---------------------------------------------------------------------------
// Labeled root sets
// ---------------------------------------------------------------------------

struct LevelRoot {
  double lambda;
  int n;
  int sign;  // +1 / -1
  bool coincident;
};

/// Roots of Delta_0 = c labeled by sorted position: the singleton z_0^+
/// first, then the pairs (z_n^-, z_n^+).
struct LevelRootSet {
  double level;
  std::vector<LevelRoot> roots;
};

namespace detail {

inline LevelRootSet z_labeled(double c, const std::vector<LevelScan::Root>& rs) {
  LevelRootSet out;
  out.level = c;
  out.roots.reserve(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    int n = static_cast<int>((i + 1) / 2);
    int sign = (i == 0 || i % 2 == 0) ? +1 : -1;
    out.roots.push_back({rs[i].lambda, n, sign, rs[i].coincident});
  }
  return out;
}

}  // namespace detail

inline LevelRootSet solve_level(const Potential& q, double c, double lambda_max,
                                Tolerances tol = {}, int workers = 1) {
  LevelScan scan = make_delta0_scan(q, lambda_max, tol, workers);
  return detail::z_labeled(c, scan.roots_at(c));
}

/// A spectral point with its defining-equation tag.
enum class PointKind { Periodic, Antiperiodic, Resonance, Dirichlet, Neumann, Critical, Delta0Zero };

inline const char* to_string(PointKind k) {
  switch (k) {
    case PointKind::Periodic: return "periodic";
    case PointKind::Antiperiodic: return "antiperiodic";
    case PointKind::Resonance: return "resonance";
    case PointKind::Dirichlet: return "dirichlet";
    case PointKind::Neumann: return "neumann";
    case PointKind::Critical: return "critical";
    case PointKind::Delta0Zero: return "delta0_zero";
  }
  return "?";
}

struct SpectralPoint {
  double lambda;
  PointKind kind;
  int k;     // sector, or -1 when not sector-indexed
  int n;     // index within its family
  int sign;  // +1 / -1 / 0
  bool coincident = false;
};

struct LabeledRoot {
  double lambda;
  int n;
  int sign;
  bool coincident;
};

namespace detail {

// Merge a level whose pairs straddle maxima (even indices 0,2,4..., z-form:
// singleton then pairs) with a level whose pairs straddle minima (odd
// indices 1,3,5..., x-form: consecutive pairs).  The sorted union must
// realize (0,+) < (1,-) < (1,+) < (2,-) < (2,+) < ...; anything else means a
// root was missed.
inline std::vector<LabeledRoot> merge_even_odd(const std::vector<LevelScan::Root>& plus_level,
                                               const std::vector<LevelScan::Root>& minus_level,
                                               const std::string& what) {
  std::vector<LabeledRoot> pts;
  pts.reserve(plus_level.size() + minus_level.size());
  for (std::size_t i = 0; i < plus_level.size(); ++i) {
    int nz = static_cast<int>((i + 1) / 2);          // z-label
    int sign = (i % 2 == 0) ? +1 : -1;
    pts.push_back({plus_level[i].lambda, 2 * nz, sign, plus_level[i].coincident});
  }
  for (std::size_t i = 0; i < minus_level.size(); ++i) {
    int n = 2 * static_cast<int>(i / 2) + 1;         // consecutive pairs
    int sign = (i % 2 == 0) ? -1 : +1;
    pts.push_back({minus_level[i].lambda, n, sign, minus_level[i].coincident});
  }
  auto rank = [](const LabeledRoot& r) { return 2 * r.n + (r.sign > 0 ? 0 : -1); };
  std::sort(pts.begin(), pts.end(), [&](const LabeledRoot& x, const LabeledRoot& y) {
    if (x.lambda != y.lambda) return x.lambda < y.lambda;
    return rank(x) < rank(y);
  });
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (rank(pts[i]) != static_cast<int>(i)) {
      throw LabelingError(what + ": merged level sets do not alternate at position " +
                          std::to_string(i) + " (lambda=" + std::to_string(pts[i].lambda) +
                          "); a root was likely missed");
    }
  }
  return pts;
}

inline void require_sector_range(int N, int k, int lo) {
  if (N < 1 || N % 2 == 0) throw DomainError("N must be odd and >= 1");
  int m = (N - 1) / 2;
  if (k < lo || k > m) throw DomainError("sector index k must lie in [" + std::to_string(lo) +
                                         ", m] with m = " + std::to_string(m));
}

}  // namespace detail

/// Periodic eigenvalues lambda_{k,2n}^±: level cos(2 pi k / N) (level 1 when
/// k = 0), labeled (2n, ±) with the singleton (0,+) first.
inline std::vector<LabeledRoot> periodic_eigenvalues_from_scan(LevelScan& scan, int N, int k) {
  detail::require_sector_range(N, k, 0);
  double c = (k == 0) ? 1.0 : std::cos(2.0 * std::numbers::pi * k / N);
  auto rs = scan.roots_at(c);
  std::vector<LabeledRoot> out;
  out.reserve(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    int nz = static_cast<int>((i + 1) / 2);
    int sign = (i % 2 == 0) ? +1 : -1;
    out.push_back({rs[i].lambda, 2 * nz, sign, rs[i].coincident});
  }
  return out;
}

inline std::vector<LabeledRoot> periodic_eigenvalues(const Potential& q, int N, int k,
                                                     double lambda_max, Tolerances tol = {},
                                                     int workers = 1) {
  LevelScan scan = make_delta0_scan(q, lambda_max, tol, workers);
  return periodic_eigenvalues_from_scan(scan, N, k);
}

/// Anti-periodic eigenvalues lambda_{k,2n+1}^±: level -1, identical for every
/// sector, labeled in consecutive pairs (1,-),(1,+),(3,-),(3,+),...
inline std::vector<LabeledRoot> antiperiodic_eigenvalues_from_scan(LevelScan& scan, int N, int k) {
  detail::require_sector_range(N, k, 0);
  auto rs = scan.roots_at(-1.0);
  std::vector<LabeledRoot> out;
  out.reserve(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    int n = 2 * static_cast<int>(i / 2) + 1;
    int sign = (i % 2 == 0) ? -1 : +1;
    out.push_back({rs[i].lambda, n, sign, rs[i].coincident});
  }
  return out;
}

inline std::vector<LabeledRoot> antiperiodic_eigenvalues(const Potential& q, int N, int k,
                                                         double lambda_max, Tolerances tol = {},
                                                         int workers = 1) {
  LevelScan scan = make_delta0_scan(q, lambda_max, tol, workers);
  return antiperiodic_eigenvalues_from_scan(scan, N, k);
}

/// Resonances r_{k,n}^±: zeros of rho_k, i.e. the merge of the level sets
/// Delta_0 = c_k - s_k^2 (even n) and Delta_0 = -c_k - s_k^2 (odd n).  For
/// k = N/3 the odd level is exactly -5/4 and odd pairs may coincide.
inline std::vector<LabeledRoot> resonances_from_scan(LevelScan& scan, int N, int k) {
  detail::require_sector_range(N, k, 1);
  double ck = std::cos(std::numbers::pi * k / N);
  double sk2 = 1.0 - ck * ck;
  auto plus = scan.roots_at(ck - sk2);
  auto minus = scan.roots_at(std::max(-1.25, -ck - sk2));
  return detail::merge_even_odd(plus, minus, "resonances(k=" + std::to_string(k) + ")");
}

inline std::vector<LabeledRoot> resonances(const Potential& q, int N, int k, double lambda_max,
                                           Tolerances tol = {}, int workers = 1) {
  LevelScan scan = make_delta0_scan(q, lambda_max, tol, workers);
  return resonances_from_scan(scan, N, k);
}

// ---------------------------------------------------------------------------
// Dirichlet / Neumann spectra and the critical points of Delta_0
// ---------------------------------------------------------------------------

/// Zeros of phi(1, .) up to lambda_max: sigma_D, the flat bands.
inline std::vector<double> dirichlet_spectrum(const Potential& q, double lambda_max,
                                              Tolerances tol = {}, int workers = 1) {
  auto ev = [&q, tol](double lam) {
    double h = 1e-100 * std::max(1.0, std::abs(lam));
    Complex v = transfer_matrix(q, Complex(lam, h), tol.matrix).phi1;
    return std::make_pair(v.real(), v.imag() / h);
  };
  return scan::simple_zeros(ev, q.max_abs(), lambda_max, tol, workers);
}

/// Zeros of theta'(1, .) up to lambda_max (nu_0 included).
inline std::vector<double> neumann_spectrum(const Potential& q, double lambda_max,
                                            Tolerances tol = {}, int workers = 1) {
  auto ev = [&q, tol](double lam) {
    double h = 1e-100 * std::max(1.0, std::abs(lam));
    Complex v = transfer_matrix(q, Complex(lam, h), tol.matrix).dtheta1;
    return std::make_pair(v.real(), v.imag() / h);
  };
  return scan::simple_zeros(ev, q.max_abs(), lambda_max, tol, workers);
}

// ---------------------------------------------------------------------------
// Sharp solvers for the two degenerate levels.
//
// Written as Delta_0 - c, the levels 1 and -5/4 lose all precision near
// closed gaps (the extremum clears the level by O(gap width squared)).  Both
// have exact cancellations-free rewrites:
//   Delta_0 - 1   = 2 Delta_-^2 + (9/4) phi(1,.) theta'(1,.)   (det M = 1)
//   Delta_0 + 5/4 = (3 Delta - Delta_-)(3 Delta + Delta_-)/4
// The first vanishes exactly where the graph's even-gap edges sit and is
// negative precisely on the k=0 bands; its roots are as well conditioned as
// the Dirichlet/Neumann eigenvalues bracketing them.  The second splits into
// two oscillatory factors with simple zeros.
// ---------------------------------------------------------------------------

namespace detail {

template <typename F>
scan::ValueDeriv entry_eval(const Potential& q, double mtol, F f) {
  return [&q, mtol, f](double lam) {
    double h = 1e-100 * std::max(1.0, std::abs(lam));
    TransferMatrix t = transfer_matrix(q, Complex(lam, h), mtol);
    Complex v = f(t);
    return std::make_pair(v.real(), v.imag() / h);
  };
}

/// Zeros of a band-edge function g (negative exactly on the k=0 bands):
/// one bottom root, then one pair straddling each {mu_n, nu_n} cluster.
inline std::vector<LevelScan::Root> band_edge_roots(const Potential& q, double lambda_max,
                                                    const Tolerances& tol, int workers,
                                                    const scan::ValueDeriv& gev) {
  double margin = 3.0 * std::numbers::pi * std::sqrt(lambda_max + 10.0) + 25.0;
  auto mu = dirichlet_spectrum(q, lambda_max + margin, tol, workers);
  auto nu = neumann_spectrum(q, lambda_max + margin, tol, workers);
  if (nu.empty() || mu.empty())
    throw AssemblyError("band_edge_roots: no Dirichlet/Neumann cluster in range");
  std::size_t K = std::min(mu.size(), nu.size() - 1);

  auto anchor = [&gev](double lo, double hi) {
    double best_x = lo, best_g = 0.0;
    for (double f : {0.5, 0.35, 0.65, 0.2, 0.8, 0.08, 0.92}) {
      double x = lo + f * (hi - lo);
      double g = gev(x).first;
      if (g < best_g) {
        best_g = g;
        best_x = x;
        if (g < -0.05) break;
      }
    }
    if (!(best_g < 0.0))
      throw AssemblyError("band_edge_roots: no band point found between gap clusters");
    return best_x;
  };

  if (nu.size() < 2)
    throw AssemblyError("band_edge_roots: range too small for the first gap cluster");
  std::vector<LevelScan::Root> roots;
  double gfloor = scan::find_floor(gev, q.max_abs());
  double anch = anchor(nu[0], std::min(mu[0], nu[1]));
  {
    double fa = gev(gfloor).first;
    double fb = gev(anch).first;
    double r = scan::refine_root(gev, gfloor, anch, fa, fb, tol.root_at(0.5 * (gfloor + anch)));
    if (r <= lambda_max) roots.push_back({r, false});
  }
  for (std::size_t n = 1; n <= K; ++n) {
    double a = std::min(mu[n - 1], nu[n]);
    double b = std::max(mu[n - 1], nu[n]);
    if (a > lambda_max + 1.0) break;
    if (n == K) break;  // no anchor beyond the last cluster; margin makes it moot
    double next = anchor(b, std::min(mu[n], nu[n + 1]));
    double thresh = 1e-10 * (1.0 + a);
    double ga = gev(a).first;
    double gb = gev(b).first;
    double left, right;
    if (ga <= thresh) {
      left = a;
    } else {
      double fa = gev(anch).first;
      left = scan::refine_root(gev, anch, a, fa, ga, tol.root_at(a));
    }
    if (gb <= thresh) {
      right = b;
    } else {
      double fb = gev(next).first;
      right = scan::refine_root(gev, b, next, gb, fb, tol.root_at(b));
    }
    bool coincident = (right - left) <= 1e-9 * (1.0 + std::abs(right));
    if (left <= lambda_max) roots.push_back({left, coincident});
    if (right <= lambda_max) roots.push_back({right, coincident});
    anch = next;
  }
  return roots;
}

inline std::vector<LevelScan::Root> graph_level_one_roots(const Potential& q, double lambda_max,
                                                          const Tolerances& tol, int workers) {
  auto gev = entry_eval(q, tol.matrix, [](const TransferMatrix& t) {
    Complex dm = 0.5 * (t.dphi1 - t.theta1);
    return 2.0 * dm * dm + 2.25 * t.phi1 * t.dtheta1;
  });
  auto roots = band_edge_roots(q, lambda_max, tol, workers, gev);
  for (const auto& r : roots) {
    double res = std::abs(delta0(q, r.lambda, tol.matrix).real() - 1.0);
    if (res > tol.f_at(r.lambda))
      throw AccuracyError("level 1 root re-evaluates off its level", res);
  }
  return roots;
}

inline std::vector<LevelScan::Root> bottom_level_roots(const Potential& q, double lambda_max,
                                                       const Tolerances& tol, int workers) {
  // 3 Delta + Delta_- = 2 phi'(1) + theta(1);  3 Delta - Delta_- = phi'(1) + 2 theta(1)
  auto up = entry_eval(q, tol.matrix,
                       [](const TransferMatrix& t) { return 2.0 * t.dphi1 + t.theta1; });
  auto um = entry_eval(q, tol.matrix,
                       [](const TransferMatrix& t) { return t.dphi1 + 2.0 * t.theta1; });
  auto zp = scan::simple_zeros(up, q.max_abs(), lambda_max, tol, workers);
  auto zm = scan::simple_zeros(um, q.max_abs(), lambda_max, tol, workers);
  std::vector<double> all;
  all.reserve(zp.size() + zm.size());
  all.insert(all.end(), zp.begin(), zp.end());
  all.insert(all.end(), zm.begin(), zm.end());
  std::sort(all.begin(), all.end());
  std::vector<LevelScan::Root> roots;
  for (std::size_t i = 0; i < all.size(); ++i) {
    bool paired = (i % 2 == 0) ? (i + 1 < all.size() &&
                                  all[i + 1] - all[i] <= 1e-9 * (1.0 + std::abs(all[i + 1])))
                               : (all[i] - all[i - 1] <= 1e-9 * (1.0 + std::abs(all[i])));
    roots.push_back({all[i], paired});
  }
  for (const auto& r : roots) {
    double res = std::abs(delta0(q, r.lambda, tol.matrix).real() + 1.25);
    if (res > tol.f_at(r.lambda))
      throw AccuracyError("level -5/4 root re-evaluates off its level", res);
  }
  return roots;
}

}  // namespace detail

/// Scan of Delta_0 for a given potential; keeps a reference to q, which must
/// outlive the scan.  The degenerate levels 1 and -5/4 are dispatched to the
/// sharp solvers above.
inline LevelScan make_delta0_scan(const Potential& q, double lambda_max, Tolerances tol,
                                  int workers) {
  auto ev = [&q, tol](double lam) { return delta0_and_derivative(q, lam, tol.matrix); };
  auto evp = [&q, tol](double lam) {
    return delta0_and_derivative(q, lam, std::max(1e-13, tol.matrix * 1e-2));
  };
  LevelScan scan(ev, evp, q.max_abs(), lambda_max, tol, workers);
  scan.set_special_solver(
      [&q, lambda_max, tol, workers](double c) -> std::optional<std::vector<LevelScan::Root>> {
        if (std::abs(c - 1.0) <= 1e-12)
          return detail::graph_level_one_roots(q, lambda_max, tol, workers);
        if (std::abs(c + 1.25) <= 1e-12)
          return detail::bottom_level_roots(q, lambda_max, tol, workers);
        return std::nullopt;
      });
  return scan;
}

struct CriticalPoints {
  std::vector<double> zeros;      // eta_{0,n}: Delta_0 = 0
  std::vector<double> criticals;  // lambda_{0,n}: Delta_0' = 0
  std::vector<double> values;     // Delta_0 at the criticals
};

/// eta_{0,1} < lambda_{0,1} < eta_{0,2} < lambda_{0,2} < ... with
/// Delta_0(lambda_{0,2n}) >= 1 and Delta_0(lambda_{0,2n-1}) <= -5/4.
inline CriticalPoints delta0_critical_points(const Potential& q, double lambda_max,
                                             Tolerances tol = {}, int workers = 1) {
  LevelScan scan = make_delta0_scan(q, lambda_max, tol, workers);
  CriticalPoints out;
  for (auto& r : scan.roots_at(0.0)) out.zeros.push_back(r.lambda);
  std::tie(out.criticals, out.values) = scan.polished_criticals();
  // interlacing: eta_1 < lam_1 < eta_2 < lam_2 < ...
  for (std::size_t i = 0; i < out.criticals.size(); ++i) {
    if (i < out.zeros.size() && !(out.zeros[i] < out.criticals[i]))
      throw AssemblyError("delta0_critical_points: interlacing violated");
    if (i + 1 < out.zeros.size() && !(out.criticals[i] < out.zeros[i + 1]))
      throw AssemblyError("delta0_critical_points: interlacing violated");
  }
  for (std::size_t i = 0; i < out.criticals.size(); ++i) {
    double v = out.values[i];
    double slack = tol.f_at(out.criticals[i]) * 10.0;
    bool is_min = (i % 2 == 0);  // first critical is the first minimum
    if (is_min && !(v <= -1.25 + slack))
      throw AssemblyError("delta0_critical_points: minimum value above -5/4");
    if (!is_min && !(v >= 1.0 - slack))
      throw AssemblyError("delta0_critical_points: maximum value below 1");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Band assembly
// ---------------------------------------------------------------------------

struct Interval {
  double lo = 0.0, hi = 0.0;
  double width() const { return hi - lo; }
};

enum class GapKind { Stable, Resonance };

struct Gap {
  int n;
  GapKind kind;
  Interval interval;
  bool closed;
};

struct BandStructure {
  int N = 1, m = 0;
  double lambda_max = 0.0;
  std::vector<Interval> bands;                    // S_1, S_2, ...
  std::vector<Gap> gaps;                          // G_1, ..., closed ones flagged
  std::vector<std::vector<Interval>> sector_bands;  // [k][n-1]
  std::vector<std::vector<Interval>> sector_gaps;   // [k][n-1]
  std::vector<double> flat_bands;                 // mu_n <= lambda_max
  std::vector<SpectralPoint> points;
  double q0 = 0.0;
  std::vector<double> kappa;  // mu_n - (pi n)^2 - q0
  std::vector<double> h;      // log |phi'(1, mu_n)|
};

struct ForwardData {
  double q0 = 0.0;
  std::vector<double> mu;
  std::vector<double> kappa;
  std::vector<double> h;
};

/// Forward inverse-spectral map: q -> (q0, kappa_n, h_n), n = 1..n_max.
inline ForwardData forward_spectral_data(const Potential& q, int n_max, Tolerances tol = {},
                                         int workers = 1) {
  if (n_max < 1) throw DomainError("forward_spectral_data: n_max must be >= 1");
  ForwardData out;
  out.q0 = q.mean();
  double pi = std::numbers::pi;
  double lmax = (pi * (n_max + 1)) * (pi * (n_max + 1)) + std::abs(out.q0) + 10.0;
  std::vector<double> mu;
  for (int attempt = 0; attempt < 3; ++attempt) {
    mu = dirichlet_spectrum(q, lmax, tol, workers);
    if (static_cast<int>(mu.size()) >= n_max) break;
    lmax *= 1.7;
  }
  if (static_cast<int>(mu.size()) < n_max)
    throw AssemblyError("forward_spectral_data: could not find enough Dirichlet eigenvalues");
  mu.resize(n_max);
  out.mu = mu;
  for (int n = 1; n <= n_max; ++n) {
    double m = mu[n - 1];
    out.kappa.push_back(m - pi * pi * n * n - out.q0);
    Complex dphi = transfer_matrix(q, m, tol.matrix).dphi1;
    out.h.push_back(std::log(std::abs(dphi)));
  }
  return out;
}

namespace detail {

struct SectorPoints {
  // (n, sign (+1/-1)) -> root; contiguous by construction of the merges
  std::map<std::pair<int, int>, LabeledRoot> at;

  void add(const std::vector<LabeledRoot>& pts) {
    for (const auto& p : pts) at[{p.n, p.sign}] = p;
  }
  const LabeledRoot* find(int n, int sign) const {
    auto it = at.find({n, sign});
    return it == at.end() ? nullptr : &it->second;
  }
};

}  // namespace detail

/// Full band/gap assembly: sector bands from the level
/// sets, global bands as unions, gaps as intersections, flat bands attached,
/// forward data included.
inline BandStructure assemble_bands(const Potential& q, int N, double lambda_max,
                                    Tolerances tol = {}, int workers = 1) {
  if (N < 1 || N % 2 == 0) throw DomainError("assemble_bands: N must be odd and >= 1");
  if (!(lambda_max > 0.0)) throw DomainError("assemble_bands: lambda_max must be positive");
  BandStructure bs;
  bs.N = N;
  bs.m = (N - 1) / 2;
  bs.lambda_max = lambda_max;
  const int m = bs.m;

  LevelScan scan = make_delta0_scan(q, lambda_max, tol, workers);

  // sector 0: periodic (level 1) + anti-periodic (level -1), shared by all k
  auto level_plus1 = scan.roots_at(1.0);
  auto level_minus1 = scan.roots_at(-1.0);
  auto sector0 = detail::merge_even_odd(level_plus1, level_minus1, "sector 0");

  std::vector<detail::SectorPoints> sector(m + 1);
  sector[0].add(sector0);
  std::vector<std::vector<LabeledRoot>> reson(m + 1);
  for (int k = 1; k <= m; ++k) {
    reson[k] = resonances_from_scan(scan, N, k);
    sector[k].add(reson[k]);
  }

  // how many full bands does each sector support below lambda_max
  auto sector_band_count = [&](int k) {
    int n = 0;
    while (sector[k].find(n, +1) && sector[k].find(n + 1, -1)) ++n;
    return n;  // bands sigma_{k,1..n}
  };
  int nbands = sector_band_count(0);
  for (int k = 1; k <= m; ++k) nbands = std::min(nbands, sector_band_count(k));
  if (nbands < 1) throw AssemblyError("assemble_bands: lambda_max too small for one band");

  bs.sector_bands.assign(m + 1, {});
  bs.sector_gaps.assign(m + 1, {});
  for (int k = 0; k <= m; ++k) {
    for (int n = 1; n <= nbands; ++n) {
      const auto* lo = sector[k].find(n - 1, +1);
      const auto* hi = sector[k].find(n, -1);
      bs.sector_bands[k].push_back({lo->lambda, hi->lambda});
      if (n < nbands) {
        const auto* ghi = sector[k].find(n, +1);
        bs.sector_gaps[k].push_back({hi->lambda, ghi->lambda});
      }
    }
  }

  double slack = 1e-9 * (1.0 + lambda_max);
  for (int n = 1; n <= nbands; ++n) {
    double lo = bs.sector_bands[0][n - 1].lo, hi = bs.sector_bands[0][n - 1].hi;
    double max_lo = lo, min_hi = hi;
    for (int k = 1; k <= m; ++k) {
      const auto& b = bs.sector_bands[k][n - 1];
      lo = std::min(lo, b.lo);
      hi = std::max(hi, b.hi);
      max_lo = std::max(max_lo, b.lo);
      min_hi = std::min(min_hi, b.hi);
    }
    if (max_lo > min_hi + slack)
      throw AssemblyError("assemble_bands: sector bands " + std::to_string(n) +
                          " do not overlap");
    bs.bands.push_back({lo, hi});
  }

  for (int n = 1; n < nbands; ++n) {
    double glo = bs.bands[n - 1].hi;
    double ghi = bs.bands[n].lo;
    Gap g;
    g.n = n;
    g.kind = (n % 2 == 0) ? GapKind::Stable : GapKind::Resonance;
    g.closed = !(ghi - glo > slack);
    g.interval = g.closed ? Interval{glo, glo} : Interval{glo, ghi};
    // the gap must reduce to its sector-gap form: gamma_{0,n} for even n,
    // gamma_{N/3,n} (or the p, p+1 intersection) for odd n
    const Interval* expect = nullptr;
    Interval cut;
    if (m == 0) {
      expect = &bs.sector_gaps[0][n - 1];
    } else if (n % 2 == 0) {
      expect = &bs.sector_gaps[0][n - 1];
    } else if (N % 3 == 0) {
      expect = &bs.sector_gaps[N / 3][n - 1];
    } else {
      int p = N / 3;
      const auto& g1 = bs.sector_gaps[p][n - 1];
      const auto& g2 = bs.sector_gaps[std::min(p + 1, m)][n - 1];
      cut = {std::max(g1.lo, g2.lo), std::min(g1.hi, g2.hi)};
      expect = &cut;
    }
    bool expect_closed = !(expect->hi - expect->lo > slack);
    if (expect_closed != g.closed ||
        (!g.closed && (std::abs(expect->lo - g.interval.lo) > slack ||
                       std::abs(expect->hi - g.interval.hi) > slack)))
      throw AssemblyError("assemble_bands: gap " + std::to_string(n) +
                          " disagrees with its sector-gap reduction");
    bs.gaps.push_back(g);
  }

  // labeled points
  auto push_points = [&](const std::vector<LabeledRoot>& pts, PointKind kind, int k) {
    for (const auto& p : pts)
      bs.points.push_back({p.lambda, kind, k, p.n, p.sign, p.coincident});
  };
  std::vector<LabeledRoot> per0, anti0;
  for (const auto& p : sector0)
    (p.n % 2 == 0 ? per0 : anti0).push_back(p);
  push_points(per0, PointKind::Periodic, 0);
  push_points(anti0, PointKind::Antiperiodic, 0);
  for (int k = 1; k <= m; ++k) {
    push_points(periodic_eigenvalues_from_scan(scan, N, k), PointKind::Periodic, k);
    push_points(reson[k], PointKind::Resonance, k);
  }

  bs.flat_bands = dirichlet_spectrum(q, lambda_max, tol, workers);
  for (std::size_t i = 0; i < bs.flat_bands.size(); ++i)
    bs.points.push_back({bs.flat_bands[i], PointKind::Dirichlet, -1, static_cast<int>(i + 1), 0});
  auto neu = neumann_spectrum(q, lambda_max, tol, workers);
  for (std::size_t i = 0; i < neu.size(); ++i)
    bs.points.push_back({neu[i], PointKind::Neumann, -1, static_cast<int>(i), 0});
  const auto crit = scan.polished_criticals().first;
  for (std::size_t i = 0; i < crit.size(); ++i)
    bs.points.push_back({crit[i], PointKind::Critical, -1, static_cast<int>(i + 1), 0});
  for (auto& r : scan.roots_at(0.0))
    bs.points.push_back({r.lambda, PointKind::Delta0Zero, -1, 0, 0});
  int nz = 1;
  for (auto& p : bs.points)
    if (p.kind == PointKind::Delta0Zero) p.n = nz++;

  std::stable_sort(bs.points.begin(), bs.points.end(),
                   [](const SpectralPoint& a, const SpectralPoint& b) { return a.lambda < b.lambda; });

  bs.q0 = q.mean();
  if (!bs.flat_bands.empty()) {
    auto fwd = forward_spectral_data(q, static_cast<int>(bs.flat_bands.size()), tol, workers);
    bs.kappa = fwd.kappa;
    bs.h = fwd.h;
  }
  return bs;
}

// ---------------------------------------------------------------------------
// Scalar Hill gaps (cross-check for the stable-gap/Hill-gap equivalence)
// ---------------------------------------------------------------------------

/// Gaps gamma_n = (lam_n^-, lam_n^+) of the scalar Hill operator on the line.
/// The edges are the zeros of Delta^2 - 1 = Delta_-^2 + phi(1,.) theta'(1,.),
/// found with the same band-edge machinery as the graph's level 1.
inline std::vector<Interval> hill_gaps(const Potential& q, double lambda_max, Tolerances tol = {},
                                       int workers = 1) {
  auto h_ev = detail::entry_eval(q, tol.matrix, [](const TransferMatrix& t) {
    Complex dm = 0.5 * (t.dphi1 - t.theta1);
    return dm * dm + t.phi1 * t.dtheta1;
  });
  auto roots = detail::band_edge_roots(q, lambda_max, tol, workers, h_ev);
  std::vector<Interval> gaps;
  for (std::size_t n = 1; 2 * n < roots.size(); ++n)
    gaps.push_back({roots[2 * n - 1].lambda, roots[2 * n].lambda});
  return gaps;
}

}  // namespace zigzag
