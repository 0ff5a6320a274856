#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "zigzag/errors.hpp"
#include "zigzag/parallel.hpp"

namespace zigzag {

/// Tolerance bundle shared across the spectral computations.  root/f/pole
/// scale with lambda as tol * (1 + |lambda|); matrix, tangent and eta are
/// used as given.
struct Tolerances {
  double matrix = 1e-10;   // relative accuracy of the transfer matrix
  double root = 1e-12;     // bracket width for root refinement
  double f = 1e-10;        // residual |f(root) - c| certification
  double tangent = 1e-9;   // extremum-value window for coincident pairs
  double pole = 1e-8;      // |phi(1,lambda)| threshold for Dirichlet poles
  double eta = 1e-9;       // eta = 1 - s^k c^2 zero detection

  double root_at(double lambda) const { return root * (1.0 + std::abs(lambda)); }
  double f_at(double lambda) const { return f * (1.0 + std::abs(lambda)); }
  double pole_at(double lambda) const { return pole * (1.0 + std::abs(lambda)); }
};

namespace scan {

/// Evaluates (f(lambda), f'(lambda)) for real lambda; f entire and real on R.
using ValueDeriv = std::function<std::pair<double, double>(double)>;

/// Certified lower cutoff: extend leftward by doubling until f > 2 and f is
/// decreasing toward the spectrum.  All scanned functions blow up like
/// cosh(2 sqrt(-lambda)) as lambda -> -infinity, so this terminates fast.
inline double find_floor(const ValueDeriv& ev, double q_bound) {
  double L = -(4.0 + 2.0 * q_bound);
  for (int i = 0; i < 60; ++i) {
    double fL = ev(L).first;
    double fR = ev(0.75 * L).first;
    if (fL > 2.0 && fL > fR) return L;
    L *= 2.0;
  }
  throw AssemblyError("find_floor: no certified lower cutoff found");
}

/// Scan grid: uniform in lambda on [floor, 0], uniform in sqrt(lambda)
/// (step pi/16) on [0, lambda_max].
inline std::vector<double> build_grid(double lambda_floor, double lambda_max) {
  std::vector<double> g;
  const double neg_step = 1.0 / 16.0;
  long nneg = std::max<long>(1, std::lround(std::ceil(-lambda_floor / neg_step)));
  for (long i = 0; i <= nneg; ++i)
    g.push_back(lambda_floor * (1.0 - static_cast<double>(i) / nneg));
  g.back() = 0.0;
  const double ustep = std::numbers::pi / 16.0;
  double umax = std::sqrt(std::max(lambda_max, 0.0));
  long npos = static_cast<long>(std::ceil(umax / ustep));
  for (long j = 1; j <= npos; ++j) {
    double u = ustep * static_cast<double>(j);
    g.push_back(std::min(u * u, lambda_max));
  }
  if (g.back() < lambda_max) g.push_back(lambda_max);
  return g;
}

/// Safeguarded Newton on a bracket [a,b] with f(a) f(b) < 0.  Bisection step
/// whenever Newton leaves the bracket or stalls.  If the incoming bracket
/// already meets tol the midpoint is returned unrefined.
inline double refine_root(const ValueDeriv& ev, double a, double b, double fa, double fb,
                          double tol_abs) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (b - a <= tol_abs) return 0.5 * (a + b);
  double x = 0.5 * (a + b);
  double best_x = x;
  double best_af = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 100; ++it) {
    auto [f, df] = ev(x);
    if (std::abs(f) < best_af) {
      best_af = std::abs(f);
      best_x = x;
    }
    if (f == 0.0) return x;
    if ((f > 0) == (fa > 0)) {
      a = x;
      fa = f;
    } else {
      b = x;
      fb = f;
    }
    if (b - a <= tol_abs) break;
    double xn = (df != 0.0) ? x - f / df : 0.5 * (a + b);
    if (xn > a && xn < b && std::abs(xn - x) <= 0.75 * (b - a))
      x = xn;
    else
      x = 0.5 * (a + b);
  }
  // Newton polish: machine-level accuracy costs a couple of extra steps.
  double x0 = best_x;
  double prev_step = b - a;
  for (int i = 0; i < 3; ++i) {
    auto [f, df] = ev(x0);
    if (df == 0.0) break;
    double s = -f / df;
    if (!(std::abs(s) < prev_step)) break;
    x0 += s;
    prev_step = std::abs(s);
  }
  if (x0 >= a - tol_abs && x0 <= b + tol_abs) return x0;
  return best_x;
}

/// Secant/bisection (Illinois) zero of f' on a bracket; returns the critical
/// lambda and stores f there.
inline double refine_critical(const ValueDeriv& ev, double a, double b, double dfa, double dfb,
                              double tol_abs, double* f_at_crit) {
  double x = 0.5 * (a + b);
  double f_at_x = 0.0;  // set on the first pass; the loop always runs
  for (int it = 0; it < 80; ++it) {
    // secant through (a,dfa),(b,dfb), clipped into the bracket
    double xs = (dfb != dfa) ? (a * dfb - b * dfa) / (dfb - dfa) : 0.5 * (a + b);
    double margin = 0.01 * (b - a);
    x = (xs > a + margin && xs < b - margin) ? xs : 0.5 * (a + b);
    auto [f, df] = ev(x);
    f_at_x = f;
    if (df == 0.0) break;
    if ((df > 0) == (dfa > 0)) {
      a = x;
      dfa = df;
      dfb *= 0.5;  // Illinois weighting keeps the bracket shrinking
    } else {
      b = x;
      dfb = df;
      dfa *= 0.5;
    }
    if (b - a <= tol_abs) break;
  }
  *f_at_crit = f_at_x;
  return x;
}

struct GridData {
  std::vector<double> lambda;
  std::vector<double> value;
  std::vector<double> deriv;
};

inline GridData evaluate_grid(const ValueDeriv& ev, const std::vector<double>& grid,
                              int workers) {
  GridData g;
  g.lambda = grid;
  g.value.resize(grid.size());
  g.deriv.resize(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    auto [f, df] = ev(grid[i]);
    g.value[i] = f;
    g.deriv[i] = df;
  });
  return g;
}

/// Simple zeros of an oscillatory entire function (phi(1,.), theta'(1,.)):
/// grid sign changes bracket every zero, no tangency handling needed.
inline std::vector<double> simple_zeros(const ValueDeriv& ev, double q_bound, double lambda_max,
                                        const Tolerances& tol, int workers) {
  double floor = find_floor(ev, q_bound);
  GridData g = evaluate_grid(ev, build_grid(floor, lambda_max), workers);
  std::vector<double> zeros;
  std::vector<bool> node_is_zero(g.lambda.size(), false);
  for (std::size_t i = 0; i < g.lambda.size(); ++i) {
    if (std::abs(g.value[i]) <= 1e-13 * (1.0 + std::abs(g.lambda[i]))) {
      node_is_zero[i] = true;
      zeros.push_back(g.lambda[i]);
    }
  }
  for (std::size_t i = 0; i + 1 < g.lambda.size(); ++i) {
    if (node_is_zero[i] || node_is_zero[i + 1]) continue;
    if ((g.value[i] > 0) != (g.value[i + 1] > 0)) {
      double mid = 0.5 * (g.lambda[i] + g.lambda[i + 1]);
      zeros.push_back(refine_root(ev, g.lambda[i], g.lambda[i + 1], g.value[i], g.value[i + 1],
                                  tol.root_at(mid)));
    }
  }
  std::sort(zeros.begin(), zeros.end());
  return zeros;
}

}  // namespace scan
}  // namespace zigzag
