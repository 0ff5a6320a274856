#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <utility>

#include "zigzag/errors.hpp"
#include "zigzag/hill.hpp"
#include "zigzag/potential.hpp"

namespace zigzag {

/// Per-sector constants of the N-fold symmetry decomposition, N = 2m+1 odd.
/// The primary computations use k = 0..m; the full range k = 0..N-1 is
/// allowed so the k <-> N-k symmetry identities can be exercised directly.
struct SectorConstants {
  int N = 1;
  int k = 0;
  int m = 0;
  double c_k = 1.0;            // cos(pi k / N)
  double s_k = 0.0;            // sin(pi k / N)
  Complex s_pow_k{1.0};        // e^{i 2 pi k / N}
  Complex s_pow_half_k{1.0};   // e^{i pi k / N}

  static SectorConstants make(int N, int k) {
    if (N < 1 || N % 2 == 0) throw DomainError("SectorConstants: N must be odd and >= 1");
    if (k < 0 || k >= N) throw DomainError("SectorConstants: k must lie in [0, N)");
    SectorConstants s;
    s.N = N;
    s.k = k;
    s.m = (N - 1) / 2;
    double ang = std::numbers::pi * k / N;
    s.c_k = std::cos(ang);
    s.s_k = std::sin(ang);
    s.s_pow_half_k = std::polar(1.0, ang);
    s.s_pow_k = std::polar(1.0, 2.0 * ang);
    return s;
  }
};

/// Delta_0 = (9 Delta^2 - Delta_-^2 - 5)/4.
inline Complex delta0_from(const HillDiscriminants& d) {
  return (9.0 * d.delta * d.delta - d.delta_minus * d.delta_minus - 5.0) / 4.0;
}

inline Complex delta0(const Potential& q, Complex lambda, double tol = kDefaultMatrixTol) {
  return delta0_from(discriminants(q, lambda, tol));
}

/// Trace form of the same function: 2 Delta^2 + theta'(1) phi(1)/4 - 1.
/// Used as a cross-check; differs from delta0_from by (det M - 1)/4.
inline Complex delta0_trace_form(const TransferMatrix& m) {
  Complex delta = 0.5 * (m.dphi1 + m.theta1);
  return 2.0 * delta * delta + m.dtheta1 * m.phi1 / 4.0 - 1.0;
}

/// xi_k = Delta_0 + s_k^2,  rho_k = (s_k^2/c_k^2)(c_k^2 - xi_k^2).
inline std::pair<Complex, Complex> xi_rho_from(Complex d0, const SectorConstants& sc) {
  Complex xi = d0 + sc.s_k * sc.s_k;
  double r = (sc.s_k * sc.s_k) / (sc.c_k * sc.c_k);
  Complex rho = r * (sc.c_k * sc.c_k - xi * xi);
  return {xi, rho};
}

inline std::pair<Complex, Complex> xi_rho(const Potential& q, Complex lambda,
                                          const SectorConstants& sc,
                                          double tol = kDefaultMatrixTol) {
  return xi_rho_from(delta0(q, lambda, tol), sc);
}

/// Everything the sector-k Lyapunov function knows at one lambda.
/// delta_plus/minus are the branches xi +- principal sqrt(rho); tau_plus/minus
/// the Floquet multipliers, roots of tau^2 - 2 a_k tau + s^{-k} with
/// a_k = 2 xi_k / (1 + s^k).  Branch-dependent values are only ever compared
/// as unordered pairs.
struct LyapunovPoint {
  Complex lambda;
  Complex delta0;
  Complex xi, rho;
  Complex delta_plus, delta_minus;
  Complex tau_plus, tau_minus;
  SectorConstants sector;
};

namespace detail {

// Roots of tau^2 - 2a tau + p, computed with the stable co-root division.
inline std::pair<Complex, Complex> quadratic_roots(Complex a, Complex p) {
  Complex s = std::sqrt(a * a - p);
  Complex t1 = (std::abs(a + s) >= std::abs(a - s)) ? a + s : a - s;
  if (t1 == 0.0) return {s, -s};
  return {t1, p / t1};
}

}  // namespace detail

inline LyapunovPoint lyapunov_point_from(Complex d0, Complex lambda, const SectorConstants& sc) {
  LyapunovPoint p;
  p.lambda = lambda;
  p.delta0 = d0;
  auto [xi, rho] = xi_rho_from(d0, sc);
  p.xi = xi;
  p.rho = rho;
  Complex sq = std::sqrt(rho);
  p.delta_plus = xi + sq;
  p.delta_minus = xi - sq;
  Complex a_k = 2.0 * xi / (1.0 + sc.s_pow_k);
  auto [tp, tm] = detail::quadratic_roots(a_k, std::conj(sc.s_pow_k));  // s^{-k} = conj(s^k)
  p.tau_plus = tp;
  p.tau_minus = tm;
  p.sector = sc;
  return p;
}

inline LyapunovPoint lyapunov_k(const Potential& q, Complex lambda, const SectorConstants& sc,
                                double tol = kDefaultMatrixTol) {
  return lyapunov_point_from(delta0(q, lambda, tol), lambda, sc);
}

inline constexpr double kDefaultPoleTol = 1e-8;

inline double pole_tol_at(Complex lambda, double tol_pole = kDefaultPoleTol) {
  return tol_pole * (1.0 + std::abs(lambda));
}

struct SectorMonodromy {
  Mat2 M;
  Complex lambda;
  SectorConstants sector;
};

namespace detail {

// T_k = (s^{-k/2} / 2 c_k) [[2 Delta, 1], [4 Delta^2 - 4 c_k^2, 2 Delta]],
// with s^{-k/2} the principal half power e^{-i pi k / N}.
inline Mat2 t_matrix(Complex delta, const SectorConstants& sc) {
  Complex f = std::conj(sc.s_pow_half_k) / (2.0 * sc.c_k);
  return {f * 2.0 * delta, f, f * (4.0 * delta * delta - 4.0 * sc.c_k * sc.c_k),
          f * 2.0 * delta};
}

}  // namespace detail

/// T_k (R M R^{-1}) = R M_k R^{-1}: entire in lambda, finite across sigma_D.
inline Mat2 sector_monodromy_entire(const TransferMatrix& m, const SectorConstants& sc) {
  Complex delta = 0.5 * (m.dphi1 + m.theta1);
  // R M R^{-1} = [[theta1, 1], [phi1 dtheta1, dphi1]]
  Mat2 conj_m{m.theta1, 1.0, m.phi1 * m.dtheta1, m.dphi1};
  return detail::t_matrix(delta, sc) * conj_m;
}

inline Mat2 sector_monodromy_entire(const Potential& q, Complex lambda,
                                    const SectorConstants& sc,
                                    double tol = kDefaultMatrixTol) {
  return sector_monodromy_entire(transfer_matrix(q, lambda, tol), sc);
}

/// M_k = R^{-1} T_k R M.  Poles at the Dirichlet spectrum (phi(1,.) = 0).
inline SectorMonodromy monodromy_k(const Potential& q, Complex lambda, const SectorConstants& sc,
                                   double tol = kDefaultMatrixTol,
                                   double tol_pole = kDefaultPoleTol) {
  TransferMatrix m = transfer_matrix(q, lambda, tol);
  if (std::abs(m.phi1) < pole_tol_at(lambda, tol_pole))
    throw DirichletPoleError("monodromy_k: lambda is in the Dirichlet spectrum");
  Mat2 e = sector_monodromy_entire(m, sc);
  // undo the R conjugation: M_k = R^{-1} (R M_k R^{-1}) R
  return {{e.a, e.b * m.phi1, e.c / m.phi1, e.d}, lambda, sc};
}

/// Eigenvalues of M_k, ordered so that tau_plus tau_minus = s^{-k} holds as
/// constructed; callers compare against lyapunov_k as unordered pairs.
inline std::pair<Complex, Complex> multipliers_from_matrix(const SectorMonodromy& mk) {
  return detail::quadratic_roots(0.5 * mk.M.trace(), mk.M.det());
}

/// (Delta_0, d Delta_0 / d lambda) at real lambda in one propagation via the
/// complex step; the workhorse of the level scans.
inline std::pair<double, double> delta0_and_derivative(const Potential& q, double lambda,
                                                       double tol = kDefaultMatrixTol) {
  double h = 1e-100 * std::max(1.0, std::abs(lambda));
  Complex v = delta0(q, Complex(lambda, h), tol);
  return {v.real(), v.imag() / h};
}

}  // namespace zigzag
