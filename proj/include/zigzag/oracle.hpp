#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>

#include "zigzag/errors.hpp"
#include "zigzag/hill.hpp"
#include "zigzag/lyapunov.hpp"
#include "zigzag/potential.hpp"
#include "zigzag/rootscan.hpp"

namespace zigzag {
namespace oracle {

/// Sector monodromy rebuilt from first principles: propagate the canonical
/// data along edge (0,0), then eliminate the edge-(0,1)/(0,2) unknowns with
/// f'(0) = (f(1) - theta1 f(0)) / phi1,  f'(1) = (phi1' f(1) - f(0)) / phi1
/// and solve the resulting 2x2 Kirchhoff system numerically for
/// (f_{1,0}(0), f'_{1,0}(0)).  No closed-form T_k anywhere on this path.
inline SectorMonodromy monodromy_direct(const Potential& q, Complex lambda, int k, int N,
                                        Tolerances tol = {}) {
  SectorConstants sc = SectorConstants::make(N, k);
  TransferMatrix m = transfer_matrix(q, lambda, tol.matrix);
  if (std::abs(m.phi1) < pole_tol_at(lambda, tol.pole))
    throw DirichletPoleError("monodromy_direct: lambda is in the Dirichlet spectrum");
  Complex sk = sc.s_pow_k;
  Complex sk_inv = 1.0 / sk;

  Mat2 M{};
  const Complex init[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
  for (int col = 0; col < 2; ++col) {
    Complex F0 = init[col][0];
    Complex G0 = init[col][1];
    // across edge (0,0)
    Complex F1 = m.theta1 * F0 + m.phi1 * G0;
    Complex G1 = m.dtheta1 * F0 + m.dphi1 * G0;

    // Unknowns x = (a, b) = (f_{1,0}(0), f'_{1,0}(0)).  The vertex values
    // f_{0,1}(0) = F1, f_{0,2}(1) = s^{-k} F1, f_{0,1}(1) = f_{0,2}(0) = a
    // pin both middle edges; the two derivative conditions become:
    //   -G1 + (a - theta1 F1)/phi1 - s^k (dphi1 s^{-k} F1 - a)/phi1 = 0
    //    b  - (dphi1 a - F1)/phi1 + (s^{-k} F1 - theta1 a)/phi1      = 0
    Complex A00 = (1.0 + sk) / m.phi1;
    Complex A01 = 0.0;
    Complex A10 = -(m.dphi1 + m.theta1) / m.phi1;
    Complex A11 = 1.0;
    Complex r0 = G1 + m.theta1 * F1 / m.phi1 + m.dphi1 * F1 / m.phi1;
    Complex r1 = -(F1 + sk_inv * F1) / m.phi1;

    // 2x2 elimination with partial pivoting
    Complex a, b;
    if (std::abs(A00) >= std::abs(A10)) {
      Complex f = A10 / A00;
      Complex A11p = A11 - f * A01;
      Complex r1p = r1 - f * r0;
      b = r1p / A11p;
      a = (r0 - A01 * b) / A00;
    } else {
      Complex f = A00 / A10;
      Complex A01p = A01 - f * A11;
      Complex r0p = r0 - f * r1;
      b = r0p / A01p;
      a = (r1 - A11 * b) / A10;
    }
    if (col == 0) {
      M.a = a;
      M.c = b;
    } else {
      M.b = a;
      M.d = b;
    }
  }
  return {M, lambda, sc};
}

/// sigma_ac membership at real lambda: some Floquet multiplier tau of the
/// directly built monodromy has (tau + 1/tau)/2 in [-1, 1] (real).
inline bool band_membership(const Potential& q, int N, int k, double lambda, Tolerances tol = {},
                            double band_tol = 1e-8) {
  SectorMonodromy mk = monodromy_direct(q, lambda, k, N, tol);
  auto [tp, tm] = multipliers_from_matrix(mk);
  for (Complex tau : {tp, tm}) {
    if (tau == 0.0) continue;
    Complex d = 0.5 * (tau + 1.0 / tau);
    if (std::abs(d.imag()) <= band_tol && d.real() >= -1.0 - band_tol &&
        d.real() <= 1.0 + band_tol)
      return true;
  }
  return false;
}

/// Residuals of the multiplier identities
///   tau_{k,-} tau_{k,+} = s^{-k},
///   tau_{k,-} + tau_{k,+} = Tr M_k = s^{-k} Tr M_{-k},
///   {tau_{-k,±}} = {tau_{k,∓} s^k}  (unordered),
/// with both sector monodromies built by the direct path.
inline double multiplier_relations(const Potential& q, int N, int k, double lambda,
                             Tolerances tol = {}) {
  SectorConstants sc = SectorConstants::make(N, k);
  int kneg = (N - k) % N;
  SectorMonodromy mk = monodromy_direct(q, lambda, k, N, tol);
  SectorMonodromy mneg = monodromy_direct(q, lambda, kneg, N, tol);
  auto [tp, tm] = multipliers_from_matrix(mk);
  auto [np, nm] = multipliers_from_matrix(mneg);
  Complex sk = sc.s_pow_k;
  Complex sk_inv = std::conj(sk);

  double r = std::abs(tp * tm - sk_inv);
  r = std::max(r, std::abs((tp + tm) - mk.M.trace()));
  r = std::max(r, std::abs(mk.M.trace() - sk_inv * mneg.M.trace()));
  // unordered set match {np, nm} == {tm * s^k, tp * s^k}
  Complex e1 = tm * sk, e2 = tp * sk;
  double d_direct = std::max(std::abs(np - e1), std::abs(nm - e2));
  double d_swapped = std::max(std::abs(np - e2), std::abs(nm - e1));
  r = std::max(r, std::min(d_direct, d_swapped));
  return r;
}

}  // namespace oracle
}  // namespace zigzag
