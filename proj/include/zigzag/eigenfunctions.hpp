#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "zigzag/errors.hpp"
#include "zigzag/hill.hpp"
#include "zigzag/lyapunov.hpp"
#include "zigzag/potential.hpp"
#include "zigzag/rootscan.hpp"

namespace zigzag {

/// Edge (n, j) of the quotient graph: cell n, edge type j in {0,1,2}.
struct EdgeIndex {
  int cell;
  int j;
  friend bool operator<(const EdgeIndex& a, const EdgeIndex& b) {
    return a.cell != b.cell ? a.cell < b.cell : a.j < b.j;
  }
  friend bool operator==(const EdgeIndex& a, const EdgeIndex& b) {
    return a.cell == b.cell && a.j == b.j;
  }
};

/// Compactly supported eigenfunction at a Dirichlet eigenvalue mu: on edge
/// alpha the function is coeffs[alpha] * phi(., mu).  Since phi vanishes at
/// both endpoints, the function vanishes at every vertex; the coefficients
/// are chosen so the derivative conditions hold as well.
struct FlatBandEigenfunction {
  enum class Case { EtaNonzero, EtaZero };

  double mu = 0.0;
  int k = 0;
  int N = 1;
  double c = 0.0;       // phi'(1, mu)
  Complex eta{0.0};     // 1 - s^k c^2
  Case tag = Case::EtaNonzero;
  std::map<EdgeIndex, Complex> coeffs;

  Complex coeff(int cell, int j) const {
    auto it = coeffs.find({cell, j});
    return it == coeffs.end() ? Complex(0.0) : it->second;
  }
};

/// Builds the generator eigenfunction psi^(0) for sector k at mu.
/// eta != 0: support on cells {-1, 0}; eta = 0 (only possible at k = 0 with
/// c = ±1): support on edges (0,1), (0,2).
inline FlatBandEigenfunction build_flatband(const Potential& q, double mu, int k, int N,
                                            Tolerances tol = {}) {
  SectorConstants sc = SectorConstants::make(N, k);
  TransferMatrix m = transfer_matrix(q, mu, tol.matrix);
  if (std::abs(m.phi1) > tol.f_at(mu))
    throw PreconditionError("build_flatband: mu is not a Dirichlet eigenvalue (|phi(1,mu)| = " +
                            std::to_string(std::abs(m.phi1)) + ")");
  FlatBandEigenfunction f;
  f.mu = mu;
  f.k = k;
  f.N = N;
  f.c = m.dphi1.real();
  f.eta = 1.0 - sc.s_pow_k * (f.c * f.c);
  if (std::abs(f.eta) <= tol.eta) {
    f.tag = FlatBandEigenfunction::Case::EtaZero;
    f.coeffs[{0, 1}] = 1.0;
    f.coeffs[{0, 2}] = f.c;
  } else {
    f.tag = FlatBandEigenfunction::Case::EtaNonzero;
    f.coeffs[{0, 0}] = f.eta;
    f.coeffs[{0, 1}] = f.c;
    f.coeffs[{0, 2}] = f.c * f.c;
    f.coeffs[{-1, 0}] = 0.0;
    f.coeffs[{-1, 1}] = -sc.s_pow_k * f.c;
    f.coeffs[{-1, 2}] = -1.0;
  }
  return f;
}

/// Max residual of the Kirchhoff conditions over cells n in [-2, 1]:
/// value matching  f_{n,0}(1) = f_{n,1}(0) = s^k f_{n,2}(1),
///                 f_{n+1,0}(0) = f_{n,1}(1) = f_{n,2}(0),
/// derivative sums -f'_{n,0}(1) + f'_{n,1}(0) - s^k f'_{n,2}(1) = 0,
///                 f'_{n+1,0}(0) - f'_{n,1}(1) + f'_{n,2}(0) = 0.
inline double kirchhoff_residual(const FlatBandEigenfunction& f, const Potential& q,
                                 Tolerances tol = {}) {
  TransferMatrix m = transfer_matrix(q, f.mu, tol.matrix);
  Complex sk = SectorConstants::make(f.N, f.k).s_pow_k;
  // phi(0)=0, phi'(0)=1 exactly; phi(1), phi'(1) from the propagation.
  Complex phi0 = 0.0, dphi0 = 1.0, phi1 = m.phi1, dphi1 = m.dphi1;
  double r = 0.0;
  auto upd = [&r](Complex v) { r = std::max(r, std::abs(v)); };
  for (int n = -2; n <= 1; ++n) {
    Complex f_n0_1 = f.coeff(n, 0) * phi1;
    Complex f_n1_0 = f.coeff(n, 1) * phi0;
    Complex f_n2_1 = f.coeff(n, 2) * phi1;
    Complex f_n1_1 = f.coeff(n, 1) * phi1;
    Complex f_n2_0 = f.coeff(n, 2) * phi0;
    Complex f_m0_0 = f.coeff(n + 1, 0) * phi0;
    upd(f_n0_1 - f_n1_0);
    upd(f_n1_0 - sk * f_n2_1);
    upd(f_m0_0 - f_n1_1);
    upd(f_n1_1 - f_n2_0);
    Complex df_n0_1 = f.coeff(n, 0) * dphi1;
    Complex df_n1_0 = f.coeff(n, 1) * dphi0;
    Complex df_n2_1 = f.coeff(n, 2) * dphi1;
    Complex df_n1_1 = f.coeff(n, 1) * dphi1;
    Complex df_n2_0 = f.coeff(n, 2) * dphi0;
    Complex df_m0_0 = f.coeff(n + 1, 0) * dphi0;
    upd(-df_n0_1 + df_n1_0 - sk * df_n2_1);
    upd(df_m0_0 - df_n1_1 + df_n2_0);
  }
  return r;
}

/// Cell shift psi^(0) -> psi^(p); the Kirchhoff residual is invariant.
inline FlatBandEigenfunction translate(const FlatBandEigenfunction& f, int p) {
  FlatBandEigenfunction g = f;
  g.coeffs.clear();
  for (const auto& [idx, v] : f.coeffs) g.coeffs[{idx.cell + p, idx.j}] = v;
  return g;
}

/// Max |f| over the endpoints of all supported edges (vertex values).
inline double vertex_value_max(const FlatBandEigenfunction& f, const Potential& q,
                               Tolerances tol = {}) {
  TransferMatrix m = transfer_matrix(q, f.mu, tol.matrix);
  double r = 0.0;
  for (const auto& [idx, v] : f.coeffs) {
    r = std::max(r, std::abs(v * m.phi1));  // value at the far end; phi(0) = 0 exactly
  }
  return r;
}

/// Samples coeff * phi(., mu) on a uniform t grid along one edge.
inline std::vector<Complex> edge_trace(const FlatBandEigenfunction& f, const Potential& q,
                                       EdgeIndex e, const std::vector<double>& t_grid,
                                       Tolerances tol = {}) {
  std::vector<Complex> out;
  out.reserve(t_grid.size());
  Complex a = f.coeff(e.cell, e.j);
  for (double t : t_grid) out.push_back(a * fundamental_at(q, f.mu, t, tol.matrix).phi);
  return out;
}

}  // namespace zigzag
