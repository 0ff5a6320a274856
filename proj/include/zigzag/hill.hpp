#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>

#include "zigzag/errors.hpp"
#include "zigzag/potential.hpp"

namespace zigzag {

using Complex = std::complex<double>;

/// 2x2 complex matrix [[a,b],[c,d]].
struct Mat2 {
  Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

  Complex det() const { return a * d - b * c; }
  Complex trace() const { return a + d; }

  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
};

inline double max_abs_entry(const Mat2& m) {
  return std::max(std::max(std::abs(m.a), std::abs(m.b)),
                  std::max(std::abs(m.c), std::abs(m.d)));
}

inline double max_abs_diff(const Mat2& x, const Mat2& y) {
  return std::max(std::max(std::abs(x.a - y.a), std::abs(x.b - y.b)),
                  std::max(std::abs(x.c - y.c), std::abs(x.d - y.d)));
}

/// cos(sqrt(z)) as an even entire function of sqrt(z); branch-free.
inline Complex cos_sqrt(Complex z) {
  if (std::abs(z) < 1e-6) {
    return 1.0 + z * (-0.5 + z * (1.0 / 24.0 + z * (-1.0 / 720.0)));
  }
  return std::cos(std::sqrt(z));
}

/// sin(sqrt(z))/sqrt(z), likewise entire in z.
inline Complex sinc_sqrt(Complex z) {
  if (std::abs(z) < 1e-6) {
    return 1.0 + z * (-1.0 / 6.0 + z * (1.0 / 120.0 + z * (-1.0 / 5040.0)));
  }
  Complex w = std::sqrt(z);
  return std::sin(w) / w;
}

namespace detail {

// Exact propagator over a cell of width w with constant potential v:
// state (y, y') evolves by [[cos om w, sin om w / om], [-om sin om w, cos om w]],
// om^2 = lambda - v, written in the even variable z = om^2 w^2.
inline Mat2 constant_cell(Complex lambda, double v, double w) {
  Complex om2 = lambda - v;
  Complex z = om2 * (w * w);
  Complex c = cos_sqrt(z);
  Complex s = w * sinc_sqrt(z);  // sin(om w)/om
  return {c, s, -om2 * s, c};
}

// Exact product of constant-cell propagators up to x (piecewise potentials).
inline Mat2 propagate_piecewise(const Potential& q, Complex lambda, double x) {
  const auto& bp = q.breakpoint_list();
  const auto& vals = q.value_list();
  Mat2 m;
  for (std::size_t i = 0; i < vals.size() && bp[i] < x; ++i) {
    double hi = std::min(bp[i + 1], x);
    m = constant_cell(lambda, vals[i], hi - bp[i]) * m;
  }
  return m;
}

// One sweep of Y' = A(t) Y, A = [[0,1],[q(t)-lambda,0]], over [0, x] with the
// fourth-order commutator-free Magnus scheme: per step two exponentials of
// [[0,p],[r,0]] built on the Gauss nodes.  Each exponential is an exact
// constant-coefficient propagator, so the oscillation in lambda is integrated
// exactly and the step count is set by the variation of q, not by sqrt(lambda).
// Steps tile the smooth pieces of q, so jumps and kinks land on step
// boundaries; node values come from the piece itself.
inline Mat2 propagate_cf4(const Potential& q, Complex lambda, double x, long total_steps) {
  constexpr double kGaussShift = 0.28867513459481288225;  // sqrt(3)/6
  constexpr double kWeightHi = 0.25 + kGaussShift;
  constexpr double kWeightLo = 0.25 - kGaussShift;

  Mat2 y;
  const auto& seg = q.segments();
  for (std::size_t s = 0; s + 1 < seg.size(); ++s) {
    double a = seg[s];
    double b = std::min(seg[s + 1], x);
    if (b <= a) break;
    long n = std::max<long>(1, std::lround(static_cast<double>(total_steps) * (b - a)));
    double h = (b - a) / static_cast<double>(n);
    for (long i = 0; i < n; ++i) {
      double t0 = a + h * static_cast<double>(i);
      Complex w1 = q.value_in_segment(s, t0 + (0.5 - kGaussShift) * h) - lambda;
      Complex w2 = q.value_in_segment(s, t0 + (0.5 + kGaussShift) * h) - lambda;

      // exact half-step cell at the weighted average wbar:
      // exp([[0, h/2],[(h/2) wbar, 0]])
      auto half_kick = [h, &y](Complex wbar) {
        double p = 0.5 * h;
        Complex r = p * wbar;
        Complex z = -p * r;  // entries even in sqrt(z): branch-free
        Complex C = cos_sqrt(z);
        Complex S = sinc_sqrt(z);
        Complex e_b = p * S, e_c = r * S;
        Complex na = C * y.a + e_b * y.c;
        Complex nb = C * y.b + e_b * y.d;
        Complex nc = e_c * y.a + C * y.c;
        Complex nd = e_c * y.b + C * y.d;
        y = {na, nb, nc, nd};
      };
      half_kick(2.0 * (kWeightHi * w1 + kWeightLo * w2));
      half_kick(2.0 * (kWeightLo * w1 + kWeightHi * w2));
    }
    if (b >= x) break;
  }
  return y;
}

// Step-doubled propagation with Richardson extrapolation of the accepted pair.
inline Mat2 propagate_generic(const Potential& q, Complex lambda, double x, double tol) {
  long n = 128;
  const long cap = 1L << 22;
  Mat2 prev = propagate_cf4(q, lambda, x, n);
  double err = 0.0;
  while (n <= cap) {
    n *= 2;
    Mat2 cur = propagate_cf4(q, lambda, x, n);
    double scale = std::max(1.0, max_abs_entry(cur));
    err = max_abs_diff(prev, cur) / scale;
    if (err <= tol) {
      // leading error term is O(h^4): (16*fine - coarse)/15
      return {(16.0 * cur.a - prev.a) / 15.0, (16.0 * cur.b - prev.b) / 15.0,
              (16.0 * cur.c - prev.c) / 15.0, (16.0 * cur.d - prev.d) / 15.0};
    }
    prev = cur;
  }
  throw AccuracyError("transfer matrix integrator did not reach tolerance " +
                          std::to_string(tol) + " (achieved about " + std::to_string(err) + ")",
                      err);
}

inline Mat2 propagate(const Potential& q, Complex lambda, double x, double tol) {
  if (x == 0.0) return {};
  if (q.kind() == Potential::Kind::PiecewiseConstant)
    return propagate_piecewise(q, lambda, x);
  return propagate_generic(q, lambda, x, tol);
}

}  // namespace detail

/// Endpoint data of the fundamental solutions: theta(1), phi(1), theta'(1), phi'(1).
struct TransferMatrix {
  Complex theta1, phi1, dtheta1, dphi1;
  Complex lambda;

  Complex det() const { return theta1 * dphi1 - phi1 * dtheta1; }
  Mat2 mat() const { return {theta1, phi1, dtheta1, dphi1}; }
};

struct HillDiscriminants {
  Complex delta;        // (phi'(1) + theta(1)) / 2
  Complex delta_minus;  // (phi'(1) - theta(1)) / 2
  Complex lambda;
};

struct FundamentalValues {
  Complex theta, phi, dtheta, dphi;
};

inline constexpr double kDefaultMatrixTol = 1e-10;

/// Monodromy of -y'' + q y = lambda y over one period.  Exact constant-cell
/// products for piecewise q; step-doubled RK4 otherwise.
inline TransferMatrix transfer_matrix(const Potential& q, Complex lambda,
                                      double tol = kDefaultMatrixTol) {
  Mat2 m = detail::propagate(q, lambda, 1.0, tol);
  return {m.a, m.b, m.c, m.d, lambda};
}

/// Both fundamental solutions and their derivatives at x in [0,1].
inline FundamentalValues fundamental_at(const Potential& q, Complex lambda, double x,
                                        double tol = kDefaultMatrixTol) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("fundamental_at: x outside [0,1]");
  Mat2 m = detail::propagate(q, lambda, x, tol);
  return {m.a, m.b, m.c, m.d};
}

inline HillDiscriminants discriminants(const TransferMatrix& m) {
  return {0.5 * (m.dphi1 + m.theta1), 0.5 * (m.dphi1 - m.theta1), m.lambda};
}

inline HillDiscriminants discriminants(const Potential& q, Complex lambda,
                                       double tol = kDefaultMatrixTol) {
  return discriminants(transfer_matrix(q, lambda, tol));
}

/// Derivative of an entire function, real on the real axis, at real lambda.
/// order 1: complex step Im f(lambda + ih)/h with h = 1e-100 max(1,|lambda|);
/// order 2: central difference of order-1 values.
inline double dderivative(const std::function<Complex(Complex)>& f, double lambda, int order) {
  if (order == 1) {
    double h = 1e-100 * std::max(1.0, std::abs(lambda));
    return f(Complex(lambda, h)).imag() / h;
  }
  if (order == 2) {
    double d = 1e-4 * std::sqrt(std::max(1.0, std::abs(lambda)));
    return (dderivative(f, lambda + d, 1) - dderivative(f, lambda - d, 1)) / (2.0 * d);
  }
  throw DomainError("dderivative: order must be 1 or 2");
}

}  // namespace zigzag
