#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "zigzag/errors.hpp"

namespace zigzag {

/// 1-periodic real potential q on [0,1).
///
/// Three representations:
///   piecewise  -- constant cells between strictly increasing breakpoints
///                 0 = t_0 < ... < t_M = 1, right-continuous at the jumps;
///   fourier    -- a0 + sum_n (a_n cos 2pi n t + b_n sin 2pi n t), n <= 128;
///   samples    -- values on the inclusive uniform grid i/(K-1), linear
///                 interpolation in between.
/// The periodic extension q(t+1) = q(t) makes q(1) = q(0).
class Potential {
 public:
  enum class Kind { PiecewiseConstant, Fourier, Samples };

  static constexpr int kMaxHarmonic = 128;

  static Potential zero() { return constant(0.0); }

  static Potential constant(double c) {
    return piecewise({0.0, 1.0}, {c});
  }

  static Potential piecewise(std::vector<double> breakpoints, std::vector<double> values) {
    if (breakpoints.size() < 2 || values.size() + 1 != breakpoints.size())
      throw DomainError("piecewise potential: need M+1 breakpoints for M values");
    if (breakpoints.front() != 0.0 || breakpoints.back() != 1.0)
      throw DomainError("piecewise potential: breakpoints must span exactly [0,1]");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
      if (!(breakpoints[i] > breakpoints[i - 1]))
        throw DomainError("piecewise potential: breakpoints must be strictly increasing");
    Potential q;
    q.kind_ = Kind::PiecewiseConstant;
    q.breaks_ = std::move(breakpoints);
    q.values_ = std::move(values);
    q.segments_ = q.breaks_;
    return q;
  }

  static Potential fourier(double a0, std::vector<double> cos_coeffs = {},
                           std::vector<double> sin_coeffs = {}) {
    if (static_cast<int>(cos_coeffs.size()) > kMaxHarmonic ||
        static_cast<int>(sin_coeffs.size()) > kMaxHarmonic)
      throw DomainError("fourier potential: harmonic count capped at 128");
    Potential q;
    q.kind_ = Kind::Fourier;
    q.a0_ = a0;
    q.a_ = std::move(cos_coeffs);
    q.b_ = std::move(sin_coeffs);
    q.segments_ = {0.0, 1.0};
    return q;
  }

  static Potential samples(std::vector<double> values) {
    if (values.size() < 2)
      throw DomainError("samples potential: need at least 2 grid values");
    Potential q;
    q.kind_ = Kind::Samples;
    q.values_ = std::move(values);
    std::size_t cells = q.values_.size() - 1;
    q.segments_.resize(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i)
      q.segments_[i] = static_cast<double>(i) / static_cast<double>(cells);
    q.segments_.back() = 1.0;
    return q;
  }

  Kind kind() const { return kind_; }

  /// Value at t in [0,1).  Outside the domain -> DomainError.
  double evaluate(double t) const {
    if (!(t >= 0.0 && t < 1.0)) throw DomainError("Potential::evaluate: t outside [0,1)");
    return eval_unit(t);
  }

  /// Periodic extension, defined for every real t.
  double periodic(double t) const {
    double u = t - std::floor(t);
    if (u >= 1.0) u = 0.0;
    return eval_unit(u);
  }

  /// q0 = integral of q over one period; exact for piecewise and fourier.
  double mean() const {
    switch (kind_) {
      case Kind::PiecewiseConstant: {
        double s = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i)
          s += values_[i] * (breaks_[i + 1] - breaks_[i]);
        return s;
      }
      case Kind::Fourier:
        return a0_;
      case Kind::Samples:
        return simpson([](double) { return 1.0; });
    }
    return 0.0;
  }

  /// q_hat_n = int_0^1 q(t) e^{i 2 pi n t} dt, n >= 1.  Im gives q_hat_{sn}.
  std::complex<double> fourier_coeff(int n) const {
    if (n < 1) throw DomainError("fourier_coeff: n must be >= 1");
    const double w = 2.0 * std::numbers::pi * n;
    switch (kind_) {
      case Kind::PiecewiseConstant: {
        std::complex<double> s = 0.0;
        const std::complex<double> iw(0.0, w);
        for (std::size_t i = 0; i < values_.size(); ++i)
          s += values_[i] * (std::exp(iw * breaks_[i + 1]) - std::exp(iw * breaks_[i])) / iw;
        return s;
      }
      case Kind::Fourier: {
        double re = (n <= static_cast<int>(a_.size())) ? 0.5 * a_[n - 1] : 0.0;
        double im = (n <= static_cast<int>(b_.size())) ? 0.5 * b_[n - 1] : 0.0;
        return {re, im};
      }
      case Kind::Samples: {
        double re = simpson([w](double t) { return std::cos(w * t); });
        double im = simpson([w](double t) { return std::sin(w * t); });
        return {re, im};
      }
    }
    return 0.0;
  }

  /// q_tilde_{cn} = int_0^1 q(t) cos(pi n t) dt, n >= 1.
  double half_cosine_coeff(int n) const {
    if (n < 1) throw DomainError("half_cosine_coeff: n must be >= 1");
    const double w = std::numbers::pi * n;
    switch (kind_) {
      case Kind::PiecewiseConstant: {
        double s = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i)
          s += values_[i] * (std::sin(w * breaks_[i + 1]) - std::sin(w * breaks_[i])) / w;
        return s;
      }
      case Kind::Fourier: {
        // int cos(2 pi m t) cos(pi n t) = delta_{n,2m}/2;
        // int sin(2 pi m t) cos(pi n t) = 4m / (pi (4m^2 - n^2)) for odd n, else 0.
        double s = 0.0;
        if (n % 2 == 0) {
          int m = n / 2;
          if (m >= 1 && m <= static_cast<int>(a_.size())) s += 0.5 * a_[m - 1];
        } else {
          for (std::size_t j = 0; j < b_.size(); ++j) {
            double m = static_cast<double>(j + 1);
            s += b_[j] * 4.0 * m / (std::numbers::pi * (4.0 * m * m - n * n));
          }
        }
        return s;
      }
      case Kind::Samples:
        return simpson([w](double t) { return std::cos(w * t); });
    }
    return 0.0;
  }

  /// sup over a probe grid of |q(t) - q(1-t)| <= tol.
  bool is_even(double tol) const {
    if (!(tol > 0.0)) throw DomainError("is_even: tol must be positive");
    const int probes = 4096;
    for (int i = 0; i < probes; ++i) {
      double t = (i + 0.5) / probes;
      if (std::abs(eval_unit(t) - eval_unit(1.0 - t)) > tol) return false;
    }
    // Probe the jump points of a piecewise representation as well.
    if (kind_ == Kind::PiecewiseConstant) {
      for (double b : breaks_) {
        double t = std::min(b, 1.0 - 1e-12);
        double s = 1.0 - t;
        if (std::abs(eval_unit(t) - eval_unit(s)) > tol) return false;
      }
    }
    return true;
  }

  /// Cheap upper bound for max |q|; used to seed the lambda scan floor.
  double max_abs() const {
    switch (kind_) {
      case Kind::PiecewiseConstant:
      case Kind::Samples: {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
      }
      case Kind::Fourier: {
        double m = std::abs(a0_);
        for (double v : a_) m += std::abs(v);
        for (double v : b_) m += std::abs(v);
        return m;
      }
    }
    return 0.0;
  }

  /// Boundaries of the smooth pieces of q: the ODE integrator aligns its
  /// steps with these so that discontinuities (piecewise) and kinks
  /// (samples) fall on step boundaries.
  const std::vector<double>& segments() const { return segments_; }

  /// Value of q at t taken from piece i (one-sided at piece boundaries).
  double value_in_segment(std::size_t i, double t) const {
    if (kind_ == Kind::PiecewiseConstant) return values_[i];
    return eval_unit(std::min(t, 1.0 - 1e-15));
  }

  const std::vector<double>& breakpoint_list() const { return breaks_; }
  const std::vector<double>& value_list() const { return values_; }
  double fourier_a0() const { return a0_; }
  const std::vector<double>& fourier_cos() const { return a_; }
  const std::vector<double>& fourier_sin() const { return b_; }

  /// q + c, same representation.
  Potential shifted(double c) const {
    Potential q = *this;
    switch (kind_) {
      case Kind::PiecewiseConstant:
      case Kind::Samples:
        for (double& v : q.values_) v += c;
        break;
      case Kind::Fourier:
        q.a0_ += c;
        break;
    }
    return q;
  }

 private:
  Potential() = default;

  double eval_unit(double t) const {
    switch (kind_) {
      case Kind::PiecewiseConstant: {
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
        std::size_t i = static_cast<std::size_t>(it - breaks_.begin());
        if (i == 0) i = 1;
        if (i > values_.size()) i = values_.size();
        return values_[i - 1];
      }
      case Kind::Fourier: {
        double s = a0_;
        const double w = 2.0 * std::numbers::pi * t;
        for (std::size_t n = 0; n < a_.size(); ++n) s += a_[n] * std::cos(w * (n + 1.0));
        for (std::size_t n = 0; n < b_.size(); ++n) s += b_[n] * std::sin(w * (n + 1.0));
        return s;
      }
      case Kind::Samples: {
        std::size_t cells = values_.size() - 1;
        double x = t * cells;
        std::size_t i = std::min(static_cast<std::size_t>(x), cells - 1);
        double frac = x - static_cast<double>(i);
        return values_[i] + frac * (values_[i + 1] - values_[i]);
      }
    }
    return 0.0;
  }

  // Composite Simpson over the sample grid of w(t_i) * q(t_i); the samples
  // are treated as readings of a smooth q.  Odd interval counts finish with
  // a 3/8 panel.
  template <typename W>
  double simpson(W&& w) const {
    std::size_t n = values_.size() - 1;  // intervals
    double h = 1.0 / static_cast<double>(n);
    auto f = [&](std::size_t i) {
      double t = static_cast<double>(i) * h;
      return values_[i] * w(t);
    };
    double s = 0.0;
    std::size_t main_end = (n % 2 == 0) ? n : n - 3;
    for (std::size_t i = 0; i + 2 <= main_end; i += 2)
      s += (h / 3.0) * (f(i) + 4.0 * f(i + 1) + f(i + 2));
    if (n % 2 != 0) {
      if (n < 3) {  // single interval: trapezoid is all we have
        s += 0.5 * h * (f(0) + f(1));
      } else {
        std::size_t i = n - 3;
        s += (3.0 * h / 8.0) * (f(i) + 3.0 * f(i + 1) + 3.0 * f(i + 2) + f(i + 3));
      }
    }
    return s;
  }

  Kind kind_ = Kind::PiecewiseConstant;
  std::vector<double> breaks_;
  std::vector<double> values_;
  double a0_ = 0.0;
  std::vector<double> a_, b_;
  std::vector<double> segments_;
};

}  // namespace zigzag
