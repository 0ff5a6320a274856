#pragma once

#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "zigzag/asymptotics.hpp"
#include "zigzag/eigenfunctions.hpp"
#include "zigzag/errors.hpp"
#include "zigzag/potential.hpp"
#include "zigzag/spectra.hpp"

namespace zigzag {

using json = nlohmann::json;

/// Potential file schema:
///   {"type":"piecewise","breakpoints":[...],"values":[...]}
///   {"type":"fourier","a0":...,"a":[...],"b":[...]}
///   {"type":"samples","samples":[...]}
/// Keys outside the chosen type's schema are rejected.
inline Potential parse_potential(const json& j) {
  if (!j.is_object()) throw DomainError("potential file: expected a JSON object");
  if (!j.contains("type") || !j["type"].is_string())
    throw DomainError("potential file: missing \"type\"");
  std::string type = j["type"].get<std::string>();

  auto check_keys = [&j, &type](std::set<std::string> allowed) {
    allowed.insert("type");
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!allowed.count(it.key()))
        throw DomainError("potential file: unknown key \"" + it.key() + "\" for type " + type);
  };
  auto reals = [](const json& a, const std::string& what) {
    if (!a.is_array()) throw DomainError("potential file: " + what + " must be an array");
    std::vector<double> v;
    for (const auto& x : a) {
      if (!x.is_number()) throw DomainError("potential file: " + what + " must hold numbers");
      v.push_back(x.get<double>());
    }
    return v;
  };

  if (type == "piecewise") {
    check_keys({"breakpoints", "values"});
    if (!j.contains("breakpoints") || !j.contains("values"))
      throw DomainError("potential file: piecewise needs breakpoints and values");
    return Potential::piecewise(reals(j["breakpoints"], "breakpoints"),
                                reals(j["values"], "values"));
  }
  if (type == "fourier") {
    check_keys({"a0", "a", "b"});
    double a0 = 0.0;
    if (j.contains("a0")) {
      if (!j["a0"].is_number()) throw DomainError("potential file: a0 must be a number");
      a0 = j["a0"].get<double>();
    }
    std::vector<double> a, b;
    if (j.contains("a")) a = reals(j["a"], "a");
    if (j.contains("b")) b = reals(j["b"], "b");
    return Potential::fourier(a0, std::move(a), std::move(b));
  }
  if (type == "samples") {
    check_keys({"samples"});
    if (!j.contains("samples")) throw DomainError("potential file: samples needs samples");
    return Potential::samples(reals(j["samples"], "samples"));
  }
  throw DomainError("potential file: unknown type \"" + type + "\"");
}

inline json potential_to_json(const Potential& q) {
  json j;
  switch (q.kind()) {
    case Potential::Kind::PiecewiseConstant:
      j["type"] = "piecewise";
      j["breakpoints"] = q.breakpoint_list();
      j["values"] = q.value_list();
      break;
    case Potential::Kind::Fourier:
      j["type"] = "fourier";
      j["a0"] = q.fourier_a0();
      j["a"] = q.fourier_cos();
      j["b"] = q.fourier_sin();
      break;
    case Potential::Kind::Samples:
      j["type"] = "samples";
      j["samples"] = q.value_list();
      break;
  }
  return j;
}

inline json point_to_json(const SpectralPoint& p) {
  json j;
  j["kind"] = to_string(p.kind);
  j["k"] = p.k;
  j["n"] = p.n;
  j["sign"] = p.sign;
  j["lambda"] = p.lambda;
  return j;
}

inline json bands_to_json(const BandStructure& bs) {
  json j;
  j["N"] = bs.N;
  j["lambda_max"] = bs.lambda_max;
  j["bands"] = json::array();
  for (const auto& b : bs.bands) j["bands"].push_back({b.lo, b.hi});
  j["gaps"] = json::array();
  for (const auto& g : bs.gaps) {
    if (g.closed) continue;
    json gj;
    gj["n"] = g.n;
    gj["kind"] = (g.kind == GapKind::Stable) ? "stable" : "resonance";
    gj["interval"] = {g.interval.lo, g.interval.hi};
    j["gaps"].push_back(gj);
  }
  j["flat_bands"] = bs.flat_bands;
  j["points"] = json::array();
  for (const auto& p : bs.points) j["points"].push_back(point_to_json(p));
  j["q0"] = bs.q0;
  j["kappa"] = bs.kappa;
  j["h"] = bs.h;
  return j;
}

/// One row per labeled point: kind,k,n,sign,lambda.
inline void bands_to_csv(const BandStructure& bs, std::ostream& os) {
  os << "kind,k,n,sign,lambda\n";
  os.precision(17);
  for (const auto& p : bs.points)
    os << to_string(p.kind) << ',' << p.k << ',' << p.n << ',' << p.sign << ',' << p.lambda
       << '\n';
}

inline json eigenfunction_to_json(const FlatBandEigenfunction& f, const Potential& q,
                                  int trace_samples = 0, Tolerances tol = {}) {
  json j;
  j["mu"] = f.mu;
  j["k"] = f.k;
  j["N"] = f.N;
  j["case"] = (f.tag == FlatBandEigenfunction::Case::EtaZero) ? "eta_zero" : "eta_nonzero";
  j["coeffs"] = json::array();
  for (const auto& [idx, v] : f.coeffs) {
    json c;
    c["n"] = idx.cell;
    c["j"] = idx.j;
    c["re"] = v.real();
    c["im"] = v.imag();
    j["coeffs"].push_back(c);
  }
  if (trace_samples > 1) {
    std::vector<double> grid(trace_samples);
    for (int i = 0; i < trace_samples; ++i)
      grid[i] = static_cast<double>(i) / (trace_samples - 1);
    j["traces"] = json::array();
    for (const auto& [idx, v] : f.coeffs) {
      (void)v;
      auto tr = edge_trace(f, q, idx, grid, tol);
      json t;
      t["n"] = idx.cell;
      t["j"] = idx.j;
      t["t"] = grid;
      std::vector<double> re, im;
      for (auto z : tr) {
        re.push_back(z.real());
        im.push_back(z.imag());
      }
      t["re"] = re;
      t["im"] = im;
      j["traces"].push_back(t);
    }
  }
  return j;
}

inline json check_to_json(const AsymptoticCheck& c) {
  json j;
  j["law"] = c.law;
  j["n"] = c.n;
  j["residual"] = c.residual;
  j["verdict"] = c.pass ? "pass" : "fail";
  j["criterion"] = c.criterion;
  return j;
}

/// (lambda, Delta_0, Delta_{k,±}) columns on a uniform sqrt(lambda) grid,
/// for external plotting.
inline void emit_plot_data(const Potential& q, int N, double lambda_max, std::ostream& os,
                           Tolerances tol = {}, double u_step = std::numbers::pi / 64.0) {
  int m = (N - 1) / 2;
  os << "lambda,delta0";
  for (int k = 1; k <= m; ++k)
    os << ",delta" << k << "_plus_re,delta" << k << "_plus_im,delta" << k << "_minus_re,delta"
       << k << "_minus_im";
  os << "\n";
  os.precision(12);
  long steps = std::lround(std::ceil(std::sqrt(lambda_max) / u_step));
  for (long i = 0; i <= steps; ++i) {
    double u = u_step * static_cast<double>(i);
    double lam = std::min(u * u, lambda_max);
    Complex d0 = delta0(q, lam, tol.matrix);
    os << lam << ',' << d0.real();
    for (int k = 1; k <= m; ++k) {
      auto pt = lyapunov_point_from(d0, lam, SectorConstants::make(N, k));
      os << ',' << pt.delta_plus.real() << ',' << pt.delta_plus.imag() << ','
         << pt.delta_minus.real() << ',' << pt.delta_minus.imag();
    }
    os << '\n';
  }
}

}  // namespace zigzag
