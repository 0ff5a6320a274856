// Command-line front end: band structure, flat-band eigenfunctions and the
// validation suite for -d^2 + q on the zigzag graph Gamma^N.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>

#include <CLI11.hpp>

#include "zigzag/json_io.hpp"
#include "zigzag/zigzag.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitComputationError = 2;
constexpr int kExitInputError = 3;

struct Options {
  std::string potential_path;
  int N = 3;
  double lambda_max = 100.0;
  std::string format = "json";
  std::string out;
  int workers = 1;
  std::uint64_t seed = 20110901;
  int mu_index = 1;
  int k = 0;
  bool emit_plot_data = false;
  zigzag::Tolerances tol;
};

void add_common(CLI::App* cmd, Options& opt, bool need_potential) {
  auto* p = cmd->add_option("--potential", opt.potential_path, "potential spec (JSON file)");
  if (need_potential) p->required();
  cmd->add_option("--N", opt.N, "number of cells around the tube (odd)")->required();
  cmd->add_option("--lambda-max", opt.lambda_max, "upper end of the spectral window");
  cmd->add_option("--format", opt.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", opt.out, "output path (stdout when omitted)");
  cmd->add_option("--workers", opt.workers, "worker threads for lambda scans");
  cmd->add_option("--seed", opt.seed, "seed for randomized validation sampling");
  cmd->add_option("--tol-root", opt.tol.root, "root bracket tolerance (scaled by 1+|lambda|)");
  cmd->add_option("--tol-matrix", opt.tol.matrix, "transfer-matrix relative tolerance");
  cmd->add_option("--tol-f", opt.tol.f, "level re-evaluation tolerance (scaled)");
}

zigzag::Potential load_potential(const Options& opt) {
  std::ifstream in(opt.potential_path);
  if (!in) throw zigzag::DomainError("cannot open potential file: " + opt.potential_path);
  zigzag::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw zigzag::DomainError(std::string("potential file is not valid JSON: ") + e.what());
  }
  return zigzag::parse_potential(j);
}

void require_valid_config(const Options& opt) {
  if (opt.N < 1 || opt.N % 2 == 0) throw zigzag::DomainError("N must be odd");
  if (!(opt.lambda_max > 0)) throw zigzag::DomainError("lambda-max must be positive");
  if (opt.workers < 1) throw zigzag::DomainError("workers must be >= 1");
  if (!(opt.tol.root > 0) || !(opt.tol.matrix > 0) || !(opt.tol.f > 0))
    throw zigzag::DomainError("tolerances must be positive");
}

void write_text(const Options& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(opt.out);
  if (!os) throw zigzag::DomainError("cannot open output path: " + opt.out);
  os << text;
}

int cmd_bands(const Options& opt) {
  require_valid_config(opt);
  zigzag::Potential q = load_potential(opt);
  if (opt.emit_plot_data && opt.out.empty())
    throw zigzag::DomainError("--emit-plot-data requires --out");

  zigzag::BandStructure bs =
      zigzag::assemble_bands(q, opt.N, opt.lambda_max, opt.tol, opt.workers);
  if (opt.format == "csv") {
    std::ostringstream os;
    zigzag::bands_to_csv(bs, os);
    write_text(opt, os.str());
  } else {
    write_text(opt, zigzag::bands_to_json(bs).dump(2) + "\n");
  }
  if (opt.emit_plot_data) {
    std::ofstream os(opt.out + ".plot.csv");
    if (!os) throw zigzag::DomainError("cannot open plot output path");
    zigzag::emit_plot_data(q, opt.N, opt.lambda_max, os, opt.tol);
  }
  return kExitOk;
}

int cmd_eigenfunction(const Options& opt) {
  require_valid_config(opt);
  if (opt.mu_index < 1) throw zigzag::DomainError("mu-index must be >= 1");
  int m = (opt.N - 1) / 2;
  if (opt.k < 0 || opt.k > m)
    throw zigzag::DomainError("k must lie in [0, m] with m = " + std::to_string(m));
  zigzag::Potential q = load_potential(opt);

  double pi = std::numbers::pi;
  double lmax = pi * pi * (opt.mu_index + 1) * (opt.mu_index + 1) + std::abs(q.mean()) + 10.0;
  auto mu = zigzag::dirichlet_spectrum(q, lmax, opt.tol, opt.workers);
  if (static_cast<int>(mu.size()) < opt.mu_index)
    throw zigzag::AssemblyError("could not locate Dirichlet eigenvalue mu_" +
                                std::to_string(opt.mu_index));
  auto f = zigzag::build_flatband(q, mu[opt.mu_index - 1], opt.k, opt.N, opt.tol);
  double res = zigzag::kirchhoff_residual(f, q, opt.tol);
  std::cout << "mu_" << opt.mu_index << " = " << mu[opt.mu_index - 1]
            << "  case = " << (f.tag == zigzag::FlatBandEigenfunction::Case::EtaZero
                                   ? "eta_zero"
                                   : "eta_nonzero")
            << "  kirchhoff_residual = " << res << "\n";
  write_text(opt, zigzag::eigenfunction_to_json(f, q, 65, opt.tol).dump(2) + "\n");
  return kExitOk;
}

int cmd_validate(const Options& opt) {
  require_valid_config(opt);
  zigzag::Potential q = load_potential(opt);
  zigzag::ValidationReport rep =
      zigzag::run_validation(q, opt.N, opt.lambda_max, opt.tol, opt.workers, opt.seed);
  for (const auto& r : rep.results)
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
  std::cout << (rep.all_pass() ? "all checks passed\n" : "validation FAILED\n");
  if (!opt.out.empty()) {
    zigzag::json j;
    j["results"] = zigzag::json::array();
    for (const auto& r : rep.results)
      j["results"].push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    j["asymptotics"] = zigzag::json::array();
    for (const auto& c : rep.checks) j["asymptotics"].push_back(zigzag::check_to_json(c));
    write_text(opt, j.dump(2) + "\n");
  }
  return rep.all_pass() ? kExitOk : kExitValidationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral data of -d^2 + q on the zigzag graph Gamma^N"};
  app.require_subcommand(1);
  Options opt;

  CLI::App* bands = app.add_subcommand("bands", "bands, gaps, flat bands and labeled points");
  add_common(bands, opt, true);
  bands->add_flag("--emit-plot-data", opt.emit_plot_data,
                  "also write (lambda, Delta_0, Delta_{k,±}) plot columns");

  CLI::App* eig = app.add_subcommand("eigenfunction", "compactly supported flat-band eigenfunction");
  add_common(eig, opt, true);
  eig->add_option("--mu-index", opt.mu_index, "Dirichlet eigenvalue index (1-based)");
  eig->add_option("--k", opt.k, "sector index");

  CLI::App* val = app.add_subcommand("validate", "run the invariant/oracle/asymptotics suite");
  add_common(val, opt, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (bands->parsed()) return cmd_bands(opt);
    if (eig->parsed()) return cmd_eigenfunction(opt);
    if (val->parsed()) return cmd_validate(opt);
  } catch (const zigzag::DomainError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const zigzag::Error& e) {
    std::cerr << "computation error: " << e.what() << "\n";
    return kExitComputationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputationError;
  }
  return kExitInputError;
}
