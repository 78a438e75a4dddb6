// itbeam: per-cell solves, boundary sweeps, the decentralized protocol and
// brute-force checks for the MISO interference channel.

#include "itbeam/commands.hpp"
#include "itbeam/cr_solver.hpp"
#include "itbeam/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace itbeam;
using namespace itbeam::cli;

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("scenario", o.scenario, "Scenario file (JSON)")->required();
  sub->add_option("--seed", o.seed, "Replace the scenario's channel seed");
  sub->add_option("--tol", o.tol, "Duality-gap tolerance in bits")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--out", o.out, "CSV output path (stdout if omitted)");
}

std::ostream& report_stream(const CommonOptions& o) {
  return o.out.empty() || o.out == "-" ? std::cerr : std::cout;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interference-temperature beamforming for the MISO interference channel"};
  app.require_subcommand(1);

  SolveOptions solve;
  auto* s = app.add_subcommand("solve-cr", "Solve the per-cell problems for given IT levels");
  add_common(s, solve);
  s->add_option("--cell", solve.cell, "Cell to solve (1-based); all cells if omitted");
  s->add_option("--gamma", solve.gamma,
                "K(K-1) IT levels Gamma_ij, row-major over i != j")
      ->required()
      ->delimiter(',');

  SweepOptions sweep;
  auto* w = app.add_subcommand("sweep", "Sweep the IT box of a two-cell scenario");
  add_common(w, sweep);
  w->add_option("--grid", sweep.grid, "Points per axis")->capture_default_str();

  DecentralizedOptions dec;
  auto* d = app.add_subcommand("decentralized", "Run the pairwise IT update protocol");
  add_common(d, dec);
  d->add_option("--init", dec.init, "Starting IT levels: zf, mrt or file")
      ->capture_default_str()
      ->check(CLI::IsMember({"zf", "mrt", "file"}));
  d->add_option("--init-file", dec.init_file, "K(K-1) starting levels for --init file");
  d->add_option("--alpha", dec.alpha, "Rate-share weight: value, or i:j:value per pair");
  d->add_option("--delta", dec.delta,
                "Step length: value, or i:j:value per pair (default 0.1 * min Gamma_bar)");
  d->add_option("--max-iters", dec.max_iters, "Outer iteration limit")->capture_default_str();

  OracleOptions orc;
  auto* o = app.add_subcommand("oracle", "Brute-force rate region cloud");
  add_common(o, orc);
  o->add_option("--grid", orc.grid, "ZF/MRT combination points per user")
      ->capture_default_str();
  o->add_option("--phi", orc.phi, "Phase points per user")->capture_default_str();
  o->add_option("--rho", orc.rho, "Power fractions per user")->capture_default_str();
  o->add_option("--samples", orc.samples, "Random states instead of the grid (uses --seed)");

  CommonOptions base;
  auto* b = app.add_subcommand("baselines", "ZF, MRT and interference-free rates");
  add_common(b, base);

  VerifyOptions ver;
  auto* v = app.add_subcommand("verify", "Run the property battery; exit 1 on any failure");
  add_common(v, ver);
  v->add_option("--levels", ver.levels, "Random IT tables per check")->capture_default_str();
  v->add_option("--battery-seed", ver.battery_seed, "Seed for the battery's random draws")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*s) return cmd_solve_cr(solve, report_stream(solve));
    if (*w) return cmd_sweep(sweep, report_stream(sweep));
    if (*d) return cmd_decentralized(dec, report_stream(dec));
    if (*o) return cmd_oracle(orc, report_stream(orc));
    if (*b) return cmd_baselines(base, report_stream(base));
    if (*v) return cmd_verify(ver, std::cout);
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
