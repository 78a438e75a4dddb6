#include "itbeam/commands.hpp"

#include "itbeam/oracle.hpp"
#include "itbeam/pareto.hpp"
#include "itbeam/scenario.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace itbeam::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Battery thresholds besides --tol.
constexpr double kSlacknessTol = 1e-4;        // bits
constexpr double kDerivativeRelTol = 1e-2;
constexpr double kDerivativeFloor = 1e-4;     // smaller derivatives are skipped
constexpr double kFdStep = 1e-4;              // relative to the level's scale
constexpr double kConsistencyTol = 2e-3;           // bits
constexpr double kConsistencyFraction = 0.95;
constexpr double kIdentityTol = 1e-12;
constexpr std::size_t kIdentityDraws = 10000;
constexpr std::size_t kRandomStates = 200;

std::string num(double v) { return csv_number(v); }
std::string num(std::size_t v) { return csv_number(static_cast<std::int64_t>(v)); }

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size())
    throw UsageError("cannot read " + what + " from '" + s + "'");
  return v;
}

std::size_t parse_cell(const std::string& s, std::size_t cells, const std::string& what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 1 || v > cells)
    throw UsageError(what + " must be a cell number in 1.." + std::to_string(cells) +
                     ", got '" + s + "'");
  return v - 1;
}

void common_meta(CsvTable& t, const std::string& command, const CommonOptions& opts,
                 const NetworkInstance& net) {
  t.meta("command", command);
  t.meta("scenario", opts.scenario);
  if (opts.seed) t.meta("seed", std::to_string(*opts.seed));
  t.meta("prng", ChannelRng::kName);
  t.meta("cells", std::to_string(net.cells()));
  t.meta("tol", num(opts.tol));
}

SolverOptions solver_options(double tol) {
  SolverOptions s;
  s.gap_tol = tol;
  return s;
}

std::vector<double> upper_levels(const NetworkInstance& net) {
  const std::size_t n = net.cells();
  std::vector<double> bound(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) bound[i * n + j] = mrt_it_bound(i, j, net);
  return bound;
}

ItVector random_levels(const NetworkInstance& net, const std::vector<double>& bound,
                       ChannelRng& rng) {
  const std::size_t n = net.cells();
  ItVector g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) g.set(i, j, rng.uniform() * bound[i * n + j]);
  return g;
}

double solve_value(std::size_t k, const ItVector& g, const NetworkInstance& net,
                   const SolverOptions& s) {
  return solve_cr(k, ItView::of(g, k), net, s).value;
}

// |lambda * slack| over every constraint of one cell, in bits.
double slackness(std::size_t k, const CrSolution& sol, const ItView& view,
                 const NetworkInstance& net) {
  double worst = 0.0;
  const cmat s = sol.covariance();
  for (std::size_t j = 0; j < net.cells(); ++j) {
    const double lam = sol.duals.values[j];
    const double slack = j == k ? net.power(k) - sol.transmit_power()
                                : view.outgoing[j] - interference_level(k, j, s, net);
    if (std::isinf(lam)) continue;  // pinned at zero, slack is zero by construction
    worst = std::max(worst, std::abs(lam * slack));
  }
  return worst;
}

CheckResult check(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

}  // namespace

NetworkInstance open_scenario(const CommonOptions& opts) {
  ScenarioSpec spec = read_scenario_file(opts.scenario);
  if (opts.seed) {
    if (spec.explicit_channels)
      throw UsageError("--seed applies only to scenarios with generated channels");
    spec.seed = *opts.seed;
  }
  return build_network(spec);
}

std::string gamma_column(std::size_t i, std::size_t j, std::size_t cells) {
  if (cells < 10) return fmt::format("gamma_{}{}", i + 1, j + 1);
  return fmt::format("gamma_{}_{}", i + 1, j + 1);
}

std::vector<double> parse_pair_table(const std::vector<std::string>& entries,
                                     std::size_t cells, double fallback) {
  std::vector<double> table(cells * cells, fallback);
  for (const std::string& e : entries) {
    const auto c1 = e.find(':');
    if (c1 == std::string::npos) {
      std::fill(table.begin(), table.end(), parse_double(e, "a value"));
      continue;
    }
    const auto c2 = e.find(':', c1 + 1);
    if (c2 == std::string::npos)
      throw UsageError("pair entries look like i:j:value, got '" + e + "'");
    const std::size_t i = parse_cell(e.substr(0, c1), cells, "i");
    const std::size_t j = parse_cell(e.substr(c1 + 1, c2 - c1 - 1), cells, "j");
    if (i == j) throw UsageError("pair entry '" + e + "' needs i != j");
    table[i * cells + j] = parse_double(e.substr(c2 + 1), "a value");
  }
  return table;
}

ItVector it_from_list(const std::vector<double>& values, std::size_t cells) {
  if (values.size() != cells * (cells - 1))
    throw UsageError(fmt::format("expected {} IT levels, got {}", cells * (cells - 1),
                                 values.size()));
  ItVector g(cells);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < cells; ++i)
    for (std::size_t j = 0; j < cells; ++j) {
      if (i == j) continue;
      const double v = values[idx++];
      if (!(v >= 0.0) || !std::isfinite(v))
        throw UsageError("IT levels must be finite and non-negative");
      g.set(i, j, v);
    }
  return g;
}

std::vector<double> read_number_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open '" + path + "'");
  std::vector<double> out;
  std::string line;
  while (std::getline(f, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(parse_double(tok, "an IT level"));
  }
  return out;
}

// ---- solve-cr --------------------------------------------------------------

CsvTable solve_table(const NetworkInstance& net, const SolveOptions& opts) {
  const std::size_t n = net.cells();
  const ItVector gamma = it_from_list(opts.gamma, n);
  std::vector<std::string> header = {"k", "C_k_bits", "p_k"};
  for (std::size_t j = 0; j < n; ++j) header.push_back(fmt::format("lambda_{}", j + 1));
  header.insert(header.end(), {"gap", "iterations"});
  for (std::size_t j = 0; j < n; ++j) header.push_back(fmt::format("slack_{}", j + 1));
  CsvTable t(header);
  common_meta(t, "solve-cr", opts, net);

  std::vector<std::size_t> cells;
  if (opts.cell) {
    if (*opts.cell < 1 || *opts.cell > n) throw UsageError("--cell is out of range");
    cells.push_back(*opts.cell - 1);
  } else {
    for (std::size_t k = 0; k < n; ++k) cells.push_back(k);
  }
  for (std::size_t k : cells) {
    const ItView view = ItView::of(gamma, k);
    const CrSolution sol = solve_cr(k, view, net, solver_options(opts.tol));
    const cmat s = sol.covariance();
    std::vector<std::string> r = {num(k + 1), num(sol.value), num(sol.transmit_power())};
    for (double lam : sol.duals.values) r.push_back(num(lam));
    r.push_back(num(sol.diagnostics.duality_gap));
    r.push_back(num(static_cast<std::size_t>(sol.diagnostics.iterations)));
    for (std::size_t j = 0; j < n; ++j)
      r.push_back(num(j == k ? net.power(k) - sol.transmit_power()
                             : view.outgoing[j] - interference_level(k, j, s, net)));
    t.row(std::move(r));
  }
  return t;
}

int cmd_solve_cr(const SolveOptions& opts, std::ostream& report) {
  const NetworkInstance net = open_scenario(opts);
  const CsvTable t = solve_table(net, opts);
  t.save(opts.out);
  report << "solved " << t.rows() << " cell problem(s)\n";
  return kExitOk;
}

// ---- sweep -----------------------------------------------------------------

namespace {

CsvTable sweep_csv(const NetworkInstance& net, const SweepOptions& opts,
                   const BoundarySweep& sw) {
  CsvTable t({"gamma_12", "gamma_21", "C1_bits", "C2_bits", "on_pareto_front",
              "det_residual_12"});
  common_meta(t, "sweep", opts, net);
  t.meta("grid", num(opts.grid));
  t.meta("gamma_bar_12", num(sw.bound_12));
  t.meta("gamma_bar_21", num(sw.bound_21));
  for (const SweepPoint& p : sw.points)
    t.row({num(p.gamma_12), num(p.gamma_21),
           num(p.solved ? p.guaranteed[0] : kNaN), num(p.solved ? p.guaranteed[1] : kNaN),
           p.on_front ? "1" : "0", num(p.solved ? p.det_residual : kNaN)});
  return t;
}

BoundarySweep run_sweep(const NetworkInstance& net, const SweepOptions& opts) {
  if (net.cells() != 2) throw UsageError("sweep needs a two-cell scenario");
  if (opts.grid < 2) throw UsageError("--grid must be at least 2");
  return sweep_boundary_2user(net, opts.grid, solver_options(opts.tol));
}

}  // namespace

CsvTable sweep_table(const NetworkInstance& net, const SweepOptions& opts) {
  return sweep_csv(net, opts, run_sweep(net, opts));
}

int cmd_sweep(const SweepOptions& opts, std::ostream& report) {
  const NetworkInstance net = open_scenario(opts);
  const BoundarySweep sw = run_sweep(net, opts);
  sweep_csv(net, opts, sw).save(opts.out);
  std::size_t failed = 0;
  for (const SweepPoint& p : sw.points) failed += p.solved ? 0 : 1;
  report << "swept " << sw.points.size() << " points, " << sw.front.size()
         << " on the front";
  if (failed) report << ", " << failed << " did not converge";
  report << '\n';
  return failed ? kExitNoConvergence : kExitOk;
}

// ---- decentralized ---------------------------------------------------------

RunConfig run_config(const NetworkInstance& net, const DecentralizedOptions& opts) {
  const std::size_t n = net.cells();
  RunConfig cfg;
  cfg.solver = solver_options(opts.tol);
  if (opts.max_iters < 1) throw UsageError("--max-iters must be positive");
  cfg.max_outer_iters = opts.max_iters;
  cfg.alpha = parse_pair_table(opts.alpha, n, 1.0);
  for (double a : cfg.alpha)
    if (!(a >= 0.0) || !std::isfinite(a)) throw UsageError("alpha must be non-negative");
  if (!opts.delta.empty()) {
    cfg.delta = parse_pair_table(opts.delta, n, kNaN);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && std::isnan(cfg.delta[i * n + j])) {
          // Pairs without an override keep the default step.
          double lo = std::numeric_limits<double>::infinity();
          const std::vector<double> bound = upper_levels(net);
          for (std::size_t p = 0; p < n * n; ++p)
            if (p / n != p % n) lo = std::min(lo, bound[p]);
          cfg.delta[i * n + j] = lo > 0.0 ? 0.1 * lo : 0.1;
        }
    for (std::size_t p = 0; p < n * n; ++p)
      if (p / n != p % n && !(cfg.delta[p] > 0.0))
        throw UsageError("delta must be positive");
  }
  return cfg;
}

ItVector initial_levels(const NetworkInstance& net, const DecentralizedOptions& opts) {
  const std::size_t n = net.cells();
  if (opts.init == "zf") return ItVector(n);
  if (opts.init == "mrt") {
    ItVector g(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) g.set(i, j, mrt_it_bound(i, j, net));
    return g;
  }
  if (opts.init == "file") {
    if (opts.init_file.empty()) throw UsageError("--init file needs --init-file");
    return it_from_list(read_number_file(opts.init_file), n);
  }
  throw UsageError("--init must be zf, mrt or file");
}

CsvTable trajectory_table(const NetworkInstance& net, const Trajectory& traj,
                          const DecentralizedOptions& opts) {
  const std::size_t n = net.cells();
  std::vector<std::string> header = {"iteration", "pair_i", "pair_j", "accepted"};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) header.push_back(gamma_column(i, j, n));
  for (std::size_t k = 0; k < n; ++k) header.push_back(fmt::format("C_{}", k + 1));
  header.push_back("max_normalized_det_residual");
  CsvTable t(header);
  common_meta(t, "decentralized", opts, net);
  t.meta("init", opts.init);
  for (const std::string& a : opts.alpha) t.meta("alpha", a);
  for (const std::string& d : opts.delta) t.meta("delta", d);
  t.meta("max_iters", std::to_string(opts.max_iters));
  t.meta("converged", traj.converged ? "1" : "0");
  t.meta("outer_iterations", std::to_string(traj.outer_iterations));
  for (const TrajectoryRow& row : traj.rows) {
    std::vector<std::string> r = {
        num(static_cast<std::size_t>(row.iteration)),
        row.pair_i ? num(*row.pair_i + 1) : "0",
        row.pair_j ? num(*row.pair_j + 1) : "0",
        row.outcome == PairOutcome::kAccepted ? "1" : "0"};
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) r.push_back(num(row.gamma(i, j)));
    for (std::size_t k = 0; k < n; ++k) r.push_back(num(row.rates[k]));
    r.push_back(num(row.max_residual));
    t.row(std::move(r));
  }
  return t;
}

int cmd_decentralized(const DecentralizedOptions& opts, std::ostream& report) {
  const NetworkInstance net = open_scenario(opts);
  const RunConfig cfg = run_config(net, opts);
  const ItVector start = initial_levels(net, opts);
  const Trajectory traj = run(net, start, cfg);
  trajectory_table(net, traj, opts).save(opts.out);
  report << (traj.converged ? "converged" : "stopped") << " after "
         << traj.outer_iterations << " outer iteration(s); rates";
  for (std::size_t k = 0; k < net.cells(); ++k) report << ' ' << num(traj.final_rates[k]);
  report << '\n';
  return traj.converged ? kExitOk : kExitNoConvergence;
}

// ---- oracle ----------------------------------------------------------------

CsvTable oracle_table(const NetworkInstance& net, const OracleOptions& opts) {
  const std::size_t n = net.cells();
  if (opts.samples > 0) {
    const oracle::RegionCloud cloud =
        oracle::random_region_sample(net, opts.samples, opts.seed.value_or(1));
    std::vector<std::string> header = {"sample"};
    for (std::size_t k = 0; k < n; ++k) header.push_back(fmt::format("C_{}", k + 1));
    header.push_back("on_pareto_front");
    CsvTable t(header);
    common_meta(t, "oracle", opts, net);
    t.meta("mode", "random");
    t.meta("sample_seed", std::to_string(opts.seed.value_or(1)));
    std::vector<bool> front(cloud.size(), false);
    for (std::size_t idx : pareto_front_indices(cloud.tuples())) front[idx] = true;
    for (std::size_t p = 0; p < cloud.size(); ++p) {
      std::vector<std::string> r = {num(p)};
      for (std::size_t k = 0; k < n; ++k) r.push_back(num(cloud.rates[p * n + k]));
      r.push_back(front[p] ? "1" : "0");
      t.row(std::move(r));
    }
    return t;
  }

  if (n != 2) throw UsageError("the grid oracle needs two cells; use --samples");
  if (opts.grid < 2 || opts.phi < 1 || opts.rho < 1)
    throw UsageError("oracle grids must be positive (t grid at least 2)");
  const oracle::RegionCloud cloud =
      oracle::oracle_region_2user(net, {opts.grid, opts.phi, opts.rho});
  CsvTable t({"t_1", "phi_1", "rho_1", "t_2", "phi_2", "rho_2", "C1_bits", "C2_bits",
              "on_pareto_front"});
  common_meta(t, "oracle", opts, net);
  t.meta("mode", "grid");
  t.meta("grid", fmt::format("{}x{}x{}", opts.grid, opts.phi, opts.rho));
  std::vector<bool> front(cloud.size(), false);
  for (std::size_t idx : pareto_front_indices(cloud.tuples())) front[idx] = true;
  for (std::size_t p = 0; p < cloud.size(); ++p) {
    const oracle::BeamParams& a = cloud.params[2 * p];
    const oracle::BeamParams& b = cloud.params[2 * p + 1];
    t.row({num(a.t), num(a.phi), num(a.rho), num(b.t), num(b.phi), num(b.rho),
           num(cloud.rates[2 * p]), num(cloud.rates[2 * p + 1]), front[p] ? "1" : "0"});
  }
  return t;
}

int cmd_oracle(const OracleOptions& opts, std::ostream& report) {
  const NetworkInstance net = open_scenario(opts);
  const CsvTable t = oracle_table(net, opts);
  t.save(opts.out);
  report << "wrote " << t.rows() << " region points\n";
  return kExitOk;
}

// ---- baselines -------------------------------------------------------------

CsvTable baselines_table(const NetworkInstance& net) {
  const std::size_t n = net.cells();
  std::vector<std::string> header = {"strategy"};
  for (std::size_t k = 0; k < n; ++k) header.push_back(fmt::format("C_{}", k + 1));
  CsvTable t(header);
  t.meta("prng", ChannelRng::kName);
  t.meta("cells", std::to_string(n));

  auto add = [&](const std::string& name, const std::vector<double>& rates) {
    std::vector<std::string> r = {name};
    for (double v : rates) r.push_back(num(v));
    t.row(std::move(r));
  };
  try {
    add("zf", achievable_rates(zf_state(net), net).values);
  } catch (const std::domain_error&) {
    add("zf", std::vector<double>(n, kNaN));
  }
  add("mrt", achievable_rates(mrt_state(net), net).values);
  std::vector<double> alone;
  for (std::size_t k = 0; k < n; ++k) alone.push_back(interference_free_rate(k, net));
  add("interference_free", alone);
  return t;
}

int cmd_baselines(const CommonOptions& opts, std::ostream& report) {
  const NetworkInstance net = open_scenario(opts);
  CsvTable t = baselines_table(net);
  t.meta("scenario", opts.scenario);
  t.save(opts.out);
  report << "wrote " << t.rows() << " baseline rows\n";
  return kExitOk;
}

// ---- verify ----------------------------------------------------------------

std::vector<CheckResult> verify_battery(const NetworkInstance& net,
                                        const VerifyOptions& opts) {
  const std::size_t n = net.cells();
  // A zero tolerance is a legitimate request to see the checks fail, but the
  // solver itself needs a positive target.
  const SolverOptions sopt =
      opts.tol > 0.0 ? solver_options(opts.tol) : SolverOptions{};
  const std::vector<double> bound = upper_levels(net);
  std::vector<CheckResult> out;

  ChannelRng rng(opts.battery_seed);
  std::vector<ItVector> levels;
  for (std::size_t s = 0; s < opts.levels; ++s) levels.push_back(random_levels(net, bound, rng));

  // Duality gap, slackness and feasibility share one batch of solves.
  double worst_gap = 0.0, worst_slack = 0.0, worst_viol = 0.0;
  std::string solve_error;
  std::vector<std::vector<CrSolution>> sols(levels.size());
  for (std::size_t s = 0; s < levels.size() && solve_error.empty(); ++s)
    for (std::size_t k = 0; k < n; ++k) {
      const ItView view = ItView::of(levels[s], k);
      try {
        CrSolution sol = solve_cr(k, view, net, sopt);
        worst_gap = std::max(worst_gap, sol.diagnostics.duality_gap);
        worst_viol = std::max(worst_viol, sol.diagnostics.max_constraint_violation);
        worst_slack = std::max(worst_slack, slackness(k, sol, view, net));
        sols[s].push_back(std::move(sol));
      } catch (const SolverError& e) {
        solve_error = e.what();
        break;
      }
    }
  if (!solve_error.empty()) {
    out.push_back(check("duality_gap", false, solve_error));
    return out;
  }
  out.push_back(check("duality_gap", worst_gap <= opts.tol,
                      fmt::format("max gap {:.3e} bits, limit {:.3e}", worst_gap, opts.tol)));
  out.push_back(check("complementary_slackness", worst_slack <= kSlacknessTol,
                      fmt::format("max |lambda * slack| {:.3e} bits", worst_slack)));
  out.push_back(check("feasibility", worst_viol <= kFeasTolerance,
                      fmt::format("max relative violation {:.3e}", worst_viol)));

  // Central differences against the closed-form sensitivities.
  double worst_rel = 0.0;
  std::size_t compared = 0;
  try {
    for (std::size_t s = 0; s < levels.size(); ++s)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) {
          if (j == k) continue;
          const CrSolution& sol = sols[s][k];
          const ItView view = ItView::of(levels[s], k);
          struct Probe {
            std::size_t from, to;
            double analytic, scale;
          };
          const Probe probes[2] = {
              {k, j, rate_derivative_outgoing(k, j, sol), bound[k * n + j]},
              {j, k, rate_derivative_incoming(k, sol, view, net),
               net.noise(k) + view.incoming_sum()}};
          for (const Probe& p : probes) {
            const double g0 = levels[s](p.from, p.to);
            const double h = kFdStep * p.scale;
            if (!(g0 > h) || !std::isfinite(p.analytic)) continue;
            ItVector up = levels[s], down = levels[s];
            up.set(p.from, p.to, g0 + h);
            down.set(p.from, p.to, g0 - h);
            const double fd =
                (solve_value(k, up, net, sopt) - solve_value(k, down, net, sopt)) / (2 * h);
            const double mag = std::max(std::abs(fd), std::abs(p.analytic));
            if (mag <= kDerivativeFloor) continue;
            worst_rel = std::max(worst_rel, std::abs(fd - p.analytic) / mag);
            ++compared;
          }
        }
    out.push_back(check("derivatives", worst_rel <= kDerivativeRelTol,
                        fmt::format("{} comparisons, max relative error {:.3e}", compared,
                                    worst_rel)));
  } catch (const SolverError& e) {
    out.push_back(check("derivatives", false, e.what()));
  }

  // Any state's rates are achievable under its own IT levels.
  try {
    const oracle::RegionCloud cloud =
        oracle::random_region_sample(net, kRandomStates, opts.battery_seed);
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < cloud.size(); ++p) {
      const TransmitState st = TransmitState::from_beamformers(cloud.point_beamformers(p, net));
      const ConsistencyReport rep = verify_rate_consistency(st, net, opts.tol, sopt);
      for (double gap : rep.gaps) worst_excess = std::max(worst_excess, -gap);
    }
    out.push_back(check("rates_within_it_capacity", worst_excess <= opts.tol,
                        fmt::format("{} random states, max R_k - C_k {:.3e} bits",
                                    cloud.size(), worst_excess)));
  } catch (const SolverError& e) {
    out.push_back(check("rates_within_it_capacity", false, e.what()));
  }

  // Boundary points of a brute-force region reproduce their rates.
  bool small = n == 2;
  for (std::size_t k = 0; k < n; ++k) small = small && net.antennas(k) <= 3;
  if (small) {
    try {
      const oracle::RegionCloud cloud = oracle::oracle_region_2user(net, {61, 1, 8});
      const std::vector<std::size_t> front = pareto_front_indices(cloud.tuples());
      std::size_t ok = 0;
      double worst = 0.0;
      for (std::size_t idx : front) {
        const TransmitState st =
            TransmitState::from_beamformers(cloud.point_beamformers(idx, net));
        const ConsistencyReport rep = verify_rate_consistency(st, net, kConsistencyTol, sopt);
        if (rep.consistent) ++ok;
        for (double gap : rep.gaps) worst = std::max(worst, std::abs(gap));
      }
      const double frac = front.empty() ? 1.0 : static_cast<double>(ok) / front.size();
      out.push_back(check("boundary_consistency", frac >= kConsistencyFraction,
                          fmt::format("{}/{} front points within {:.0e} bits, max {:.3e}",
                                      ok, front.size(), kConsistencyTol, worst)));
    } catch (const SolverError& e) {
      out.push_back(check("boundary_consistency", false, e.what()));
    }
  }

  // D d = |det D| (alpha, 1) on random matrices.
  double worst_id = 0.0;
  for (std::size_t s = 0; s < kIdentityDraws; ++s) {
    SensitivityMatrix m;
    m.i = 0;
    m.j = 1;
    const double scale = std::pow(10.0, 6.0 * rng.uniform() - 3.0);
    m.a = scale * rng.cn01().real();
    m.b = scale * rng.cn01().real();
    m.c = scale * rng.cn01().real();
    m.d = scale * rng.cn01().real();
    const double alpha = std::pow(10.0, 4.0 * rng.uniform() - 2.0);
    const auto d = update_direction(m, alpha);
    const double det = std::abs(m.determinant());
    const double size = std::abs(m.a * m.d) + std::abs(m.b * m.c);
    const double e1 = std::abs(m.a * d[0] + m.b * d[1] - det * alpha) / (alpha * size);
    const double e2 = std::abs(m.c * d[0] + m.d * d[1] - det) / size;
    worst_id = std::max({worst_id, e1, e2});
  }
  out.push_back(check("update_direction_identity", worst_id <= kIdentityTol,
                      fmt::format("{} draws, max relative error {:.3e}", kIdentityDraws,
                                  worst_id)));
  return out;
}

int cmd_verify(const VerifyOptions& opts, std::ostream& report) {
  const NetworkInstance net = open_scenario(opts);
  const std::vector<CheckResult> res = verify_battery(net, opts);
  bool all = true;
  for (const CheckResult& c : res) {
    report << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    all = all && c.passed;
  }
  return all ? kExitOk : kExitVerifyFailed;
}

}  // namespace itbeam::cli
