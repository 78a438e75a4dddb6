#include "itbeam/decentralized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace itbeam {

namespace {

double max_pair_residual(const NetworkState& state) {
  double worst = 0.0;
  const std::size_t n = state.agents.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      worst = std::max(worst, normalized_det_residual(sensitivity_from_solutions(
                                  i, j, state.agents[i].solution,
                                  state.agents[j].solution, state.gamma,
                                  *state.net)));
  return worst;
}

// a, b as BS i computes them from its own solution (c, d symmetric for j).
std::pair<double, double> local_sensitivities(const AgentState& agent,
                                              std::size_t peer,
                                              const NetworkInstance& net) {
  const double outgoing = rate_derivative_outgoing(agent.cell, peer, agent.solution);
  const double incoming =
      rate_derivative_incoming(agent.cell, agent.solution, agent.view, net);
  return {outgoing, incoming};
}

}  // namespace

SensitivityMatrix PairExchange::matrix(std::size_t i, std::size_t j) const {
  SensitivityMatrix m;
  m.i = i;
  m.j = j;
  m.a = a;
  m.b = b;
  m.c = c;
  m.d = d;
  return m;
}

double RunConfig::alpha_for(std::size_t i, std::size_t j, std::size_t cells) const {
  if (alpha.empty()) return 1.0;
  if (alpha.size() != cells * cells)
    throw std::invalid_argument("alpha table must be K x K");
  return alpha[i * cells + j];
}

double RunConfig::delta_for(std::size_t i, std::size_t j, std::size_t cells,
                            double fallback) const {
  if (delta.empty()) return fallback;
  if (delta.size() != cells * cells)
    throw std::invalid_argument("delta table must be K x K");
  return delta[i * cells + j];
}

std::array<double, 2> update_direction(const SensitivityMatrix& m, double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be non-negative");
  const double sign = m.determinant() >= 0.0 ? 1.0 : -1.0;
  return {sign * (alpha * m.d - m.b), sign * (m.a - alpha * m.c)};
}

NetworkState NetworkState::initialize(const NetworkInstance& net,
                                      const ItVector& gamma,
                                      const SolverOptions& options) {
  if (gamma.cells() != net.cells())
    throw std::invalid_argument("IT table does not match the network");
  NetworkState st;
  st.net = &net;
  st.gamma = gamma;
  const std::size_t n = net.cells();
  st.bound.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) st.bound[i * n + j] = mrt_it_bound(i, j, net);
  for (std::size_t k = 0; k < n; ++k) {
    AgentState agent;
    agent.cell = k;
    agent.view = ItView::of(gamma, k);
    agent.solution = solve_cr(k, agent.view, net, options);
    for (std::size_t j = 0; j < n; ++j) agent.local_channels.push_back(net.channel(k, j));
    st.agents.push_back(std::move(agent));
  }
  return st;
}

RateTuple NetworkState::rates() const {
  RateTuple r;
  for (const AgentState& a : agents) r.values.push_back(a.solution.value);
  return r;
}

PairUpdateResult pair_update(std::size_t i, std::size_t j, NetworkState& state,
                             const RunConfig& config) {
  const NetworkInstance& net = *state.net;
  const std::size_t n = net.cells();
  if (i >= n || j >= n || i == j)
    throw std::invalid_argument("pair update needs two distinct cells");

  PairUpdateResult result;
  AgentState& bs_i = state.agents[i];
  AgentState& bs_j = state.agents[j];

  // Each side computes its half of D_ij locally, then they swap.
  const auto [a, b] = local_sensitivities(bs_i, j, net);
  const auto [d, c] = local_sensitivities(bs_j, i, net);
  result.exchange = {a, b, c, d};
  result.gamma_ij = state.gamma(i, j);
  result.gamma_ji = state.gamma(j, i);

  const SensitivityMatrix m = result.exchange.matrix(i, j);
  result.residual = normalized_det_residual(m);
  if (result.residual <= config.cond_tol) {
    result.outcome = PairOutcome::kSkipped;
    return result;
  }

  const double alpha = config.alpha_for(i, j, n);
  auto dir = update_direction(m.finite(), alpha);
  const double len = std::hypot(dir[0], dir[1]);
  if (!(len > 0.0) || !std::isfinite(len)) {
    result.outcome = PairOutcome::kStalled;
    return result;
  }
  dir[0] /= len;
  dir[1] /= len;

  double min_bound = std::numeric_limits<double>::infinity();
  double max_bound = 0.0;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      if (p != q) {
        min_bound = std::min(min_bound, state.bound[p * n + q]);
        max_bound = std::max(max_bound, state.bound[p * n + q]);
      }
  double fallback = 0.1 * min_bound;
  if (!(fallback > 0.0)) fallback = 0.1 * max_bound;
  if (!(fallback > 0.0)) fallback = 0.1;
  double step = config.delta_for(i, j, n, fallback);
  if (!(step > 0.0)) throw std::invalid_argument("step size must be positive");

  const double old_i = bs_i.solution.value;
  const double old_j = bs_j.solution.value;
  const double cur_ij = state.gamma(i, j);
  const double cur_ji = state.gamma(j, i);

  result.outcome = PairOutcome::kStalled;
  for (int attempt = 0; attempt <= config.max_backtracks; ++attempt, step *= config.backtrack) {
    result.backtracks = attempt;
    const double next_ij = std::clamp(cur_ij + step * dir[0], 0.0, state.bound[i * n + j]);
    const double next_ji = std::clamp(cur_ji + step * dir[1], 0.0, state.bound[j * n + i]);
    if (next_ij == cur_ij && next_ji == cur_ji) continue;

    ItView view_i = bs_i.view;
    view_i.outgoing[j] = next_ij;
    view_i.incoming[j] = next_ji;
    ItView view_j = bs_j.view;
    view_j.outgoing[i] = next_ji;
    view_j.incoming[i] = next_ij;

    CrSolution sol_i, sol_j;
    try {
      sol_i = solve_cr(i, view_i, net, config.solver);
      sol_j = solve_cr(j, view_j, net, config.solver);
    } catch (const SolverError&) {
      result.outcome = PairOutcome::kFailed;
      return result;
    }

    if (sol_i.value > old_i + config.improve_tol &&
        sol_j.value > old_j + config.improve_tol) {
      state.gamma.set(i, j, next_ij);
      state.gamma.set(j, i, next_ji);
      bs_i.view = std::move(view_i);
      bs_j.view = std::move(view_j);
      bs_i.solution = std::move(sol_i);
      bs_j.solution = std::move(sol_j);
      result.outcome = PairOutcome::kAccepted;
      result.gamma_ij = next_ij;
      result.gamma_ji = next_ji;
      result.step = step;
      return result;
    }
  }
  return result;
}

Trajectory run(const NetworkInstance& net, const ItVector& gamma_init,
               const RunConfig& config) {
  NetworkState state = NetworkState::initialize(net, gamma_init, config.solver);
  const std::size_t n = net.cells();

  Trajectory traj;
  TrajectoryRow first;
  first.iteration = 0;
  first.gamma = state.gamma;
  first.rates = state.rates();
  first.max_residual = max_pair_residual(state);
  traj.rows.push_back(std::move(first));

  if (n == 1) {
    traj.converged = true;
  } else {
    for (int outer = 1; outer <= config.max_outer_iters; ++outer) {
      traj.outer_iterations = outer;
      bool progressed = false;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j || (!config.visit_ordered_pairs && j < i)) continue;
          const PairUpdateResult res = pair_update(i, j, state, config);
          if (res.outcome == PairOutcome::kAccepted) progressed = true;
          TrajectoryRow row;
          row.iteration = outer;
          row.pair_i = i;
          row.pair_j = j;
          row.outcome = res.outcome;
          row.gamma = state.gamma;
          row.rates = state.rates();
          row.max_residual = max_pair_residual(state);
          traj.rows.push_back(std::move(row));
        }
      if (!progressed) {
        traj.converged = true;
        break;
      }
    }
  }
  traj.final_gamma = state.gamma;
  traj.final_rates = state.rates();
  return traj;
}

}  // namespace itbeam
