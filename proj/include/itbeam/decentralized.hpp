#pragma once

#include "itbeam/cr_solver.hpp"
#include "itbeam/model.hpp"
#include "itbeam/pareto.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace itbeam {

/// What one BS knows: its own IT view, its current solution and the
/// channels from itself to every MS.
struct AgentState {
  std::size_t cell = 0;
  ItView view;
  CrSolution solution;
  std::vector<cvec> local_channels;  // h_kj for j = 0..K-1
};

/// The only data that crosses the BS-BS link during a pair update.
struct PairExchange {
  double a = 0.0;  // from BS i
  double b = 0.0;  // from BS i
  double c = 0.0;  // from BS j
  double d = 0.0;  // from BS j

  SensitivityMatrix matrix(std::size_t i, std::size_t j) const;
};

struct RunConfig {
  // Per ordered pair (i, j), row-major K x K. Empty means defaults.
  std::vector<double> alpha;  // default 1
  std::vector<double> delta;  // default 0.1 * min_ij Gamma_bar_ij
  double backtrack = 0.5;
  int max_backtracks = 20;
  int max_outer_iters = 200;
  double cond_tol = 1e-3;
  double improve_tol = 1e-9;  // bits
  bool visit_ordered_pairs = false;
  SolverOptions solver;

  double alpha_for(std::size_t i, std::size_t j, std::size_t cells) const;
  double delta_for(std::size_t i, std::size_t j, std::size_t cells,
                   double fallback) const;
};

/// Direction (dGamma_ij, dGamma_ji) along which both C_i and C_j grow to
/// first order: D d = |det D| (alpha, 1)^T.
std::array<double, 2> update_direction(const SensitivityMatrix& m, double alpha);

/// Shared protocol state: the network-wide IT table plus every agent.
struct NetworkState {
  const NetworkInstance* net = nullptr;
  ItVector gamma{1};
  std::vector<AgentState> agents;
  std::vector<double> bound;  // K x K MRT levels Gamma_bar_ij

  static NetworkState initialize(const NetworkInstance& net, const ItVector& gamma,
                                 const SolverOptions& options);
  RateTuple rates() const;
};

enum class PairOutcome { kAccepted, kSkipped, kStalled, kFailed };

struct PairUpdateResult {
  PairOutcome outcome = PairOutcome::kSkipped;
  PairExchange exchange;
  double residual = 0.0;  // normalized |det D_ij| before the update
  double gamma_ij = 0.0;  // levels after the update
  double gamma_ji = 0.0;
  double step = 0.0;      // accepted step length, 0 if none
  int backtracks = 0;
};

/// One exchange between BSs i and j: swap (a, b) / (c, d), move the mutual
/// IT levels along the improving direction and re-solve both cells. The
/// step is accepted only if both guaranteed rates rise.
PairUpdateResult pair_update(std::size_t i, std::size_t j, NetworkState& state,
                             const RunConfig& config);

struct TrajectoryRow {
  int iteration = 0;
  std::optional<std::size_t> pair_i;
  std::optional<std::size_t> pair_j;
  PairOutcome outcome = PairOutcome::kSkipped;
  ItVector gamma{1};
  RateTuple rates;
  double max_residual = 0.0;  // over all pairs, after this row's update
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;
  bool converged = false;
  int outer_iterations = 0;
  ItVector final_gamma{1};
  RateTuple final_rates;
};

Trajectory run(const NetworkInstance& net, const ItVector& gamma_init,
               const RunConfig& config);

}  // namespace itbeam
