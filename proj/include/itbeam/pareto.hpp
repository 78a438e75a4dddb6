#pragma once

#include "itbeam/cr_solver.hpp"
#include "itbeam/model.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace itbeam {

/// Sensitivities of (C_i, C_j) to the mutual IT levels of a cell pair:
///   [ a b ]   [ dC_i/dGamma_ij  dC_i/dGamma_ji ]
///   [ c d ] = [ dC_j/dGamma_ij  dC_j/dGamma_ji ]
/// a and d may be +inf when the corresponding level is pinned at zero.
struct SensitivityMatrix {
  std::size_t i = 0;
  std::size_t j = 1;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  /// Copy with infinite entries replaced by a large finite value, so that
  /// determinant and update direction stay well defined.
  SensitivityMatrix finite() const;
  double determinant() const;
};

/// |ad - bc| / max(|ad|, |bc|, 1e-12), computed on the finite() copy.
double normalized_det_residual(const SensitivityMatrix& m);

ItVector extract_it(const TransmitState& state, const NetworkInstance& net);

struct ConsistencyReport {
  std::vector<double> gaps;  // C_k(Gamma_k) - R_k
  std::vector<CrSolution> solutions;
  bool consistent = false;
};

/// Re-solves every cell's IT-constrained problem at the IT levels the state
/// actually produces and compares the optimum with the state's own rates.
ConsistencyReport verify_rate_consistency(const TransmitState& state, const NetworkInstance& net,
                           double tol, const SolverOptions& options = {});

SensitivityMatrix sensitivity_from_solutions(std::size_t i, std::size_t j,
                                             const CrSolution& sol_i,
                                             const CrSolution& sol_j,
                                             const ItVector& gamma,
                                             const NetworkInstance& net);

SensitivityMatrix sensitivity_pair(std::size_t i, std::size_t j,
                                   const ItVector& gamma,
                                   const NetworkInstance& net,
                                   const SolverOptions& options = {});

/// Normalized |det D_ij| for every unordered pair i < j.
std::map<std::pair<std::size_t, std::size_t>, double>
necessary_condition_residuals(const ItVector& gamma, const NetworkInstance& net,
                              const SolverOptions& options = {});

/// Indices of the non-dominated points, in input order. Among identical
/// points only the first is kept.
std::vector<std::size_t> pareto_front_indices(const std::vector<RateTuple>& points);
std::vector<RateTuple> pareto_filter(const std::vector<RateTuple>& points);

struct SweepPoint {
  std::size_t row = 0;  // index along Gamma_12
  std::size_t col = 0;  // index along Gamma_21
  double gamma_12 = 0.0;
  double gamma_21 = 0.0;
  bool solved = false;
  std::string error;
  RateTuple guaranteed;  // (C_1, C_2)
  RateTuple actual;      // rates the two beamformers really achieve
  double det_residual = 0.0;
  double tightness = 0.0;  // max_ij |h_ij^H S_i h_ij - Gamma_ij| / max(Gamma_ij, 1)
  bool on_front = false;
  std::optional<CrSolution> cell_1;
  std::optional<CrSolution> cell_2;
};

struct BoundarySweep {
  std::size_t grid = 0;
  double bound_12 = 0.0;  // MRT level for Gamma_12
  double bound_21 = 0.0;
  std::vector<SweepPoint> points;  // row-major over (row, col)
  std::vector<std::size_t> front;  // indices into points

  std::vector<RateTuple> front_rates() const;
};

/// Solves both cells on an n x n uniform grid over [0, bound_12] x
/// [0, bound_21] and marks the Pareto-optimal guaranteed-rate pairs.
BoundarySweep sweep_boundary_2user(const NetworkInstance& net, std::size_t grid,
                                   const SolverOptions& options = {});

/// Largest margin by which some front point beats `point` in every
/// coordinate; <= 0 when nothing on the front strictly dominates it.
double dominance_deficiency(const RateTuple& point,
                            const std::vector<RateTuple>& front);

}  // namespace itbeam
