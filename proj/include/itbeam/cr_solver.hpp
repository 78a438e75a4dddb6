#pragma once

#include "itbeam/model.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace itbeam {

/// Interference-temperature levels Gamma_kj (BS k -> MS j, k != j), stored as
/// a K x K table with an unused zero diagonal.
class ItVector {
 public:
  explicit ItVector(std::size_t cells);

  std::size_t cells() const { return cells_; }
  double operator()(std::size_t from, std::size_t to) const;
  void set(std::size_t from, std::size_t to, double value);

  bool operator==(const ItVector&) const = default;

 private:
  std::size_t cells_;
  std::vector<double> values_;
};

/// The 2(K-1) IT levels that enter cell k's problem. Vectors are indexed by
/// the other cell j; the entry at j == k is unused and kept at zero.
struct ItView {
  std::size_t cell = 0;
  std::vector<double> outgoing;  // Gamma_kj
  std::vector<double> incoming;  // Gamma_jk

  static ItView of(const ItVector& gamma, std::size_t k);
  double incoming_sum() const;
};

/// Lagrange multipliers of cell k's problem, laid out as lambda_k1..lambda_kK
/// with the power-constraint multiplier at index k. An IT constraint pinned
/// at zero carries an infinite multiplier.
struct DualVariables {
  std::vector<double> values;

  double cross(std::size_t j) const { return values.at(j); }
  double power(std::size_t k) const { return values.at(k); }
};

/// Closed-form maximizer of the Lagrangian for fixed multipliers.
struct InnerSolution {
  bool unbounded = false;
  cvec certificate;  // B v = 0, h_kk^H v != 0 when unbounded

  cvec direction;                  // u = B^{-1/2} h / |B^{-1/2} h|
  double gain = 0.0;               // |B^{-1/2} h_kk|^2
  double water_level = 0.0;        // theta
  cmat transformed_covariance;     // theta u u^H
  cvec beamformer;                 // primal maximizer w, S* = w w^H
  double lagrangian_max = 0.0;     // log2(1 + theta gain / N) - theta
  double dual_value = 0.0;         // g(lambda), constant terms included

  cmat covariance() const { return beamformer * beamformer.adjoint(); }
};

struct SolverOptions {
  double gap_tol = 1e-5;       // bits
  int max_iters = 2000;        // per ellipsoid pass
  int max_restarts = 60;       // radius doublings
  double width_tol = 1e-9;     // relative multiplier accuracy
};

struct CrDiagnostics {
  double duality_gap = 0.0;
  int iterations = 0;
  int restarts = 0;
  double max_constraint_violation = 0.0;
  bool near_degenerate = false;  // two active IT constraints, parallel channels
  bool width_converged = false;
};

struct CrSolution {
  std::size_t cell = 0;
  cvec beamformer;
  double value = 0.0;   // C_k(Gamma_k), bits
  DualVariables duals;
  CrDiagnostics diagnostics;

  double transmit_power() const { return beamformer.squaredNorm(); }
  cmat covariance() const { return beamformer * beamformer.adjoint(); }
};

/// Thrown when the ellipsoid method runs out of iterations with the duality
/// gap still above tolerance. Carries the best feasible iterate found.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, CrSolution best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const CrSolution& best() const { return best_; }

 private:
  CrSolution best_;
};

InnerSolution inner_dual_solution(std::size_t k, const DualVariables& duals,
                                  const ItView& gamma,
                                  const NetworkInstance& net);

/// Subgradient of g at the multipliers that produced `inner`, in the
/// DualVariables layout.
std::vector<double> dual_subgradient(std::size_t k, const DualVariables& duals,
                                     const InnerSolution& inner,
                                     const ItView& gamma,
                                     const NetworkInstance& net);

CrSolution solve_cr(std::size_t k, const ItView& gamma,
                    const NetworkInstance& net,
                    const SolverOptions& options = {});

struct DualBeamformer {
  cvec beamformer;
  double power_factor;  // p_k in w = B^{-1} h sqrt(p_k)
};

DualBeamformer beamformer_from_duals(std::size_t k, const DualVariables& duals,
                                     const ItView& gamma,
                                     const NetworkInstance& net);

/// dC_k / dGamma_jk for any j != k (the value depends only on the sum of
/// incoming levels).
double rate_derivative_incoming(std::size_t k, const CrSolution& solution,
                                const ItView& gamma,
                                const NetworkInstance& net);

/// dC_k / dGamma_kj, the multiplier of the j-th IT constraint.
double rate_derivative_outgoing(std::size_t k, std::size_t j,
                                const CrSolution& solution);

}  // namespace itbeam
