#include "itbeam/cr_solver.hpp"

#include "itbeam/ellipsoid.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace itbeam {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kInf = std::numeric_limits<double>::infinity();

// IT levels at or below this fraction of the interference scale
// P_k |h_kj|^2 are treated as exact zeros: the constraint pins the
// beamformer to the null space of h_kj and its multiplier is infinite.
constexpr double kPinnedFraction = 1e-14;

// Eigenvalues of B below this fraction of the largest count as zero.
constexpr double kRankTol = 1e-12;

void check_view(std::size_t k, const ItView& gamma, const NetworkInstance& net) {
  const std::size_t n = net.cells();
  if (k >= n) throw std::invalid_argument("cell index out of range");
  if (gamma.cell != k)
    throw std::invalid_argument("IT view belongs to a different cell");
  if (gamma.outgoing.size() != n || gamma.incoming.size() != n)
    throw std::invalid_argument("IT view must have K entries per direction");
  for (std::size_t j = 0; j < n; ++j) {
    if (j == k) continue;
    if (!(gamma.outgoing[j] >= 0.0) || !(gamma.incoming[j] >= 0.0) ||
        !std::isfinite(gamma.outgoing[j]) || !std::isfinite(gamma.incoming[j]))
      throw std::invalid_argument("IT levels must be finite and non-negative");
  }
}

// Orthonormal basis (as columns) of the orthogonal complement of `span`.
cmat complement_basis(const std::vector<cvec>& span, Eigen::Index dim) {
  std::vector<cvec> basis;
  auto absorb = [&basis](cvec v) {
    const double ref = v.norm();
    for (const cvec& b : basis) v -= b * b.dot(v);
    for (const cvec& b : basis) v -= b * b.dot(v);  // second pass for stability
    if (v.norm() > 1e-10 * std::max(ref, 1e-300)) {
      basis.push_back(v / v.norm());
      return true;
    }
    return false;
  };
  for (const cvec& s : span) absorb(s);
  const std::size_t span_rank = basis.size();
  for (Eigen::Index e = 0; e < dim; ++e) absorb(cvec::Unit(dim, e));
  cmat out(dim, static_cast<Eigen::Index>(basis.size() - span_rank));
  for (std::size_t c = span_rank; c < basis.size(); ++c)
    out.col(static_cast<Eigen::Index>(c - span_rank)) = basis[c];
  return out;
}

// Cell k's problem restricted to the subspace left free by pinned
// constraints. Multipliers are ordered (free cross constraints..., power).
struct Subproblem {
  std::size_t cell = 0;
  std::size_t cells = 0;
  cvec own;
  std::vector<cvec> cross;
  std::vector<double> caps;
  std::vector<std::size_t> cross_cell;
  std::vector<std::size_t> pinned_cell;
  std::vector<std::size_t> vacuous_cell;  // h_kj == 0
  double budget = 0.0;
  double noise = 0.0;  // sigma_k^2 + sum of incoming levels
  cmat basis;          // M x r, orthonormal columns
  bool reduced = false;

  Eigen::Index dual_dim() const {
    return static_cast<Eigen::Index>(cross.size()) + 1;
  }
  cvec lift(const cvec& w) const { return reduced ? cvec(basis * w) : w; }
};

Subproblem make_subproblem(std::size_t k, const ItView& gamma,
                           const NetworkInstance& net,
                           const std::vector<bool>& pinned) {
  Subproblem sp;
  sp.cell = k;
  sp.cells = net.cells();
  sp.budget = net.power(k);
  sp.noise = net.noise(k) + gamma.incoming_sum();

  std::vector<cvec> pinned_channels;
  for (std::size_t j = 0; j < net.cells(); ++j) {
    if (j == k) continue;
    const cvec& h = net.channel(k, j);
    if (h.squaredNorm() == 0.0) {
      sp.vacuous_cell.push_back(j);
    } else if (pinned[j]) {
      sp.pinned_cell.push_back(j);
      pinned_channels.push_back(h);
    }
  }

  const Eigen::Index m = net.antennas(k);
  sp.reduced = !pinned_channels.empty();
  sp.basis = sp.reduced ? complement_basis(pinned_channels, m)
                        : cmat(cmat::Identity(m, m));
  auto project = [&sp](const cvec& h) -> cvec {
    return sp.reduced ? cvec(sp.basis.adjoint() * h) : h;
  };

  sp.own = project(net.channel(k, k));
  // Rounding leaves a sliver of h_kk when it lies in the pinned span.
  if (sp.own.squaredNorm() <= 1e-24 * net.channel(k, k).squaredNorm()) sp.own.setZero();
  for (std::size_t j = 0; j < net.cells(); ++j) {
    if (j == k || pinned[j] || net.channel(k, j).squaredNorm() == 0.0) continue;
    sp.cross.push_back(project(net.channel(k, j)));
    sp.caps.push_back(gamma.outgoing[j]);
    sp.cross_cell.push_back(j);
  }
  return sp;
}

std::vector<bool> pinned_by_level(std::size_t k, const ItView& gamma,
                                  const NetworkInstance& net) {
  std::vector<bool> pinned(net.cells(), false);
  for (std::size_t j = 0; j < net.cells(); ++j) {
    if (j == k) continue;
    const double scale = net.power(k) * net.channel(k, j).squaredNorm();
    pinned[j] = gamma.outgoing[j] <= kPinnedFraction * scale;
  }
  return pinned;
}

std::vector<bool> pinned_by_duals(std::size_t k, const DualVariables& duals,
                                  const NetworkInstance& net) {
  if (duals.values.size() != net.cells())
    throw std::invalid_argument("dual vector must have K entries");
  std::vector<bool> pinned(net.cells(), false);
  for (std::size_t j = 0; j < net.cells(); ++j) {
    const double v = duals.values[j];
    if (std::isnan(v) || v < 0.0)
      throw std::invalid_argument("multipliers must be non-negative");
    if (std::isinf(v)) {
      if (j == k)
        throw std::invalid_argument("power multiplier must be finite");
      pinned[j] = true;
    }
  }
  return pinned;
}

Eigen::VectorXd multipliers_of(const Subproblem& sp, const DualVariables& d) {
  Eigen::VectorXd lambda(sp.dual_dim());
  for (std::size_t c = 0; c < sp.cross.size(); ++c)
    lambda(static_cast<Eigen::Index>(c)) = d.values[sp.cross_cell[c]];
  lambda(sp.dual_dim() - 1) = d.values[sp.cell];
  return lambda;
}

struct InnerEval {
  bool unbounded = false;
  cvec certificate;   // reduced coordinates
  cvec search;        // B^+ h, or the certificate
  cvec half;          // B^{-1/2} h
  double gain = 0.0;  // h^H B^{-1} h
  double theta = 0.0;
  cvec w;             // reduced primal maximizer
  double lagrangian = 0.0;
  double g = kInf;
  double min_eig = 0.0;
  double max_eig = 0.0;
};

InnerEval evaluate_inner(const Subproblem& sp, const Eigen::VectorXd& lambda) {
  const Eigen::Index r = sp.own.size();
  InnerEval ev;
  ev.w = cvec::Zero(r);
  if (r == 0) {
    ev.lagrangian = 0.0;
    ev.g = lambda(sp.dual_dim() - 1) * sp.budget;
    for (std::size_t c = 0; c < sp.cross.size(); ++c)
      ev.g += lambda(static_cast<Eigen::Index>(c)) * sp.caps[c];
    return ev;
  }

  cmat b = cmat::Identity(r, r) * lambda(sp.dual_dim() - 1);
  for (std::size_t c = 0; c < sp.cross.size(); ++c)
    b += lambda(static_cast<Eigen::Index>(c)) * sp.cross[c] * sp.cross[c].adjoint();

  Eigen::SelfAdjointEigenSolver<cmat> eig(b);
  const Eigen::VectorXd& e = eig.eigenvalues();
  const cmat& v = eig.eigenvectors();
  ev.max_eig = e(r - 1);
  ev.min_eig = e(0);
  const double thresh = kRankTol * std::max(ev.max_eig, 0.0);

  const cvec coeff = v.adjoint() * sp.own;  // v_i^H h
  const double own2 = sp.own.squaredNorm();
  cvec null_part = cvec::Zero(r);
  ev.search = cvec::Zero(r);
  ev.half = cvec::Zero(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (e(i) <= thresh) {
      null_part += v.col(i) * coeff(i);
    } else {
      ev.search += v.col(i) * (coeff(i) / e(i));
      ev.half += v.col(i) * (coeff(i) / std::sqrt(e(i)));
      ev.gain += std::norm(coeff(i)) / e(i);
    }
  }

  if (null_part.squaredNorm() > 1e-20 * own2 && own2 > 0.0) {
    ev.unbounded = true;
    ev.certificate = null_part / null_part.norm();
    ev.search = ev.certificate;
    ev.g = kInf;
    return ev;
  }

  if (ev.gain > 0.0) ev.theta = std::max(0.0, 1.0 / kLn2 - sp.noise / ev.gain);
  if (ev.theta > 0.0) ev.w = ev.search * std::sqrt(ev.theta / ev.gain);
  ev.lagrangian = std::log2(1.0 + ev.theta * ev.gain / sp.noise) - ev.theta;
  ev.g = ev.lagrangian + lambda(sp.dual_dim() - 1) * sp.budget;
  for (std::size_t c = 0; c < sp.cross.size(); ++c)
    ev.g += lambda(static_cast<Eigen::Index>(c)) * sp.caps[c];
  return ev;
}

Eigen::VectorXd subgradient(const Subproblem& sp, const cvec& w) {
  Eigen::VectorXd s(sp.dual_dim());
  for (std::size_t c = 0; c < sp.cross.size(); ++c)
    s(static_cast<Eigen::Index>(c)) = sp.caps[c] - std::norm(sp.cross[c].dot(w));
  s(sp.dual_dim() - 1) = sp.budget - w.squaredNorm();
  return s;
}

struct Primal {
  cvec w;
  double value = 0.0;
};

// Full feasible power along the unit direction of `dir`.
Primal feasible_along(const Subproblem& sp, const cvec& dir) {
  Primal out;
  const double norm = dir.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) return out;
  const cvec u = dir / norm;
  double p = sp.budget;
  for (std::size_t c = 0; c < sp.cross.size(); ++c) {
    const double q = std::norm(sp.cross[c].dot(u));
    if (q > 0.0) p = std::min(p, sp.caps[c] / q);
  }
  out.w = u * std::sqrt(p);
  out.value = std::log2(1.0 + p * std::norm(sp.own.dot(u)) / sp.noise);
  return out;
}

// A pinned constraint (Gamma_kj = 0) has no finite multiplier when relaxing
// it would let the beamformer tilt towards h_kk: C_k then grows like
// sqrt(Gamma_kj) and the derivative is infinite. When the reduced optimum
// already satisfies stationarity along h_kj the constraint does not bind and
// its multiplier is zero.
double pinned_multiplier(std::size_t k, std::size_t j, const Subproblem& sp,
                         const Eigen::VectorXd& lambda, const cvec& w,
                         const NetworkInstance& net) {
  const cvec& own = net.channel(k, k);
  if (w.squaredNorm() == 0.0) return own.squaredNorm() > 0.0 ? kInf : 0.0;
  const std::complex<double> signal = own.dot(w);
  const double kappa = 1.0 / (kLn2 * (sp.noise + std::norm(signal)));
  const double lambda_p = std::max(0.0, lambda(sp.dual_dim() - 1));
  cvec residual = own * (kappa * signal) - lambda_p * w;
  for (std::size_t c = 0; c < sp.cross.size(); ++c) {
    const cvec& h = net.channel(k, sp.cross_cell[c]);
    residual -= std::max(0.0, lambda(static_cast<Eigen::Index>(c))) * h * h.dot(w);
  }
  const cvec& h = net.channel(k, j);
  const double scale =
      h.norm() * (kappa * own.norm() * std::abs(signal) + lambda_p * w.norm());
  return std::abs(h.dot(residual)) <= 1e-6 * scale ? 0.0 : kInf;
}

DualVariables lift_duals(const Subproblem& sp, const Eigen::VectorXd& lambda,
                         const cvec& w, const NetworkInstance& net) {
  DualVariables d;
  d.values.assign(sp.cells, 0.0);
  for (std::size_t c = 0; c < sp.cross.size(); ++c)
    d.values[sp.cross_cell[c]] =
        std::max(0.0, lambda(static_cast<Eigen::Index>(c)));
  for (std::size_t j : sp.pinned_cell)
    d.values[j] = pinned_multiplier(sp.cell, j, sp, lambda, w, net);
  d.values[sp.cell] = std::max(0.0, lambda(sp.dual_dim() - 1));
  return d;
}

double constraint_violation(std::size_t k, const cvec& w, const ItView& gamma,
                            const NetworkInstance& net) {
  const double pk = net.power(k);
  double worst = std::max(0.0, w.squaredNorm() - pk) / pk;
  for (std::size_t j = 0; j < net.cells(); ++j) {
    if (j == k) continue;
    const cvec& h = net.channel(k, j);
    const double level = std::norm(h.dot(w));
    const double scale =
        std::max(gamma.outgoing[j], 1e-9 * pk * h.squaredNorm());
    if (scale > 0.0)
      worst = std::max(worst, std::max(0.0, level - gamma.outgoing[j]) / scale);
  }
  return worst;
}

bool detect_near_degenerate(std::size_t k, const DualVariables& d,
                            const NetworkInstance& net) {
  double top = 0.0;
  for (std::size_t j = 0; j < net.cells(); ++j)
    if (j != k && std::isfinite(d.values[j])) top = std::max(top, d.values[j]);
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < net.cells(); ++j)
    if (j != k && (std::isinf(d.values[j]) || d.values[j] > 1e-8 * top) &&
        d.values[j] > 0.0)
      active.push_back(j);
  for (std::size_t a = 0; a < active.size(); ++a)
    for (std::size_t b = a + 1; b < active.size(); ++b) {
      const cvec& x = net.channel(k, active[a]);
      const cvec& y = net.channel(k, active[b]);
      const double denom = x.norm() * y.norm();
      if (denom > 0.0 && std::abs(x.dot(y)) / denom > 0.999) return true;
    }
  return false;
}

}  // namespace

ItVector::ItVector(std::size_t cells)
    : cells_(cells), values_(cells * cells, 0.0) {}

double ItVector::operator()(std::size_t from, std::size_t to) const {
  if (from >= cells_ || to >= cells_ || from == to)
    throw std::invalid_argument("IT index out of range");
  return values_[from * cells_ + to];
}

void ItVector::set(std::size_t from, std::size_t to, double value) {
  if (from >= cells_ || to >= cells_ || from == to)
    throw std::invalid_argument("IT index out of range");
  if (!(value >= 0.0) || !std::isfinite(value))
    throw std::invalid_argument("IT levels must be finite and non-negative");
  values_[from * cells_ + to] = value;
}

ItView ItView::of(const ItVector& gamma, std::size_t k) {
  if (k >= gamma.cells()) throw std::invalid_argument("cell index out of range");
  ItView v;
  v.cell = k;
  v.outgoing.assign(gamma.cells(), 0.0);
  v.incoming.assign(gamma.cells(), 0.0);
  for (std::size_t j = 0; j < gamma.cells(); ++j) {
    if (j == k) continue;
    v.outgoing[j] = gamma(k, j);
    v.incoming[j] = gamma(j, k);
  }
  return v;
}

double ItView::incoming_sum() const {
  double s = 0.0;
  for (std::size_t j = 0; j < incoming.size(); ++j)
    if (j != cell) s += incoming[j];
  return s;
}

InnerSolution inner_dual_solution(std::size_t k, const DualVariables& duals,
                                  const ItView& gamma,
                                  const NetworkInstance& net) {
  check_view(k, gamma, net);
  const Subproblem sp = make_subproblem(k, gamma, net, pinned_by_duals(k, duals, net));
  const InnerEval ev = evaluate_inner(sp, multipliers_of(sp, duals));

  InnerSolution out;
  out.unbounded = ev.unbounded;
  if (ev.unbounded) {
    out.certificate = sp.lift(ev.certificate);
    out.dual_value = kInf;
    out.lagrangian_max = kInf;
    return out;
  }
  const Eigen::Index r = sp.own.size();
  out.gain = ev.gain;
  out.water_level = ev.theta;
  out.direction = ev.gain > 0.0 ? cvec(ev.half / std::sqrt(ev.gain)) : cvec::Zero(r);
  out.transformed_covariance = ev.theta * out.direction * out.direction.adjoint();
  out.direction = sp.lift(out.direction);
  out.beamformer = sp.lift(ev.w);
  out.lagrangian_max = ev.lagrangian;
  out.dual_value = ev.g;
  return out;
}

std::vector<double> dual_subgradient(std::size_t k, const DualVariables& duals,
                                     const InnerSolution& inner,
                                     const ItView& gamma,
                                     const NetworkInstance& net) {
  check_view(k, gamma, net);
  if (inner.unbounded)
    throw std::invalid_argument(
        "g is unbounded at these multipliers; no subgradient exists");
  if (inner.beamformer.size() != net.antennas(k))
    throw std::invalid_argument("inner solution does not match M_k");
  (void)duals;
  std::vector<double> s(net.cells(), 0.0);
  for (std::size_t j = 0; j < net.cells(); ++j) {
    if (j == k) continue;
    s[j] = gamma.outgoing[j] - std::norm(net.channel(k, j).dot(inner.beamformer));
  }
  s[k] = net.power(k) - inner.beamformer.squaredNorm();
  return s;
}

CrSolution solve_cr(std::size_t k, const ItView& gamma,
                    const NetworkInstance& net, const SolverOptions& options) {
  check_view(k, gamma, net);
  if (!(options.gap_tol > 0.0))
    throw std::invalid_argument("solver tolerance must be positive");

  const Subproblem sp = make_subproblem(k, gamma, net, pinned_by_level(k, gamma, net));
  const Eigen::Index n = sp.dual_dim();
  const double sigma2 = net.noise(k);

  Primal best = feasible_along(sp, sp.own);
  if (best.w.size() == 0) best.w = cvec::Zero(sp.own.size());
  double best_dual = kInf;
  Eigen::VectorXd best_lambda = Eigen::VectorXd::Constant(n, 1.0 / (kLn2 * sigma2));

  const Eigen::VectorXd start = best_lambda;
  double radius =
      100.0 * std::max(1.0, sp.own.squaredNorm() / (kLn2 * sigma2));

  int iterations = 0;
  int restarts = 0;
  bool width_ok = false;

  for (;; ++restarts) {
    Ellipsoid ell(start, radius);
    width_ok = false;
    for (int it = 0; it < options.max_iters; ++it) {
      const Eigen::VectorXd x = ell.center();
      Eigen::Index worst;
      const double lowest = x.minCoeff(&worst);
      if (lowest < 0.0) {
        // Keep lambda_worst >= 0.
        if (!ell.cut(-Eigen::VectorXd::Unit(n, worst), -lowest)) break;
        continue;
      }

      ++iterations;
      const InnerEval ev = evaluate_inner(sp, x);
      Primal candidate = feasible_along(sp, ev.search);
      if (candidate.w.size() > 0 && candidate.value > best.value) best = candidate;

      if (ev.unbounded) {
        // B is singular along a direction h_kk sees; raising the power
        // multiplier restores full rank.
        if (!ell.cut(-Eigen::VectorXd::Unit(n, n - 1), 0.0)) break;
        continue;
      }

      if (ev.g < best_dual) {
        best_dual = ev.g;
        best_lambda = x;
      }
      const double gap = best_dual - best.value;
      const double scale = 1.0 + best_lambda.cwiseAbs().maxCoeff();
      if (gap <= options.gap_tol && ell.width() <= options.width_tol * scale) {
        width_ok = true;
        break;
      }
      if (!ell.cut(subgradient(sp, ev.w), ev.g - best_dual)) {
        // Nothing left that can improve on best_dual.
        width_ok = true;
        break;
      }
    }

    const bool on_edge = (best_lambda - start).norm() >= 0.99 * radius;
    if (on_edge && restarts < options.max_restarts) {
      radius *= 2.0;
      continue;
    }
    break;
  }

  CrSolution sol;
  sol.cell = k;
  sol.beamformer = sp.lift(best.w);
  sol.value = best.value;
  sol.duals = lift_duals(sp, best_lambda, sol.beamformer, net);
  sol.diagnostics.duality_gap = best_dual - best.value;
  sol.diagnostics.iterations = iterations;
  sol.diagnostics.restarts = restarts;
  sol.diagnostics.width_converged = width_ok;
  sol.diagnostics.max_constraint_violation =
      constraint_violation(k, sol.beamformer, gamma, net);
  sol.diagnostics.near_degenerate = detect_near_degenerate(k, sol.duals, net);

  // With no room left to transmit (own channel annihilated by pinned
  // constraints) the optimum is w = 0, certified without any multipliers.
  if (sp.own.squaredNorm() == 0.0) {
    sol.beamformer.setZero();
    sol.value = 0.0;
    sol.diagnostics.duality_gap = 0.0;
    return sol;
  }
  if (!(sol.diagnostics.duality_gap <= options.gap_tol))
    throw SolverError("ellipsoid method did not reach the duality-gap "
                      "tolerance for cell " + std::to_string(k) +
                      " (gap " + std::to_string(sol.diagnostics.duality_gap) + ")",
                      sol);
  return sol;
}

DualBeamformer beamformer_from_duals(std::size_t k, const DualVariables& duals,
                                     const ItView& gamma,
                                     const NetworkInstance& net) {
  check_view(k, gamma, net);
  const Subproblem sp = make_subproblem(k, gamma, net, pinned_by_duals(k, duals, net));
  const InnerEval ev = evaluate_inner(sp, multipliers_of(sp, duals));
  if (sp.own.size() > 0 &&
      (ev.unbounded || ev.min_eig <= kRankTol * std::max(ev.max_eig, 0.0)))
    throw DegenerateChannel("B_k(lambda) is rank-deficient; no closed-form "
                            "beamformer for these multipliers");
  DualBeamformer out;
  out.power_factor = ev.gain > 0.0 ? ev.theta / ev.gain : 0.0;
  out.beamformer = sp.lift(ev.w);
  return out;
}

double rate_derivative_incoming(std::size_t k, const CrSolution& solution,
                                const ItView& gamma,
                                const NetworkInstance& net) {
  check_view(k, gamma, net);
  const double signal = std::norm(net.channel(k, k).dot(solution.beamformer));
  const double floor = net.noise(k) + gamma.incoming_sum();
  return -signal / (kLn2 * floor * (floor + signal));
}

double rate_derivative_outgoing(std::size_t k, std::size_t j,
                                const CrSolution& solution) {
  if (j == k) throw std::invalid_argument("outgoing derivative needs j != k");
  return solution.duals.cross(j);
}

}  // namespace itbeam
