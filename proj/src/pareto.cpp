#include "itbeam/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace itbeam {

namespace {

constexpr double kInfiniteStandIn = 1e6;

}  // namespace

SensitivityMatrix SensitivityMatrix::finite() const {
  double top = 0.0;
  for (double v : {a, b, c, d})
    if (std::isfinite(v)) top = std::max(top, std::abs(v));
  const double big = kInfiniteStandIn * (top > 0.0 ? top : 1.0);
  auto clip = [big](double v) {
    if (std::isinf(v)) return v > 0 ? big : -big;
    return v;
  };
  SensitivityMatrix out = *this;
  out.a = clip(a);
  out.b = clip(b);
  out.c = clip(c);
  out.d = clip(d);
  return out;
}

double SensitivityMatrix::determinant() const { return a * d - b * c; }

double normalized_det_residual(const SensitivityMatrix& m) {
  const SensitivityMatrix f = m.finite();
  const double ad = f.a * f.d;
  const double bc = f.b * f.c;
  return std::abs(ad - bc) / std::max({std::abs(ad), std::abs(bc), 1e-12});
}

ItVector extract_it(const TransmitState& state, const NetworkInstance& net) {
  if (state.cells() != net.cells())
    throw std::invalid_argument("transmit state does not match the network");
  ItVector gamma(net.cells());
  for (std::size_t k = 0; k < net.cells(); ++k)
    for (std::size_t j = 0; j < net.cells(); ++j)
      if (j != k) gamma.set(k, j, interference_level(k, j, state.covariance(k), net));
  return gamma;
}

ConsistencyReport verify_rate_consistency(const TransmitState& state, const NetworkInstance& net,
                           double tol, const SolverOptions& options) {
  state.validate(net);
  const ItVector gamma = extract_it(state, net);
  const RateTuple rates = achievable_rates(state, net);
  ConsistencyReport report;
  report.consistent = true;
  for (std::size_t k = 0; k < net.cells(); ++k) {
    CrSolution sol = solve_cr(k, ItView::of(gamma, k), net, options);
    const double gap = sol.value - rates[k];
    report.gaps.push_back(gap);
    report.solutions.push_back(std::move(sol));
    if (!(std::abs(gap) <= tol)) report.consistent = false;
  }
  return report;
}

SensitivityMatrix sensitivity_from_solutions(std::size_t i, std::size_t j,
                                             const CrSolution& sol_i,
                                             const CrSolution& sol_j,
                                             const ItVector& gamma,
                                             const NetworkInstance& net) {
  if (i == j) throw std::invalid_argument("sensitivity needs two distinct cells");
  SensitivityMatrix m;
  m.i = i;
  m.j = j;
  m.a = rate_derivative_outgoing(i, j, sol_i);
  m.b = rate_derivative_incoming(i, sol_i, ItView::of(gamma, i), net);
  m.c = rate_derivative_incoming(j, sol_j, ItView::of(gamma, j), net);
  m.d = rate_derivative_outgoing(j, i, sol_j);
  return m;
}

SensitivityMatrix sensitivity_pair(std::size_t i, std::size_t j,
                                   const ItVector& gamma,
                                   const NetworkInstance& net,
                                   const SolverOptions& options) {
  if (i == j) throw std::invalid_argument("sensitivity needs two distinct cells");
  const CrSolution sol_i = solve_cr(i, ItView::of(gamma, i), net, options);
  const CrSolution sol_j = solve_cr(j, ItView::of(gamma, j), net, options);
  return sensitivity_from_solutions(i, j, sol_i, sol_j, gamma, net);
}

std::map<std::pair<std::size_t, std::size_t>, double>
necessary_condition_residuals(const ItVector& gamma, const NetworkInstance& net,
                              const SolverOptions& options) {
  std::vector<CrSolution> sols;
  for (std::size_t k = 0; k < net.cells(); ++k)
    sols.push_back(solve_cr(k, ItView::of(gamma, k), net, options));
  std::map<std::pair<std::size_t, std::size_t>, double> out;
  for (std::size_t i = 0; i < net.cells(); ++i)
    for (std::size_t j = i + 1; j < net.cells(); ++j)
      out[{i, j}] = normalized_det_residual(
          sensitivity_from_solutions(i, j, sols[i], sols[j], gamma, net));
  return out;
}

std::vector<std::size_t> pareto_front_indices(const std::vector<RateTuple>& points) {
  const std::size_t n = points.size();
  std::vector<std::size_t> keep;
  if (n == 0) return keep;
  const std::size_t dim = points.front().size();
  for (const RateTuple& p : points)
    if (p.size() != dim)
      throw std::invalid_argument("rate tuples have different lengths");

  if (dim == 2) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      if (points[x][0] != points[y][0]) return points[x][0] > points[y][0];
      return points[x][1] > points[y][1];
    });
    double best_second = -std::numeric_limits<double>::infinity();
    for (std::size_t idx : order) {
      if (points[idx][1] > best_second) {
        keep.push_back(idx);
        best_second = points[idx][1];
      }
    }
    std::sort(keep.begin(), keep.end());
    return keep;
  }

  for (std::size_t x = 0; x < n; ++x) {
    bool dropped = false;
    for (std::size_t y = 0; y < n && !dropped; ++y) {
      if (x == y) continue;
      if (pareto_dominates(points[y], points[x])) dropped = true;
      else if (y < x && points[y] == points[x]) dropped = true;
    }
    if (!dropped) keep.push_back(x);
  }
  return keep;
}

std::vector<RateTuple> pareto_filter(const std::vector<RateTuple>& points) {
  std::vector<RateTuple> out;
  for (std::size_t idx : pareto_front_indices(points)) out.push_back(points[idx]);
  return out;
}

std::vector<RateTuple> BoundarySweep::front_rates() const {
  std::vector<RateTuple> out;
  for (std::size_t idx : front) out.push_back(points[idx].guaranteed);
  return out;
}

BoundarySweep sweep_boundary_2user(const NetworkInstance& net, std::size_t grid,
                                   const SolverOptions& options) {
  if (net.cells() != 2)
    throw std::invalid_argument("the boundary sweep needs exactly two cells");
  if (grid < 2) throw std::invalid_argument("sweep grid needs at least 2 points");

  BoundarySweep sweep;
  sweep.grid = grid;
  sweep.bound_12 = mrt_it_bound(0, 1, net);
  sweep.bound_21 = mrt_it_bound(1, 0, net);
  sweep.points.reserve(grid * grid);

  const double last = static_cast<double>(grid - 1);
  for (std::size_t r = 0; r < grid; ++r) {
    for (std::size_t c = 0; c < grid; ++c) {
      SweepPoint pt;
      pt.row = r;
      pt.col = c;
      // Pin the far edge to the exact bound rather than a rounded product.
      pt.gamma_12 = r + 1 == grid ? sweep.bound_12 : sweep.bound_12 * (r / last);
      pt.gamma_21 = c + 1 == grid ? sweep.bound_21 : sweep.bound_21 * (c / last);
      ItVector gamma(2);
      gamma.set(0, 1, pt.gamma_12);
      gamma.set(1, 0, pt.gamma_21);
      try {
        CrSolution s1 = solve_cr(0, ItView::of(gamma, 0), net, options);
        CrSolution s2 = solve_cr(1, ItView::of(gamma, 1), net, options);
        pt.guaranteed.values = {s1.value, s2.value};
        const TransmitState st = TransmitState::from_beamformers({s1.beamformer, s2.beamformer});
        pt.actual = achievable_rates(st, net);
        pt.det_residual = normalized_det_residual(
            sensitivity_from_solutions(0, 1, s1, s2, gamma, net));
        const double t12 = std::abs(interference_level(0, 1, s1.covariance(), net) - pt.gamma_12) /
                           std::max(pt.gamma_12, 1.0);
        const double t21 = std::abs(interference_level(1, 0, s2.covariance(), net) - pt.gamma_21) /
                           std::max(pt.gamma_21, 1.0);
        pt.tightness = std::max(t12, t21);
        pt.cell_1 = std::move(s1);
        pt.cell_2 = std::move(s2);
        pt.solved = true;
      } catch (const SolverError& e) {
        pt.error = e.what();
      }
      sweep.points.push_back(std::move(pt));
    }
  }

  std::vector<std::size_t> solved;
  std::vector<RateTuple> rates;
  for (std::size_t idx = 0; idx < sweep.points.size(); ++idx)
    if (sweep.points[idx].solved) {
      solved.push_back(idx);
      rates.push_back(sweep.points[idx].guaranteed);
    }
  for (std::size_t f : pareto_front_indices(rates)) {
    sweep.front.push_back(solved[f]);
    sweep.points[solved[f]].on_front = true;
  }
  return sweep;
}

double dominance_deficiency(const RateTuple& point,
                            const std::vector<RateTuple>& front) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const RateTuple& f : front) {
    if (f.size() != point.size())
      throw std::invalid_argument("rate tuples have different lengths");
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < f.size(); ++k) margin = std::min(margin, f[k] - point[k]);
    worst = std::max(worst, margin);
  }
  return worst;
}

}  // namespace itbeam
