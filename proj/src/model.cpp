#include "itbeam/model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <utility>

namespace itbeam {

namespace {

void check_cell(std::size_t k, const NetworkInstance& net) {
  if (k >= net.cells())
    throw std::invalid_argument("cell index " + std::to_string(k) +
                                " out of range");
}

void check_state(const TransmitState& state, const NetworkInstance& net) {
  if (state.cells() != net.cells())
    throw std::invalid_argument("transmit state has " +
                                std::to_string(state.cells()) +
                                " cells, network has " +
                                std::to_string(net.cells()));
  for (std::size_t k = 0; k < net.cells(); ++k) {
    const cmat& s = state.covariance(k);
    if (s.rows() != net.antennas(k) || s.cols() != net.antennas(k))
      throw std::invalid_argument("covariance of cell " + std::to_string(k) +
                                  " does not match M_k");
  }
}

}  // namespace

NetworkInstance::NetworkInstance(std::vector<int> antennas,
                                 std::vector<double> power,
                                 std::vector<double> noise,
                                 std::vector<cvec> channels)
    : antennas_(std::move(antennas)),
      power_(std::move(power)),
      noise_(std::move(noise)),
      channels_(std::move(channels)) {
  const std::size_t k_cells = antennas_.size();
  if (k_cells == 0) throw std::invalid_argument("network needs at least one cell");
  if (power_.size() != k_cells || noise_.size() != k_cells)
    throw std::invalid_argument("power/noise lists must have K entries");
  if (channels_.size() != k_cells * k_cells)
    throw std::invalid_argument("expected K^2 channel vectors");
  for (std::size_t k = 0; k < k_cells; ++k) {
    if (antennas_[k] <= 0)
      throw std::invalid_argument("antenna counts must be positive");
    if (!(power_[k] > 0.0) || !std::isfinite(power_[k]))
      throw std::invalid_argument("power budgets must be positive");
    if (!(noise_[k] > 0.0) || !std::isfinite(noise_[k]))
      throw std::invalid_argument("noise powers must be positive");
  }
  for (std::size_t j = 0; j < k_cells; ++j)
    for (std::size_t k = 0; k < k_cells; ++k) {
      const cvec& h = channels_[j * k_cells + k];
      if (h.size() != antennas_[j])
        throw std::invalid_argument("channel (" + std::to_string(j) + "," +
                                    std::to_string(k) +
                                    ") must have length M_" +
                                    std::to_string(j));
      if (!h.allFinite())
        throw std::invalid_argument("channel entries must be finite");
    }
}

const cvec& NetworkInstance::channel(std::size_t from, std::size_t to) const {
  if (from >= cells() || to >= cells())
    throw std::invalid_argument("channel index out of range");
  return channels_[from * cells() + to];
}

TransmitState TransmitState::from_beamformers(std::vector<cvec> beamformers) {
  TransmitState s;
  s.covariances_.reserve(beamformers.size());
  for (const cvec& w : beamformers) s.covariances_.push_back(w * w.adjoint());
  s.beamformers_ = std::move(beamformers);
  return s;
}

TransmitState TransmitState::from_covariances(std::vector<cmat> covariances) {
  TransmitState s;
  s.covariances_ = std::move(covariances);
  return s;
}

void TransmitState::validate(const NetworkInstance& net) const {
  check_state(*this, net);
  for (std::size_t k = 0; k < cells(); ++k) {
    const cmat& s = covariances_[k];
    const double tr = s.trace().real();
    const double herm_err = (s - s.adjoint()).cwiseAbs().maxCoeff();
    if (herm_err > 1e-12 * std::max(1.0, tr))
      throw std::invalid_argument("covariance " + std::to_string(k) +
                                  " is not Hermitian");
    Eigen::SelfAdjointEigenSolver<cmat> eig(s, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -kPsdTolerance * std::max(tr, 1e-300))
      throw std::invalid_argument("covariance " + std::to_string(k) +
                                  " is not positive semidefinite");
    if (tr > net.power(k) * (1.0 + kFeasTolerance))
      throw std::invalid_argument("covariance " + std::to_string(k) +
                                  " exceeds the power budget");
  }
}

double quadratic_form(const cvec& x, const cmat& a) {
  return (x.adjoint() * a * x)(0, 0).real();
}

double sinr(std::size_t k, const TransmitState& state,
            const NetworkInstance& net) {
  check_cell(k, net);
  check_state(state, net);
  const double signal = quadratic_form(net.channel(k, k), state.covariance(k));
  double denom = net.noise(k);
  for (std::size_t j = 0; j < net.cells(); ++j)
    if (j != k) denom += quadratic_form(net.channel(j, k), state.covariance(j));
  return std::max(signal, 0.0) / denom;
}

double achievable_rate(std::size_t k, const TransmitState& state,
                       const NetworkInstance& net) {
  return std::log2(1.0 + sinr(k, state, net));
}

RateTuple achievable_rates(const TransmitState& state,
                           const NetworkInstance& net) {
  RateTuple r;
  r.values.reserve(net.cells());
  for (std::size_t k = 0; k < net.cells(); ++k)
    r.values.push_back(achievable_rate(k, state, net));
  return r;
}

double interference_level(std::size_t from, std::size_t to, const cmat& cov,
                          const NetworkInstance& net) {
  check_cell(from, net);
  check_cell(to, net);
  if (from == to)
    throw std::invalid_argument("interference_level needs distinct cells");
  if (cov.rows() != net.antennas(from) || cov.cols() != net.antennas(from))
    throw std::invalid_argument("covariance does not match M_from");
  return std::max(quadratic_form(net.channel(from, to), cov), 0.0);
}

cvec mrt_beamformer(std::size_t k, const NetworkInstance& net) {
  check_cell(k, net);
  const cvec& h = net.channel(k, k);
  const double norm = h.norm();
  if (norm == 0.0)
    throw DegenerateChannel("direct channel of cell " + std::to_string(k) +
                            " is zero");
  return h * (std::sqrt(net.power(k)) / norm);
}

cvec zf_beamformer(std::size_t k, const NetworkInstance& net) {
  check_cell(k, net);
  const cvec& h = net.channel(k, k);
  const double h_norm = h.norm();
  if (h_norm == 0.0)
    throw DegenerateChannel("direct channel of cell " + std::to_string(k) +
                            " is zero");

  // Modified Gram-Schmidt over the cross channels.
  std::vector<cvec> basis;
  for (std::size_t j = 0; j < net.cells(); ++j) {
    if (j == k) continue;
    cvec q = net.channel(k, j);
    const double ref = q.norm();
    for (const cvec& b : basis) q -= b * b.dot(q);
    if (q.norm() > 1e-12 * std::max(ref, 1e-300)) basis.push_back(q / q.norm());
  }
  if (static_cast<int>(basis.size()) >= net.antennas(k))
    throw Infeasible("cross channels of cell " + std::to_string(k) +
                     " span the transmit space; no zero-forcing direction");

  cvec r = h;
  for (const cvec& b : basis) r -= b * b.dot(r);
  const double r_norm = r.norm();
  if (r_norm <= 1e-12 * h_norm)
    throw DegenerateChannel("direct channel of cell " + std::to_string(k) +
                            " lies in the cross-channel span");
  return r * (std::sqrt(net.power(k)) / r_norm);
}

TransmitState mrt_state(const NetworkInstance& net) {
  std::vector<cvec> ws;
  for (std::size_t k = 0; k < net.cells(); ++k)
    ws.push_back(mrt_beamformer(k, net));
  return TransmitState::from_beamformers(std::move(ws));
}

TransmitState zf_state(const NetworkInstance& net) {
  std::vector<cvec> ws;
  for (std::size_t k = 0; k < net.cells(); ++k)
    ws.push_back(zf_beamformer(k, net));
  return TransmitState::from_beamformers(std::move(ws));
}

double mrt_it_bound(std::size_t i, std::size_t j, const NetworkInstance& net) {
  check_cell(i, net);
  check_cell(j, net);
  if (i == j) throw std::invalid_argument("mrt_it_bound needs distinct cells");
  const cvec& h_ii = net.channel(i, i);
  const double n2 = h_ii.squaredNorm();
  if (n2 == 0.0)
    throw DegenerateChannel("direct channel of cell " + std::to_string(i) +
                            " is zero");
  return std::norm(net.channel(i, j).dot(h_ii)) * net.power(i) / n2;
}

double interference_free_rate(std::size_t k, const NetworkInstance& net) {
  check_cell(k, net);
  return std::log2(1.0 + net.power(k) * net.channel(k, k).squaredNorm() /
                             net.noise(k));
}

bool pareto_dominates(const RateTuple& a, const RateTuple& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("rate tuples have different lengths");
  bool strictly = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] < b[k]) return false;
    if (a[k] > b[k]) strictly = true;
  }
  return strictly;
}

}  // namespace itbeam
