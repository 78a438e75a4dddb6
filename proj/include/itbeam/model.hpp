#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace itbeam {

using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;

/// Raised when a channel direction needed by a closed form vanishes
/// (zero direct link, own channel inside the cross-channel span).
class DegenerateChannel : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a zero-forcing direction cannot exist because the cross
/// channels already span the whole transmit space.
class Infeasible : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// K-cell MISO interference channel. Cells are indexed 0..K-1; the channel
/// from BS j to MS k is `channel(j, k)` and has length M_j.
class NetworkInstance {
 public:
  NetworkInstance(std::vector<int> antennas, std::vector<double> power,
                  std::vector<double> noise, std::vector<cvec> channels);

  std::size_t cells() const { return antennas_.size(); }
  int antennas(std::size_t k) const { return antennas_.at(k); }
  double power(std::size_t k) const { return power_.at(k); }
  double noise(std::size_t k) const { return noise_.at(k); }
  const cvec& channel(std::size_t from, std::size_t to) const;

  const std::vector<int>& antenna_counts() const { return antennas_; }
  const std::vector<double>& powers() const { return power_; }
  const std::vector<double>& noises() const { return noise_; }

 private:
  std::vector<int> antennas_;
  std::vector<double> power_;
  std::vector<double> noise_;
  std::vector<cvec> channels_;  // row-major over (from, to)
};

/// Per-cell transmit covariances, optionally with the rank-one factors
/// they were built from.
class TransmitState {
 public:
  static TransmitState from_beamformers(std::vector<cvec> beamformers);
  static TransmitState from_covariances(std::vector<cmat> covariances);

  std::size_t cells() const { return covariances_.size(); }
  const cmat& covariance(std::size_t k) const { return covariances_.at(k); }
  const std::optional<std::vector<cvec>>& beamformers() const {
    return beamformers_;
  }

  /// Throws std::invalid_argument when dimensions do not match `net`, a
  /// covariance is not Hermitian PSD, or a power budget is exceeded.
  void validate(const NetworkInstance& net) const;

 private:
  std::vector<cmat> covariances_;
  std::optional<std::vector<cvec>> beamformers_;
};

/// Achievable rates in bits per channel use.
struct RateTuple {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t k) const { return values[k]; }
  double& operator[](std::size_t k) { return values[k]; }
  bool operator==(const RateTuple&) const = default;
};

inline constexpr double kPsdTolerance = 1e-9;   // relative to trace(S)
inline constexpr double kFeasTolerance = 1e-7;  // relative to P_k

/// Real part of x^H A x.
double quadratic_form(const cvec& x, const cmat& a);

double sinr(std::size_t k, const TransmitState& state,
            const NetworkInstance& net);
double achievable_rate(std::size_t k, const TransmitState& state,
                       const NetworkInstance& net);
RateTuple achievable_rates(const TransmitState& state,
                           const NetworkInstance& net);

/// h_ij^H S_i h_ij, the interference power BS i causes at MS j.
double interference_level(std::size_t from, std::size_t to, const cmat& cov,
                          const NetworkInstance& net);

cvec mrt_beamformer(std::size_t k, const NetworkInstance& net);
cvec zf_beamformer(std::size_t k, const NetworkInstance& net);
TransmitState mrt_state(const NetworkInstance& net);
TransmitState zf_state(const NetworkInstance& net);

/// Interference BS i causes at MS j when it transmits at full power along
/// its MRT direction. No IT level above this can matter on the boundary.
double mrt_it_bound(std::size_t i, std::size_t j, const NetworkInstance& net);

/// log2(1 + P_k |h_kk|^2 / sigma_k^2): the rate with no interference at all.
double interference_free_rate(std::size_t k, const NetworkInstance& net);

bool pareto_dominates(const RateTuple& a, const RateTuple& b);

}  // namespace itbeam
