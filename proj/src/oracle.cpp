#include "itbeam/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <random>
#include <stdexcept>

namespace itbeam::oracle {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct DirectionPair {
  cvec first;   // u_zf, or e1 = h_kk / |h_kk|
  cvec second;  // u_mrt, or e2
  bool zf = true;
};

DirectionPair directions_for(std::size_t k, const NetworkInstance& net) {
  DirectionPair dp;
  try {
    cvec zf = zf_beamformer(k, net);
    cvec mrt = mrt_beamformer(k, net);
    dp.first = zf / zf.norm();
    dp.second = mrt / mrt.norm();
    return dp;
  } catch (const Infeasible&) {
  } catch (const DegenerateChannel&) {
  }
  dp.zf = false;
  const cvec& h = net.channel(k, k);
  const Eigen::Index m = h.size();
  dp.first = h.norm() > 0.0 ? cvec(h / h.norm()) : cvec(cvec::Unit(m, 0));
  dp.second = cvec::Zero(m);
  if (m == 1) return dp;
  for (std::size_t j = 0; j < net.cells(); ++j) {
    if (j == k) continue;
    cvec v = net.channel(k, j);
    v -= dp.first * dp.first.dot(v);
    if (v.norm() > 1e-12) {
      dp.second = v / v.norm();
      return dp;
    }
  }
  cvec v = cvec::Unit(m, dp.first.cwiseAbs().minCoeff() == std::abs(dp.first(0)) ? 0 : 1);
  v -= dp.first * dp.first.dot(v);
  dp.second = v / v.norm();
  return dp;
}

cvec unit_direction(const DirectionPair& dp, const BeamParams& p) {
  const std::complex<double> phase = std::polar(1.0, p.phi);
  if (dp.zf) {
    cvec u = (1.0 - p.t) * dp.first + p.t * phase * dp.second;
    const double norm = u.norm();
    if (norm < 1e-12) return dp.second;  // ZF == MRT with opposite phase
    return u / norm;
  }
  if (dp.first.size() == 1) return dp.first;
  const double theta = p.t * kPi / 2.0;
  return std::cos(theta) * dp.first + std::sin(theta) * phase * dp.second;
}

// Unit vector in C^M from hyperspherical angles: 2 angles for M = 2,
// 4 angles for M = 3 (magnitude angles first, then phases).
cvec sphere_point(Eigen::Index m, const double* ang) {
  cvec u(m);
  if (m == 1) {
    u(0) = 1.0;
  } else if (m == 2) {
    u(0) = std::cos(ang[0]);
    u(1) = std::polar(std::sin(ang[0]), ang[1]);
  } else {
    u(0) = std::cos(ang[0]);
    u(1) = std::polar(std::sin(ang[0]) * std::cos(ang[1]), ang[2]);
    u(2) = std::polar(std::sin(ang[0]) * std::sin(ang[1]), ang[3]);
  }
  return u;
}

struct CrObjective {
  cvec own;
  std::vector<cvec> cross;
  std::vector<double> caps;
  double budget;

  // Received signal power at the largest feasible transmit power. Leakage
  // at rounding level (cos(pi/2) is not 0) counts as none.
  double operator()(const cvec& u) const {
    double p = budget;
    for (std::size_t c = 0; c < cross.size(); ++c) {
      const double q = std::norm(cross[c].dot(u));
      if (q > 1e-24 * cross[c].squaredNorm()) p = std::min(p, caps[c] / q);
    }
    return p * std::norm(own.dot(u));
  }
};

struct Seed {
  double value;
  std::vector<double> angles;
  bool operator>(const Seed& o) const { return value > o.value; }
};

}  // namespace

RateTuple RegionCloud::rate(std::size_t point) const {
  RateTuple r;
  r.values.assign(rates.begin() + static_cast<std::ptrdiff_t>(point * cells),
                  rates.begin() + static_cast<std::ptrdiff_t>((point + 1) * cells));
  return r;
}

std::vector<RateTuple> RegionCloud::tuples() const {
  std::vector<RateTuple> out;
  out.reserve(size());
  for (std::size_t p = 0; p < size(); ++p) out.push_back(rate(p));
  return out;
}

std::vector<cvec> RegionCloud::point_beamformers(std::size_t point,
                                                 const NetworkInstance& net) const {
  std::vector<cvec> out;
  if (!beamformers.empty()) {
    for (std::size_t k = 0; k < cells; ++k) out.push_back(beamformers[point * cells + k]);
    return out;
  }
  for (std::size_t k = 0; k < cells; ++k)
    out.push_back(parametrized_beamformer(k, params[point * cells + k], net));
  return out;
}

cvec parametrized_beamformer(std::size_t k, const BeamParams& p,
                             const NetworkInstance& net) {
  return unit_direction(directions_for(k, net), p) * std::sqrt(p.rho * net.power(k));
}

RegionCloud oracle_region_2user(const NetworkInstance& net, const RegionGrid& grid) {
  if (net.cells() != 2) throw std::invalid_argument("region grid needs two cells");
  if (grid.n_t == 0 || grid.n_phi == 0 || grid.n_rho == 0)
    throw std::invalid_argument("region grid sizes must be positive");

  struct Candidate {
    BeamParams params;
    double signal;
    double leak;  // interference at the other MS
  };
  std::vector<Candidate> cand[2];
  for (std::size_t k = 0; k < 2; ++k) {
    const DirectionPair dp = directions_for(k, net);
    const cvec& own = net.channel(k, k);
    const cvec& cross = net.channel(k, 1 - k);
    for (std::size_t ti = 0; ti < grid.n_t; ++ti) {
      const double t = grid.n_t == 1 ? 0.0 : static_cast<double>(ti) / (grid.n_t - 1);
      for (std::size_t pi = 0; pi < grid.n_phi; ++pi) {
        const double phi = 2.0 * kPi * static_cast<double>(pi) / grid.n_phi;
        const cvec u = unit_direction(dp, {t, phi, 1.0});
        const double s = std::norm(own.dot(u)) * net.power(k);
        const double l = std::norm(cross.dot(u)) * net.power(k);
        for (std::size_t ri = 0; ri < grid.n_rho; ++ri) {
          const double rho = static_cast<double>(ri + 1) / grid.n_rho;
          cand[k].push_back({{t, phi, rho}, rho * s, rho * l});
        }
      }
    }
  }

  RegionCloud cloud;
  cloud.cells = 2;
  const std::size_t total = cand[0].size() * cand[1].size();
  cloud.rates.reserve(2 * total);
  cloud.params.reserve(2 * total);
  for (const Candidate& c1 : cand[0])
    for (const Candidate& c2 : cand[1]) {
      cloud.rates.push_back(std::log2(1.0 + c1.signal / (net.noise(0) + c2.leak)));
      cloud.rates.push_back(std::log2(1.0 + c2.signal / (net.noise(1) + c1.leak)));
      cloud.params.push_back(c1.params);
      cloud.params.push_back(c2.params);
    }
  return cloud;
}

std::array<BeamParams, 2> refine_boundary_2user(const NetworkInstance& net,
                                               const std::array<BeamParams, 2>& start,
                                               std::size_t scan) {
  if (net.cells() != 2) throw std::invalid_argument("refinement needs two cells");
  const DirectionPair dp[2] = {directions_for(0, net), directions_for(1, net)};
  auto rates = [&](double t1, double t2) {
    const cvec w1 = unit_direction(dp[0], {t1, start[0].phi, 1.0}) *
                    std::sqrt(start[0].rho * net.power(0));
    const cvec w2 = unit_direction(dp[1], {t2, start[1].phi, 1.0}) *
                    std::sqrt(start[1].rho * net.power(1));
    const double r1 = std::log2(1.0 + std::norm(net.channel(0, 0).dot(w1)) /
                                          (net.noise(0) + std::norm(net.channel(1, 0).dot(w2))));
    const double r2 = std::log2(1.0 + std::norm(net.channel(1, 1).dot(w2)) /
                                          (net.noise(1) + std::norm(net.channel(0, 1).dot(w1))));
    return std::pair{r1, r2};
  };

  const double floor_r1 = rates(start[0].t, start[1].t).first;
  // Leakage into cell 1 grows with t2, so for each t1 the largest t2 that
  // keeps R1 at the floor is found by bisection; R2 is then a 1-D function.
  auto best_t2 = [&](double t1) -> double {
    if (rates(t1, 1.0).first >= floor_r1) return 1.0;
    if (rates(t1, 0.0).first < floor_r1) return -1.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (rates(t1, mid).first >= floor_r1 ? lo : hi) = mid;
    }
    return lo;
  };
  auto r2_at = [&](double t1) {
    const double t2 = best_t2(t1);
    return t2 < 0.0 ? -1.0 : rates(t1, t2).second;
  };

  const std::size_t n = std::max<std::size_t>(scan, 3);
  std::size_t arg = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = r2_at(static_cast<double>(i) / (n - 1));
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  // Golden-section search inside the bracket around the best scan point.
  double lo = static_cast<double>(arg == 0 ? 0 : arg - 1) / (n - 1);
  double hi = static_cast<double>(std::min(arg + 1, n - 1)) / (n - 1);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = r2_at(x1), f2 = r2_at(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = r2_at(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = r2_at(x1);
    }
  }
  double t1 = static_cast<double>(arg) / (n - 1);
  for (double x : {x1, x2})
    if (r2_at(x) > best) {
      best = r2_at(x);
      t1 = x;
    }
  const double t2 = best_t2(t1);
  std::array<BeamParams, 2> out = start;
  out[0].t = t1;
  out[1].t = t2;
  return out;
}

double oracle_cr_max(std::size_t k, const ItView& gamma,
                     const NetworkInstance& net, const CrGrid& grid) {
  if (k >= net.cells() || gamma.cell != k) throw std::invalid_argument("bad cell");
  const Eigen::Index m = net.antennas(k);
  if (m > 3) throw std::invalid_argument("grid oracle supports M_k <= 3");

  CrObjective f;
  f.own = net.channel(k, k);
  f.budget = net.power(k);
  for (std::size_t j = 0; j < net.cells(); ++j) {
    if (j == k) continue;
    f.cross.push_back(net.channel(k, j));
    f.caps.push_back(gamma.outgoing[j]);
  }
  const double floor = net.noise(k) + gamma.incoming_sum();
  auto bits = [floor](double signal) { return std::log2(1.0 + signal / floor); };

  if (m == 1) return bits(f(cvec::Ones(1)));

  const int dims = m == 2 ? 2 : 4;
  const std::size_t n = m == 2 ? grid.n_angle : grid.n_angle_3d;
  if (n < 2) throw std::invalid_argument("angular grid needs at least 2 points");
  // Magnitude angles span [0, pi/2], phases [0, 2 pi).
  std::vector<double> lo(dims, 0.0), step(dims);
  const int magnitudes = dims / 2;
  for (int d = 0; d < dims; ++d)
    step[d] = d < magnitudes ? (kPi / 2.0) / (n - 1) : (2.0 * kPi) / n;

  std::priority_queue<Seed, std::vector<Seed>, std::greater<Seed>> seeds;
  std::vector<std::size_t> idx(dims, 0);
  std::vector<double> ang(dims);
  double best = 0.0;
  for (;;) {
    for (int d = 0; d < dims; ++d) ang[d] = lo[d] + step[d] * idx[d];
    const double v = f(sphere_point(m, ang.data()));
    best = std::max(best, v);
    if (seeds.size() < grid.refine_seeds) {
      seeds.push({v, ang});
    } else if (grid.refine_seeds > 0 && v > seeds.top().value) {
      seeds.pop();
      seeds.push({v, ang});
    }
    int d = 0;
    while (d < dims && ++idx[d] == n) idx[d++] = 0;
    if (d == dims) break;
  }

  constexpr int kSub = 9;
  while (!seeds.empty()) {
    Seed s = seeds.top();
    seeds.pop();
    std::vector<double> half = step;
    std::vector<double> center = s.angles;
    double local = s.value;
    for (std::size_t level = 0; level < grid.refine_levels; ++level) {
      std::vector<int> sub(dims, 0);
      std::vector<double> next = center;
      for (;;) {
        for (int d = 0; d < dims; ++d)
          ang[d] = center[d] + half[d] * (2.0 * sub[d] / (kSub - 1) - 1.0);
        const double v = f(sphere_point(m, ang.data()));
        if (v > local) {
          local = v;
          next = ang;
        }
        int d = 0;
        while (d < dims && ++sub[d] == kSub) sub[d++] = 0;
        if (d == dims) break;
      }
      center = next;
      for (double& h : half) h /= 4.0;
    }
    best = std::max(best, local);
  }
  return bits(best);
}

RegionCloud random_region_sample(const NetworkInstance& net, std::size_t n,
                                 std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  auto uniform = [&engine] { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };
  auto gaussian_pair = [&]() {
    const double r = std::sqrt(-std::log(1.0 - uniform()));
    const double a = 2.0 * kPi * uniform();
    return std::complex<double>(r * std::cos(a), r * std::sin(a));
  };

  RegionCloud cloud;
  cloud.cells = net.cells();
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<cvec> ws;
    for (std::size_t k = 0; k < net.cells(); ++k) {
      cvec u(net.antennas(k));
      for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = gaussian_pair();
      const double rho = 1.0 - uniform();
      ws.push_back(u * (std::sqrt(rho * net.power(k)) / u.norm()));
    }
    const RateTuple r = achievable_rates(TransmitState::from_beamformers(ws), net);
    for (std::size_t k = 0; k < net.cells(); ++k) {
      cloud.rates.push_back(r[k]);
      cloud.beamformers.push_back(ws[k]);
    }
  }
  return cloud;
}

}  // namespace itbeam::oracle
