#pragma once

#include "itbeam/cr_solver.hpp"
#include "itbeam/model.hpp"
#include "itbeam/scenario.hpp"

#include <cstdint>
#include <vector>

namespace itbeam::test {

inline NetworkInstance seeded(std::uint64_t seed, std::vector<int> antennas,
                              std::vector<double> power, std::vector<double> noise) {
  return generate_network(std::move(antennas), std::move(power), std::move(noise), seed);
}

inline NetworkInstance seeded_2x2(std::uint64_t seed) {
  return seeded(seed, {2, 2}, {1.0, 1.0}, {1.0, 1.0});
}

inline cvec vec(std::initializer_list<std::complex<double>> v) {
  cvec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (auto x : v) out(i++) = x;
  return out;
}

/// Two cells with given channels, unit noise, row-major (from, to).
inline NetworkInstance two_cells(const cvec& h11, const cvec& h12, const cvec& h21,
                                 const cvec& h22, double p1 = 1.0, double p2 = 1.0) {
  return NetworkInstance({static_cast<int>(h11.size()), static_cast<int>(h22.size())},
                         {p1, p2}, {1.0, 1.0}, {h11, h12, h21, h22});
}

/// Levels drawn uniformly in [lo, hi] times the MRT bound of each pair.
inline ItVector random_levels(const NetworkInstance& net, ChannelRng& rng,
                              double lo = 0.0, double hi = 1.0) {
  ItVector g(net.cells());
  for (std::size_t i = 0; i < net.cells(); ++i)
    for (std::size_t j = 0; j < net.cells(); ++j)
      if (i != j) g.set(i, j, (lo + (hi - lo) * rng.uniform()) * mrt_it_bound(i, j, net));
  return g;
}

inline double solve_value(std::size_t k, const ItVector& g, const NetworkInstance& net) {
  return solve_cr(k, ItView::of(g, k), net).value;
}

}  // namespace itbeam::test
