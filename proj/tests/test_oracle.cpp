#include "itbeam/oracle.hpp"
#include "itbeam/pareto.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace itbeam;
using itbeam::test::seeded;
using itbeam::test::seeded_2x2;
using itbeam::test::two_cells;
using itbeam::test::vec;

namespace {

// Equal up to a unit-modulus factor.
bool same_ray(const cvec& a, const cvec& b, double tol) {
  const std::complex<double> ip = b.dot(a);
  return std::abs(std::abs(ip) - a.norm() * b.norm()) <= tol &&
         std::abs(a.norm() - b.norm()) <= tol;
}

}  // namespace

TEST(Parametrization, EndpointsAreZfAndMrt) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const NetworkInstance net = seeded(seed, {2, 3}, {2.0, 0.5}, {1.0, 1.0});
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_TRUE(same_ray(oracle::parametrized_beamformer(k, {1.0, 0.0, 1.0}, net),
                           mrt_beamformer(k, net), 1e-12));
      EXPECT_TRUE(same_ray(oracle::parametrized_beamformer(k, {0.0, 0.0, 1.0}, net),
                           zf_beamformer(k, net), 1e-12));
      const cvec half = oracle::parametrized_beamformer(k, {0.3, 1.0, 0.25}, net);
      EXPECT_NEAR(half.squaredNorm(), 0.25 * net.power(k), 1e-12);
    }
  }
}

TEST(Parametrization, CloudRebuildsItsPoints) {
  const NetworkInstance net = seeded_2x2(3);
  const oracle::RegionCloud cloud = oracle::oracle_region_2user(net, {5, 3, 2});
  ASSERT_EQ(cloud.size(), 30u * 30u);
  ASSERT_EQ(cloud.params.size(), 2 * cloud.size());
  for (std::size_t p = 0; p < cloud.size(); p += 37) {
    const TransmitState st = TransmitState::from_beamformers(cloud.point_beamformers(p, net));
    const RateTuple r = achievable_rates(st, net);
    EXPECT_NEAR(r[0], cloud.rate(p)[0], 1e-12);
    EXPECT_NEAR(r[1], cloud.rate(p)[1], 1e-12);
  }
}

TEST(RegionGrid, RefinementNeverLosesFrontPoints) {
  // linspace(0, 1, 21) contains linspace(0, 1, 11), so the finer front
  // dominates or equals every coarse one.
  const NetworkInstance net = seeded_2x2(6);
  const auto coarse = pareto_filter(oracle::oracle_region_2user(net, {11, 2, 2}).tuples());
  const auto fine = pareto_filter(oracle::oracle_region_2user(net, {21, 2, 2}).tuples());
  for (const RateTuple& c : coarse) {
    bool covered = false;
    for (const RateTuple& f : fine) covered = covered || f == c || pareto_dominates(f, c);
    EXPECT_TRUE(covered);
  }
}

TEST(RegionGrid, RejectsBadInput) {
  const NetworkInstance net = seeded(1, {2, 2, 2}, {1, 1, 1}, {1, 1, 1});
  EXPECT_THROW(oracle::oracle_region_2user(net, {}), std::invalid_argument);
}

TEST(Refinement, LandsOnStationaryPoints) {
  const NetworkInstance net = seeded_2x2(11);
  const oracle::RegionCloud cloud = oracle::oracle_region_2user(net, {41, 1, 1});
  const auto front = pareto_front_indices(cloud.tuples());
  const double b12 = mrt_it_bound(0, 1, net), b21 = mrt_it_bound(1, 0, net);
  int checked = 0;
  for (std::size_t n = 0; n < front.size(); n += 3) {
    const std::size_t idx = front[n];
    const std::array<oracle::BeamParams, 2> start = {cloud.params[2 * idx],
                                                     cloud.params[2 * idx + 1]};
    const auto p = oracle::refine_boundary_2user(net, start);
    const std::vector<cvec> w = {oracle::parametrized_beamformer(0, p[0], net),
                                 oracle::parametrized_beamformer(1, p[1], net)};
    const RateTuple before = cloud.rate(idx);
    const RateTuple after = achievable_rates(TransmitState::from_beamformers(w), net);
    EXPECT_GE(after[0], before[0] - 1e-12);
    EXPECT_GE(after[1], before[1] - 1e-12);
    const ItVector g = extract_it(TransmitState::from_beamformers(w), net);
    if (g(0, 1) < 1e-3 * b12 || g(0, 1) > (1 - 1e-3) * b12) continue;
    if (g(1, 0) < 1e-3 * b21 || g(1, 0) > (1 - 1e-3) * b21) continue;
    EXPECT_LE(necessary_condition_residuals(g, net).at({0, 1}), 5e-3);
    ++checked;
  }
  EXPECT_GT(checked, 3);
}

TEST(CrOracle, OrthogonalChannelsAtZeroLevels) {
  const NetworkInstance net = two_cells(vec({1, 0}), vec({0, 1}), vec({1, 0}), vec({0, 1}));
  EXPECT_NEAR(oracle::oracle_cr_max(0, ItView::of(ItVector(2), 0), net), 1.0, 1e-9);
  EXPECT_NEAR(oracle::oracle_cr_max(1, ItView::of(ItVector(2), 1), net), 1.0, 1e-9);
}

TEST(CrOracle, LargeOutgoingLevelsGiveInterferenceFreeRate) {
  const NetworkInstance net = seeded(2, {3, 2}, {3.0, 1.0}, {0.5, 1.0});
  ItVector g(2);
  g.set(0, 1, 1e9);
  g.set(1, 0, 1e9);
  ItView v = ItView::of(g, 0);
  v.incoming[1] = 0.0;
  EXPECT_NEAR(oracle::oracle_cr_max(0, v, net), interference_free_rate(0, net), 1e-6);
}

TEST(CrOracle, SingleAntennaAndLimits) {
  const NetworkInstance net({1, 1}, {2.0, 1.0}, {1.0, 1.0},
                            {vec({1.0}), vec({0.5}), vec({0.5}), vec({1.0})});
  ItVector g(2);
  g.set(0, 1, 0.125);  // caps power at 0.5
  g.set(1, 0, 0.0);
  EXPECT_NEAR(oracle::oracle_cr_max(0, ItView::of(g, 0), net), std::log2(1.5), 1e-12);
  const NetworkInstance big = seeded(1, {4, 2}, {1.0, 1.0}, {1.0, 1.0});
  EXPECT_THROW(oracle::oracle_cr_max(0, ItView::of(ItVector(2), 0), big), std::invalid_argument);
  EXPECT_THROW(oracle::oracle_cr_max(1, ItView::of(ItVector(2), 0), big), std::invalid_argument);
}

TEST(CrOracle, ThreeAntennas) {
  const NetworkInstance net = seeded(4, {3, 3}, {5.0, 1.0}, {1.0, 1.0});
  ChannelRng rng(2);
  const ItVector g = itbeam::test::random_levels(net, rng, 0.1, 0.9);
  for (std::size_t k = 0; k < 2; ++k) {
    const double grid = oracle::oracle_cr_max(k, ItView::of(g, k), net);
    const double solved = itbeam::test::solve_value(k, g, net);
    EXPECT_LE(grid, solved + 1e-5);
    EXPECT_NEAR(grid, solved, 1e-3);
  }
}

TEST(RandomSample, DeterministicAndPrefixStable) {
  const NetworkInstance net = seeded(5, {2, 3}, {1.0, 2.0}, {1.0, 1.0});
  const oracle::RegionCloud a = oracle::random_region_sample(net, 50, 9);
  const oracle::RegionCloud b = oracle::random_region_sample(net, 50, 9);
  const oracle::RegionCloud c = oracle::random_region_sample(net, 80, 9);
  const oracle::RegionCloud d = oracle::random_region_sample(net, 50, 10);
  EXPECT_EQ(a.rates, b.rates);
  EXPECT_EQ(std::vector<double>(c.rates.begin(), c.rates.begin() + 100), a.rates);
  EXPECT_NE(a.rates, d.rates);
  for (std::size_t s = 0; s < a.size(); ++s)
    for (std::size_t k = 0; k < 2; ++k) {
      const cvec& w = a.beamformers[2 * s + k];
      EXPECT_LE(w.squaredNorm(), net.power(k) * (1 + 1e-12));
      EXPECT_GT(w.squaredNorm(), 0.0);
    }
}

TEST(RandomSample, StaysInsideTheGridFront) {
  // No random rank-one state beats the grid front by a visible margin.
  const NetworkInstance net = seeded_2x2(12);
  const auto front = pareto_filter(oracle::oracle_region_2user(net, {101, 1, 1}).tuples());
  const oracle::RegionCloud cloud = oracle::random_region_sample(net, 2000, 3);
  for (const RateTuple& r : cloud.tuples()) EXPECT_GE(dominance_deficiency(r, front), -2e-2);
}
