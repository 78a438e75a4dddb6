#include "itbeam/oracle.hpp"
#include "itbeam/pareto.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace itbeam;
using itbeam::test::two_cells;
using itbeam::test::vec;

namespace {

const double kLn2 = std::log(2.0);

NetworkInstance orthogonal_pair() {
  return two_cells(vec({1, 0}), vec({0, 1}), vec({1, 0}), vec({0, 1}));
}

// O(n^2) reference for the Pareto filter.
std::vector<RateTuple> quadratic_filter(const std::vector<RateTuple>& pts) {
  std::vector<RateTuple> out;
  for (std::size_t x = 0; x < pts.size(); ++x) {
    bool keep = true;
    for (std::size_t y = 0; y < pts.size() && keep; ++y) {
      if (pareto_dominates(pts[y], pts[x])) keep = false;
      if (y < x && pts[y] == pts[x]) keep = false;
    }
    if (keep) out.push_back(pts[x]);
  }
  return out;
}

}  // namespace

TEST(ExtractIt, HandAndMrt) {
  const NetworkInstance net = two_cells(vec({1, 1}), vec({1, 0}), vec({0, 1}), vec({1, 0}));
  const ItVector g = extract_it(TransmitState::from_beamformers({vec({0, 1}), vec({1, 0})}), net);
  EXPECT_EQ(g(0, 1), 0.0);

  const NetworkInstance seeded = itbeam::test::seeded(2, {3, 2}, {2.0, 1.0}, {1.0, 1.0});
  const ItVector m = extract_it(mrt_state(seeded), seeded);
  EXPECT_NEAR(m(0, 1), mrt_it_bound(0, 1, seeded), 1e-12);
  EXPECT_NEAR(m(1, 0), mrt_it_bound(1, 0, seeded), 1e-12);
}

TEST(ExtractIt, ResolvedValueBoundsOwnRate) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const NetworkInstance net = itbeam::test::seeded(seed, {2, 3, 2}, {1.0, 2.0, 1.0},
                                                     {1.0, 1.0, 0.5});
    const oracle::RegionCloud cloud = oracle::random_region_sample(net, 5, seed);
    for (std::size_t p = 0; p < cloud.size(); ++p) {
      const TransmitState st = TransmitState::from_beamformers(cloud.point_beamformers(p, net));
      const ConsistencyReport rep = verify_rate_consistency(st, net, 1e-5);
      for (double gap : rep.gaps) EXPECT_GE(gap, -1e-5);
    }
  }
}

TEST(RateConsistency, OracleBoundaryPointsAreConsistent) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const NetworkInstance net = itbeam::test::seeded_2x2(seed);
    const oracle::RegionCloud cloud = oracle::oracle_region_2user(net, {101, 1, 1});
    const auto front = pareto_front_indices(cloud.tuples());
    ASSERT_GT(front.size(), 5u);
    for (std::size_t idx : front) {
      const TransmitState st = TransmitState::from_beamformers(cloud.point_beamformers(idx, net));
      const ConsistencyReport rep = verify_rate_consistency(st, net, 2e-3);
      EXPECT_TRUE(rep.consistent) << "seed " << seed << " point " << idx;
    }
  }
}

TEST(RateConsistency, HalfPowerMrtIsImprovable) {
  const NetworkInstance net = itbeam::test::seeded_2x2(5);
  const TransmitState half = TransmitState::from_beamformers(
      {mrt_beamformer(0, net) * std::sqrt(0.5), mrt_beamformer(1, net) * std::sqrt(0.5)});
  const ConsistencyReport rep = verify_rate_consistency(half, net, 1e-6);
  EXPECT_FALSE(rep.consistent);
  EXPECT_GT(std::max(rep.gaps[0], rep.gaps[1]), 1e-3);
}

TEST(RateConsistency, SingleUserMrtHasNoGap) {
  const NetworkInstance net({2}, {1.0}, {1.0}, {vec({1, 0})});
  const ConsistencyReport rep = verify_rate_consistency(mrt_state(net), net, 1e-9);
  EXPECT_TRUE(rep.consistent);
  EXPECT_NEAR(rep.gaps[0], 0.0, 1e-12);
}

TEST(SensitivityPair, InactiveConstraintsAndHandValue) {
  const NetworkInstance net = orthogonal_pair();
  ItVector g(2);  // MRT levels are zero here
  const SensitivityMatrix m = sensitivity_pair(0, 1, g, net);
  EXPECT_NEAR(m.a, 0.0, 1e-9);
  EXPECT_NEAR(m.d, 0.0, 1e-9);
  EXPECT_NEAR(m.b, -1.0 / (2.0 * kLn2), 1e-7);
  EXPECT_NEAR(m.b, -0.72135, 1e-5);
  // a = d = 0 leaves det = -bc, and b, c < 0.
  EXPECT_LT(m.determinant(), 0.0);
  EXPECT_NEAR(m.determinant(), -m.b * m.c, 1e-12);
}

TEST(SensitivityPair, SignStructureAndFiniteDifferences) {
  ChannelRng rng(42);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const NetworkInstance net = itbeam::test::seeded(seed, {2, 3}, {1.0, 2.0}, {1.0, 1.0});
    const ItVector g = itbeam::test::random_levels(net, rng, 0.1, 0.9);
    const SensitivityMatrix m = sensitivity_pair(0, 1, g, net);
    EXPECT_GE(m.a, 0.0);
    EXPECT_GE(m.d, 0.0);
    EXPECT_LE(m.b, 0.0);
    EXPECT_LE(m.c, 0.0);

    auto fd = [&](std::size_t cell, std::size_t from, std::size_t to) {
      const double h = 1e-4 * std::max(mrt_it_bound(from, to, net), 1.0);
      ItVector up = g, down = g;
      up.set(from, to, g(from, to) + h);
      down.set(from, to, g(from, to) - h);
      return (itbeam::test::solve_value(cell, up, net) -
              itbeam::test::solve_value(cell, down, net)) / (2 * h);
    };
    const double num[4] = {fd(0, 0, 1), fd(0, 1, 0), fd(1, 0, 1), fd(1, 1, 0)};
    const double ana[4] = {m.a, m.b, m.c, m.d};
    for (int e = 0; e < 4; ++e) {
      if (std::max(std::abs(num[e]), std::abs(ana[e])) <= 1e-4) continue;
      EXPECT_NEAR(num[e], ana[e], 1e-2 * std::abs(ana[e])) << "seed " << seed << " entry " << e;
    }
  }
}

TEST(NormalizedResidual, ScaleFreeAndInfinitySafe) {
  SensitivityMatrix m;
  m.a = 0.5;
  m.b = -0.2;
  m.c = -0.3;
  m.d = 0.4;
  const double r = normalized_det_residual(m);
  EXPECT_NEAR(r, 0.14 / 0.2, 1e-12);
  SensitivityMatrix big = m;
  big.a *= 1e3;
  big.b *= 1e3;
  big.c *= 1e3;
  big.d *= 1e3;
  EXPECT_NEAR(normalized_det_residual(big), r, 1e-12);

  SensitivityMatrix singular;
  singular.a = 1.0;
  singular.b = -1.0;
  singular.c = -1.0;
  singular.d = 1.0;
  EXPECT_EQ(normalized_det_residual(singular), 0.0);

  SensitivityMatrix pinned = m;
  pinned.a = std::numeric_limits<double>::infinity();
  const double rp = normalized_det_residual(pinned);
  EXPECT_TRUE(std::isfinite(rp));
  EXPECT_NEAR(rp, 1.0, 1e-3);  // a*d dominates
}

TEST(NecessaryCondition, SingleCellHasNoPairs) {
  const NetworkInstance net({2}, {1.0}, {1.0}, {vec({1, 0})});
  EXPECT_TRUE(necessary_condition_residuals(ItVector(1), net).empty());
}

TEST(NecessaryCondition, BoundaryVersusInterior) {
  const NetworkInstance net = itbeam::test::seeded_2x2(7);
  const oracle::RegionCloud cloud = oracle::oracle_region_2user(net, {201, 1, 1});
  const auto front = pareto_front_indices(cloud.tuples());
  const double b12 = mrt_it_bound(0, 1, net), b21 = mrt_it_bound(1, 0, net);
  int checked = 0;
  const std::size_t stride = std::max<std::size_t>(1, front.size() / 40);
  for (std::size_t n = 0; n < front.size(); n += stride) {
    const std::size_t idx = front[n];
    const auto p = oracle::refine_boundary_2user(net, {cloud.params[2 * idx], cloud.params[2 * idx + 1]});
    const std::vector<cvec> w = {oracle::parametrized_beamformer(0, p[0], net),
                                 oracle::parametrized_beamformer(1, p[1], net)};
    const ItVector g = extract_it(TransmitState::from_beamformers(w), net);
    // The condition is for stationary points inside the box.
    if (g(0, 1) < 1e-3 * b12 || g(0, 1) > (1 - 1e-3) * b12) continue;
    if (g(1, 0) < 1e-3 * b21 || g(1, 0) > (1 - 1e-3) * b21) continue;
    EXPECT_LE(necessary_condition_residuals(g, net).at({0, 1}), 5e-3) << "front point " << idx;
    ++checked;
  }
  EXPECT_GT(checked, 10);

  // Both levels at the middle of the box: improvable for this instance.
  ItVector mid(2);
  mid.set(0, 1, 0.5 * b12);
  mid.set(1, 0, 0.5 * b21);
  EXPECT_GT(necessary_condition_residuals(mid, net).at({0, 1}), 1e-3);
}

TEST(ParetoFilter, HandValues) {
  const std::vector<RateTuple> pts = {{{1, 1}}, {{2, 0.5}}, {{1.5, 1.2}}};
  const auto f = pareto_filter(pts);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0], (RateTuple{{2, 0.5}}));
  EXPECT_EQ(f[1], (RateTuple{{1.5, 1.2}}));

  const std::vector<RateTuple> same(5, RateTuple{{0.7, 0.3}});
  EXPECT_EQ(pareto_front_indices(same), std::vector<std::size_t>{0});
  EXPECT_TRUE(pareto_filter({}).empty());
}

TEST(ParetoFilter, MatchesQuadraticReference) {
  ChannelRng rng(17);
  for (std::size_t dim : {2u, 3u}) {
    std::vector<RateTuple> pts;
    for (int n = 0; n < 1000; ++n) {
      RateTuple t;
      // Rounded values produce ties along one axis.
      for (std::size_t d = 0; d < dim; ++d) t.values.push_back(std::round(50 * rng.uniform()) / 10);
      pts.push_back(t);
    }
    EXPECT_EQ(pareto_filter(pts), quadratic_filter(pts)) << "dim " << dim;
  }
}

TEST(DominanceDeficiency, Basics) {
  const std::vector<RateTuple> front = {{{2, 1}}, {{1, 2}}};
  EXPECT_NEAR(dominance_deficiency({{1.5, 0.5}}, front), 0.5, 1e-15);
  EXPECT_LE(dominance_deficiency({{2, 1}}, front), 0.0);
  EXPECT_LT(dominance_deficiency({{2.5, 2.5}}, front), 0.0);
}

TEST(Sweep, ShapeCornersAndObservations) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const NetworkInstance net = itbeam::test::seeded(seed, {3, 3}, {5.0, 1.0}, {1.0, 1.0});
    const BoundarySweep sw = sweep_boundary_2user(net, 12);
    ASSERT_EQ(sw.points.size(), 144u);
    const RateTuple zf = achievable_rates(zf_state(net), net);
    const RateTuple mrt = achievable_rates(mrt_state(net), net);
    const SweepPoint& lo = sw.points.front();
    const SweepPoint& hi = sw.points.back();
    EXPECT_EQ(lo.gamma_12, 0.0);
    EXPECT_EQ(hi.gamma_12, sw.bound_12);
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_NEAR(lo.guaranteed[k], zf[k], 1e-6);
      EXPECT_NEAR(hi.guaranteed[k], mrt[k], 1e-6);
    }
    const auto front = sw.front_rates();
    for (std::size_t idx : sw.front) {
      const SweepPoint& p = sw.points[idx];
      EXPECT_TRUE(p.solved);
      EXPECT_LE(p.tightness, 1e-4);
      EXPECT_LE(p.gamma_12, sw.bound_12 + 1e-9);
      EXPECT_LE(p.gamma_21, sw.bound_21 + 1e-9);
      for (const RateTuple& f : front) EXPECT_FALSE(pareto_dominates(f, p.guaranteed));
    }
  }
}

TEST(Sweep, RejectsWrongShape) {
  const NetworkInstance three = itbeam::test::seeded(1, {2, 2, 2}, {1, 1, 1}, {1, 1, 1});
  EXPECT_THROW(sweep_boundary_2user(three, 10), std::invalid_argument);
  EXPECT_THROW(sweep_boundary_2user(itbeam::test::seeded_2x2(1), 1), std::invalid_argument);
}
