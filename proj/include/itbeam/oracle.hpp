#pragma once

// Brute-force ground truth for tiny instances. Nothing in the solver,
// sweep or protocol code calls into this header.

#include "itbeam/cr_solver.hpp"
#include "itbeam/model.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace itbeam::oracle {

/// A beamformer as a point between the ZF and MRT unit directions:
///   w = sqrt(rho P) * normalize((1 - t) u_zf + t e^{i phi} u_mrt).
/// Without a ZF direction the pair (u_zf, u_mrt) is replaced by an
/// orthonormal basis of span{h_kk, h_kj} and t maps to an angle.
struct BeamParams {
  double t = 0.0;
  double phi = 0.0;
  double rho = 1.0;
};

struct RegionCloud {
  std::size_t cells = 0;
  std::vector<double> rates;          // size() * cells, point-major
  std::vector<BeamParams> params;     // size() * cells, grid clouds only
  std::vector<cvec> beamformers;      // size() * cells, sampled clouds only

  std::size_t size() const { return cells == 0 ? 0 : rates.size() / cells; }
  RateTuple rate(std::size_t point) const;
  std::vector<RateTuple> tuples() const;
  /// Beamformers that generated `point`, rebuilt from its parameters.
  std::vector<cvec> point_beamformers(std::size_t point,
                                      const NetworkInstance& net) const;
};

cvec parametrized_beamformer(std::size_t k, const BeamParams& p,
                             const NetworkInstance& net);

struct RegionGrid {
  std::size_t n_t = 41;
  std::size_t n_phi = 8;
  std::size_t n_rho = 4;
};

/// Every combination of per-user parameters on a (t, phi, rho) grid with
/// t in linspace(0, 1, n_t), phi = 2 pi m / n_phi, rho = m / n_rho.
RegionCloud oracle_region_2user(const NetworkInstance& net, const RegionGrid& grid);

/// Moves a two-user point onto the boundary of its parametrized family:
/// user 1's rate is held and user 2's maximized over (t_1, t_2), phases and
/// power fractions fixed. `scan` is the number of t_1 samples tried before a
/// golden-section polish.
std::array<BeamParams, 2> refine_boundary_2user(const NetworkInstance& net,
                                               const std::array<BeamParams, 2>& start,
                                               std::size_t scan = 401);

struct CrGrid {
  std::size_t n_angle = 721;  // per angular axis (M = 2); M = 3 uses n_angle_3d
  std::size_t n_angle_3d = 41;
  std::size_t refine_seeds = 12;
  std::size_t refine_levels = 8;
};

/// Grid maximum of cell k's IT-constrained rate over rank-one covariances.
/// Each direction transmits at the largest power that keeps every
/// constraint, since the objective increases with power. The coarse grid is
/// followed by zoomed sub-grids around the best cells.
double oracle_cr_max(std::size_t k, const ItView& gamma,
                     const NetworkInstance& net, const CrGrid& grid = {});

/// n random rank-one states: CN(0, I) directions and U(0, 1] power
/// fractions. Sample s consumes a fixed number of draws, so a longer run
/// with the same seed extends a shorter one.
RegionCloud random_region_sample(const NetworkInstance& net, std::size_t n,
                                 std::uint64_t seed);

}  // namespace itbeam::oracle
