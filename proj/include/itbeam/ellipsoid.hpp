#pragma once

#include <Eigen/Dense>

namespace itbeam {

/// Ellipsoid {y : (y - c)^T Q^{-1} (y - c) <= 1} with deep-cut updates, used
/// to minimize a convex function from subgradient or feasibility cuts.
class Ellipsoid {
 public:
  Ellipsoid(Eigen::VectorXd center, double radius);

  /// Shrinks to the minimum-volume ellipsoid containing
  /// {y in E : normal^T (y - c) <= -depth}. Returns false when that set is
  /// empty (or the normal is zero), leaving the ellipsoid unchanged.
  bool cut(const Eigen::VectorXd& normal, double depth = 0.0);

  const Eigen::VectorXd& center() const { return center_; }
  const Eigen::MatrixXd& shape() const { return shape_; }
  Eigen::Index dimension() const { return center_.size(); }

  /// Largest half-extent of the ellipsoid along any coordinate axis.
  double width() const;

 private:
  Eigen::VectorXd center_;
  Eigen::MatrixXd shape_;
};

}  // namespace itbeam
