#include "itbeam/ellipsoid.hpp"

#include <cmath>
#include <stdexcept>

namespace itbeam {

Ellipsoid::Ellipsoid(Eigen::VectorXd center, double radius)
    : center_(std::move(center)) {
  if (center_.size() == 0) throw std::invalid_argument("empty ellipsoid");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  const auto n = center_.size();
  shape_ = Eigen::MatrixXd::Identity(n, n) * (radius * radius);
}

bool Ellipsoid::cut(const Eigen::VectorXd& normal, double depth) {
  const Eigen::VectorXd qg = shape_ * normal;
  const double gqg = normal.dot(qg);
  if (!(gqg > 0.0) || !std::isfinite(gqg)) return false;
  const double scale = std::sqrt(gqg);
  const double alpha = depth / scale;
  if (alpha >= 1.0) return false;
  const Eigen::VectorXd step = qg / scale;  // Q g / sqrt(g^T Q g)

  const double n = static_cast<double>(center_.size());
  if (center_.size() == 1) {
    center_ -= step * ((1.0 + alpha) / 2.0);
    shape_ *= (1.0 - alpha) * (1.0 - alpha) / 4.0;
    return true;
  }

  center_ -= step * ((1.0 + n * alpha) / (n + 1.0));
  const double shrink = n * n * (1.0 - alpha * alpha) / (n * n - 1.0);
  const double rank1 = 2.0 * (1.0 + n * alpha) / ((n + 1.0) * (1.0 + alpha));
  shape_ = shrink * (shape_ - rank1 * step * step.transpose());
  shape_ = 0.5 * (shape_ + shape_.transpose());
  return true;
}

double Ellipsoid::width() const {
  return std::sqrt(shape_.diagonal().maxCoeff());
}

}  // namespace itbeam
