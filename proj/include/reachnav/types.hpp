#pragma once

#include <Eigen/Dense>

#include <vector>

namespace reachnav {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;

/// Tolerances shared by the convex-program layer. Kept in one record so
/// callers and tests refer to the same constants.
struct Tolerances {
  double feasibility = 1e-7;
  double distance = 1e-6;
  double membership = 1e-9;
  double unit_normal = 1e-9;
};

inline constexpr Tolerances kTol{};

}  // namespace reachnav
