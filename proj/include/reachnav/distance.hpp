#pragma once

#include "reachnav/polytope.hpp"

namespace reachnav {

struct DistanceResult {
  double distance = 0.0;
  Vec closest_a;
  Vec closest_b;
};

/// Euclidean projection of `x` onto `h`; closest_a is x, closest_b the
/// projection. Throws EmptyPolytope when h has no points.
DistanceResult project_point(const Vec& x, const HPolytope& h);

/// Distance between two V-polytopes by Wolfe's minimum-norm-point method
/// on the Minkowski difference, driven by the support oracles of a and b.
DistanceResult polytope_distance(const VPolytope& a, const VPolytope& b);

}  // namespace reachnav
