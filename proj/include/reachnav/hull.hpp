#pragma once

#include "reachnav/polytope.hpp"

#include <vector>

namespace reachnav {

struct HullOptions {
  /// Simplicial facets whose unit normals differ by less than this (and
  /// whose planes agree to the same relative tolerance) are merged.
  double coplanar_tol = 1e-8;
};

struct Hull {
  VPolytope vertices;
  HPolytope facets;
};

/// Quickhull in arbitrary dimension d >= 1 with coplanar facet merging.
/// Returns the extreme points and the merged facet description. Throws
/// EmptyInput for no points, DegenerateInput when the points do not span
/// d dimensions.
Hull convex_hull(const Mat& points, const HullOptions& options = {});
Hull convex_hull(const std::vector<Vec>& points, const HullOptions& options = {});

}  // namespace reachnav
