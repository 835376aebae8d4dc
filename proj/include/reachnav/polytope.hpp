#pragma once

#include "reachnav/types.hpp"

#include <vector>

namespace reachnav {

/// Convex polytope given as the hull of a finite vertex set. Vertices are
/// stored as the columns of a d x n matrix.
class VPolytope {
 public:
  explicit VPolytope(Mat vertices);

  static VPolytope from_points(const std::vector<Vec>& points);
  static VPolytope point(const Vec& p);
  /// Axis-aligned box with all 2^d corners.
  static VPolytope box(const Vec& lower, const Vec& upper);

  int dim() const { return static_cast<int>(vertices_.rows()); }
  int size() const { return static_cast<int>(vertices_.cols()); }
  const Mat& vertices() const { return vertices_; }
  Vec vertex(int i) const { return vertices_.col(i); }
  Vec centroid() const { return vertices_.rowwise().mean(); }
  Vec lower_corner() const { return vertices_.rowwise().minCoeff(); }
  Vec upper_corner() const { return vertices_.rowwise().maxCoeff(); }

  bool operator==(const VPolytope& other) const { return vertices_ == other.vertices_; }

 private:
  Mat vertices_;
};

/// Convex polytope `{x : normals x <= offsets}` with unit-norm rows.
/// Construction through `from_halfspaces` verifies the set is nonempty and
/// bounded.
class HPolytope {
 public:
  /// Rows are rescaled to unit norm; throws InvalidPolytope when a row is
  /// zero or the set is empty or unbounded.
  static HPolytope from_halfspaces(Mat normals, Vec offsets);
  static HPolytope box(const Vec& lower, const Vec& upper);

  int dim() const { return static_cast<int>(normals_.cols()); }
  int num_facets() const { return static_cast<int>(normals_.rows()); }
  const Mat& normals() const { return normals_; }
  const Vec& offsets() const { return offsets_; }
  Vec normal(int j) const { return normals_.row(j).transpose(); }
  double offset(int j) const { return offsets_(j); }

  /// Builds without the emptiness/boundedness LP; rows must already be unit.
  /// For derived objects whose validity follows from their inputs.
  static HPolytope trusted(Mat normals, Vec offsets);

 private:
  HPolytope(Mat normals, Vec offsets) : normals_(std::move(normals)), offsets_(std::move(offsets)) {}

  Mat normals_;
  Vec offsets_;
};

/// Hyperplane `<normal, x> = offset` touching a set at `support_point`.
struct SupportedFacet {
  Vec normal;
  double offset = 0.0;
  Vec support_point;
};

struct SupportResult {
  double value = 0.0;
  Vec vertex;
  int index = 0;
};

/// Max of <direction, v> over the vertices; ties go to the lowest index.
SupportResult support(const VPolytope& p, const Vec& direction);

/// Max of <direction, x> over an H-polytope (solved as an LP).
double support_value(const HPolytope& h, const Vec& direction);

VPolytope minkowski_sum(const VPolytope& p, const VPolytope& q, double coplanar_tol = 1e-8);
VPolytope reflect(const VPolytope& p);

bool contains(const HPolytope& h, const Vec& x, double tol = kTol.membership);

VPolytope translate(const VPolytope& p, const Vec& t);
HPolytope translate(const HPolytope& h, const Vec& t);

/// Vertex enumeration through the polar hull about an interior point.
VPolytope h_to_v(const HPolytope& h, double coplanar_tol = 1e-8);

/// Restriction of a state-space point to selected coordinates.
Vec select(const Vec& x, const std::vector<int>& indices);

}  // namespace reachnav
