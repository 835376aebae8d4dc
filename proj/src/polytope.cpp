#include "reachnav/polytope.hpp"

#include "reachnav/error.hpp"
#include "reachnav/hull.hpp"
#include "reachnav/lp.hpp"

#include <cmath>

namespace reachnav {

VPolytope::VPolytope(Mat vertices) : vertices_(std::move(vertices)) {
  if (vertices_.cols() == 0 || vertices_.rows() == 0) throw Error(ErrorCode::EmptyInput, "polytope has no vertices");
  if (!vertices_.allFinite()) throw Error(ErrorCode::InvalidPolytope, "non-finite vertex coordinate");
}

VPolytope VPolytope::from_points(const std::vector<Vec>& points) {
  if (points.empty()) throw Error(ErrorCode::EmptyInput, "polytope has no vertices");
  Mat V(points.front().size(), static_cast<int>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != V.rows()) throw Error(ErrorCode::DimensionMismatch, "vertices of mixed dimension");
    V.col(static_cast<int>(i)) = points[i];
  }
  return VPolytope(std::move(V));
}

VPolytope VPolytope::point(const Vec& p) {
  Mat V(p.size(), 1);
  V.col(0) = p;
  return VPolytope(std::move(V));
}

VPolytope VPolytope::box(const Vec& lower, const Vec& upper) {
  if (lower.size() != upper.size()) throw Error(ErrorCode::DimensionMismatch, "box corner dimensions differ");
  if ((upper - lower).minCoeff() < 0.0) throw Error(ErrorCode::InvalidPolytope, "box lower exceeds upper");
  const int d = static_cast<int>(lower.size());
  const int n = 1 << d;
  Mat V(d, n);
  for (int mask = 0; mask < n; ++mask)
    for (int k = 0; k < d; ++k) V(k, mask) = (mask >> k) & 1 ? upper(k) : lower(k);
  return VPolytope(std::move(V));
}

HPolytope HPolytope::from_halfspaces(Mat normals, Vec offsets) {
  if (normals.rows() != offsets.size()) throw Error(ErrorCode::DimensionMismatch, "one offset per normal required");
  if (!normals.allFinite() || !offsets.allFinite())
    throw Error(ErrorCode::InvalidPolytope, "non-finite halfspace data");
  for (int j = 0; j < normals.rows(); ++j) {
    const double len = normals.row(j).norm();
    if (len == 0.0) throw Error(ErrorCode::InvalidPolytope, "zero normal in row " + std::to_string(j));
    normals.row(j) /= len;
    offsets(j) /= len;
  }
  FeasibilityResult feas;
  try {
    feas = lp_feasible(normals, offsets, BoundsCheck::Check);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Unbounded) throw Error(ErrorCode::InvalidPolytope, "halfspace system is unbounded");
    throw;
  }
  if (feas.status != Feasibility::Feasible) throw Error(ErrorCode::InvalidPolytope, "halfspace system is empty");
  return HPolytope(std::move(normals), std::move(offsets));
}

HPolytope HPolytope::trusted(Mat normals, Vec offsets) {
  if (normals.rows() != offsets.size()) throw Error(ErrorCode::DimensionMismatch, "one offset per normal required");
  return HPolytope(std::move(normals), std::move(offsets));
}

HPolytope HPolytope::box(const Vec& lower, const Vec& upper) {
  if (lower.size() != upper.size()) throw Error(ErrorCode::DimensionMismatch, "box corner dimensions differ");
  if ((upper - lower).minCoeff() < 0.0) throw Error(ErrorCode::InvalidPolytope, "box lower exceeds upper");
  const int d = static_cast<int>(lower.size());
  Mat N = Mat::Zero(2 * d, d);
  Vec off(2 * d);
  for (int k = 0; k < d; ++k) {
    N(2 * k, k) = 1.0;
    off(2 * k) = upper(k);
    N(2 * k + 1, k) = -1.0;
    off(2 * k + 1) = -lower(k);
  }
  return HPolytope(std::move(N), std::move(off));
}

SupportResult support(const VPolytope& p, const Vec& direction) {
  if (direction.size() != p.dim()) throw Error(ErrorCode::DimensionMismatch, "direction dimension");
  if (direction.squaredNorm() == 0.0) throw Error(ErrorCode::ZeroDirection, "support direction is zero");
  const Eigen::RowVectorXd values = direction.transpose() * p.vertices();
  int best = 0;
  for (int i = 1; i < values.size(); ++i)
    if (values(i) > values(best)) best = i;
  return SupportResult{values(best), p.vertex(best), best};
}

double support_value(const HPolytope& h, const Vec& direction) {
  if (direction.size() != h.dim()) throw Error(ErrorCode::DimensionMismatch, "direction dimension");
  if (direction.squaredNorm() == 0.0) throw Error(ErrorCode::ZeroDirection, "support direction is zero");
  const InequalityLpResult res = lp_maximize(h.normals(), h.offsets(), direction);
  if (res.status != LpStatus::Optimal) throw Error(ErrorCode::InvalidPolytope, "support LP not optimal");
  return res.objective;
}

VPolytope minkowski_sum(const VPolytope& p, const VPolytope& q, double coplanar_tol) {
  if (p.dim() != q.dim()) throw Error(ErrorCode::DimensionMismatch, "Minkowski sum of different dimensions");
  if (p.size() == 1) return translate(q, p.vertex(0));
  if (q.size() == 1) return translate(p, q.vertex(0));
  Mat sums(p.dim(), p.size() * q.size());
  for (int i = 0; i < p.size(); ++i)
    for (int j = 0; j < q.size(); ++j) sums.col(i * q.size() + j) = p.vertices().col(i) + q.vertices().col(j);
  return convex_hull(sums, HullOptions{coplanar_tol}).vertices;
}

VPolytope reflect(const VPolytope& p) { return VPolytope(-p.vertices()); }

bool contains(const HPolytope& h, const Vec& x, double tol) {
  if (x.size() != h.dim()) throw Error(ErrorCode::DimensionMismatch, "point dimension");
  return ((h.normals() * x - h.offsets()).array() <= tol).all();
}

VPolytope translate(const VPolytope& p, const Vec& t) {
  if (t.size() != p.dim()) throw Error(ErrorCode::DimensionMismatch, "translation dimension");
  return VPolytope(p.vertices().colwise() + t);
}

HPolytope translate(const HPolytope& h, const Vec& t) {
  if (t.size() != h.dim()) throw Error(ErrorCode::DimensionMismatch, "translation dimension");
  return HPolytope::trusted(h.normals(), h.offsets() + h.normals() * t);
}

VPolytope h_to_v(const HPolytope& h, double coplanar_tol) {
  const FeasibilityResult feas = lp_feasible(h.normals(), h.offsets(), BoundsCheck::Skip);
  if (feas.status != Feasibility::Feasible || feas.depth <= 1e-12)
    throw Error(ErrorCode::DegenerateInput, "H-polytope has no interior");
  const Vec center = *feas.witness;
  const Vec slack = h.offsets() - h.normals() * center;
  Mat polar(h.dim(), h.num_facets());
  for (int j = 0; j < h.num_facets(); ++j) polar.col(j) = h.normal(j) / slack(j);
  const Hull dual = convex_hull(polar, HullOptions{coplanar_tol});
  const HPolytope& df = dual.facets;
  Mat V(h.dim(), df.num_facets());
  for (int k = 0; k < df.num_facets(); ++k) V.col(k) = center + df.normal(k) / df.offset(k);
  return VPolytope(std::move(V));
}

Vec select(const Vec& x, const std::vector<int>& indices) {
  Vec out(static_cast<int>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) out(static_cast<int>(i)) = x(indices[i]);
  return out;
}

}  // namespace reachnav
