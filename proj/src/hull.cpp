#include "reachnav/hull.hpp"

#include "reachnav/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace reachnav {
namespace {

struct Facet {
  std::vector<int> verts;  // d point indices, sorted
  Vec normal;
  double offset = 0.0;
  std::vector<int> outside;
  bool alive = true;
};

using Ridge = std::vector<int>;

class QuickHull {
 public:
  QuickHull(const Mat& pts, double eps) : P_(pts), d_(static_cast<int>(pts.rows())), eps_(eps) {}

  void run(const std::vector<int>& simplex) {
    interior_ = Vec::Zero(d_);
    for (int i : simplex) interior_ += P_.col(i);
    interior_ /= static_cast<double>(simplex.size());

    for (int skip = 0; skip <= d_; ++skip) {
      std::vector<int> verts;
      for (int i = 0; i <= d_; ++i)
        if (i != skip) verts.push_back(simplex[i]);
      add_facet(std::move(verts));
    }
    std::vector<bool> in_simplex(P_.cols(), false);
    for (int i : simplex) in_simplex[i] = true;
    std::vector<int> rest;
    for (int i = 0; i < P_.cols(); ++i)
      if (!in_simplex[i]) rest.push_back(i);
    std::vector<int> all_facets(facets_.size());
    std::iota(all_facets.begin(), all_facets.end(), 0);
    assign(rest, all_facets);

    std::size_t cursor = 0;
    while (true) {
      int f = -1;
      for (std::size_t k = cursor; k < facets_.size(); ++k) {
        if (facets_[k].alive && !facets_[k].outside.empty()) {
          f = static_cast<int>(k);
          break;
        }
        if (!facets_[k].alive || facets_[k].outside.empty()) cursor = k + 1;
      }
      if (f < 0) break;
      add_point(f);
    }
  }

  std::vector<int> alive_facets() const {
    std::vector<int> out;
    for (std::size_t k = 0; k < facets_.size(); ++k)
      if (facets_[k].alive) out.push_back(static_cast<int>(k));
    return out;
  }

  const Facet& facet(int k) const { return facets_[k]; }

 private:
  double dist(const Facet& f, int p) const { return f.normal.dot(P_.col(p)) - f.offset; }

  void plane(Facet& f) const {
    const Vec p0 = P_.col(f.verts[0]);
    Vec n(d_);
    if (d_ == 2) {
      const Vec e = P_.col(f.verts[1]) - p0;
      n << -e(1), e(0);
    } else if (d_ == 3) {
      const Vec3 a = P_.col(f.verts[1]) - p0;
      const Vec3 b = P_.col(f.verts[2]) - p0;
      n = a.cross(b);
    } else {
      Mat D(d_ - 1, d_);
      for (int i = 1; i < d_; ++i) D.row(i - 1) = (P_.col(f.verts[i]) - p0).transpose();
      Eigen::JacobiSVD<Mat> svd(D, Eigen::ComputeFullV);
      n = svd.matrixV().col(d_ - 1);
    }
    const double len = n.norm();
    n = len > 0.0 ? Vec(n / len) : n;
    double off = n.dot(p0);
    if (n.dot(interior_) - off > 0.0) {
      n = -n;
      off = -off;
    }
    f.normal = n;
    f.offset = off;
  }

  int add_facet(std::vector<int> verts) {
    std::sort(verts.begin(), verts.end());
    Facet f;
    f.verts = std::move(verts);
    plane(f);
    const int id = static_cast<int>(facets_.size());
    for (int skip = 0; skip < d_; ++skip) ridges_[ridge_of(f, skip)].push_back(id);
    facets_.push_back(std::move(f));
    return id;
  }

  static Ridge ridge_of(const Facet& f, int skip) {
    Ridge r;
    r.reserve(f.verts.size() - 1);
    for (std::size_t i = 0; i < f.verts.size(); ++i)
      if (static_cast<int>(i) != skip) r.push_back(f.verts[i]);
    return r;
  }

  void assign(const std::vector<int>& points, const std::vector<int>& candidates) {
    for (int p : points) {
      for (int k : candidates) {
        if (dist(facets_[k], p) > eps_) {
          facets_[k].outside.push_back(p);
          break;
        }
      }
    }
  }

  void add_point(int seed) {
    const Facet& sf = facets_[seed];
    int eye = sf.outside.front();
    double best = dist(sf, eye);
    for (int p : sf.outside) {
      const double dp = dist(sf, p);
      if (dp > best) {
        best = dp;
        eye = p;
      }
    }

    // Visible region: facets reachable from the seed across shared ridges.
    std::vector<int> visible{seed};
    std::vector<char> mark(facets_.size(), 0);  // 1 visible, 2 hidden
    mark[seed] = 1;
    std::vector<std::pair<Ridge, int>> horizon;  // ridge, hidden neighbour
    for (std::size_t q = 0; q < visible.size(); ++q) {
      const int f = visible[q];
      for (int skip = 0; skip < d_; ++skip) {
        Ridge r = ridge_of(facets_[f], skip);
        const auto it = ridges_.find(r);
        if (it == ridges_.end() || it->second.size() != 2)
          throw Error(ErrorCode::DegenerateInput, "hull ridge lost its neighbours (numerically degenerate input)");
        const auto& owners = it->second;
        const int g = owners[0] == f ? owners[1] : owners[0];
        if (mark[g] == 0) {
          mark[g] = dist(facets_[g], eye) > eps_ ? 1 : 2;
          if (mark[g] == 1) visible.push_back(g);
        }
        if (mark[g] == 2) horizon.emplace_back(std::move(r), g);
      }
    }

    std::vector<int> orphans;
    for (int f : visible) {
      Facet& vf = facets_[f];
      vf.alive = false;
      for (int p : vf.outside)
        if (p != eye) orphans.push_back(p);
      vf.outside.clear();
      for (int skip = 0; skip < d_; ++skip) {
        auto it = ridges_.find(ridge_of(vf, skip));
        auto& owners = it->second;
        owners.erase(std::remove(owners.begin(), owners.end(), f), owners.end());
        if (owners.empty()) ridges_.erase(it);
      }
    }

    std::vector<int> created;
    created.reserve(horizon.size());
    for (auto& [ridge, hidden] : horizon) {
      std::vector<int> verts = ridge;
      verts.push_back(eye);
      created.push_back(add_facet(std::move(verts)));
    }
    std::sort(orphans.begin(), orphans.end());
    assign(orphans, created);
  }

  const Mat& P_;
  int d_;
  double eps_;
  Vec interior_;
  std::vector<Facet> facets_;
  std::map<Ridge, std::vector<int>> ridges_;
};

std::vector<int> initial_simplex(const Mat& P, double rank_eps) {
  const int d = static_cast<int>(P.rows());
  const int n = static_cast<int>(P.cols());
  std::vector<int> chosen;
  int i0 = 0;
  for (int i = 1; i < n; ++i)
    if (P(0, i) < P(0, i0)) i0 = i;
  chosen.push_back(i0);
  Mat Q(d, 0);  // orthonormal basis of the current affine span directions
  const Vec origin = P.col(i0);
  for (int k = 0; k < d; ++k) {
    int best = -1;
    double best_dist = rank_eps;
    for (int i = 0; i < n; ++i) {
      Vec v = P.col(i) - origin;
      if (Q.cols() > 0) v -= Q * (Q.transpose() * v);
      const double len = v.norm();
      if (len > best_dist) {
        best_dist = len;
        best = i;
      }
    }
    if (best < 0)
      throw Error(ErrorCode::DegenerateInput,
                  "points span only " + std::to_string(k) + " of " + std::to_string(d) + " dimensions");
    Vec v = P.col(best) - origin;
    if (Q.cols() > 0) v -= Q * (Q.transpose() * v);
    // second Gram-Schmidt pass for stability
    if (Q.cols() > 0) v -= Q * (Q.transpose() * v);
    Q.conservativeResize(d, Q.cols() + 1);
    Q.col(Q.cols() - 1) = v.normalized();
    chosen.push_back(best);
  }
  return chosen;
}

Hull hull_1d(const Mat& P) {
  int lo = 0, hi = 0;
  for (int i = 1; i < P.cols(); ++i) {
    if (P(0, i) < P(0, lo)) lo = i;
    if (P(0, i) > P(0, hi)) hi = i;
  }
  if (!(P(0, hi) > P(0, lo))) throw Error(ErrorCode::DegenerateInput, "1-D points are all equal");
  Mat V(1, 2);
  V << P(0, lo), P(0, hi);
  Mat N(2, 1);
  N << 1.0, -1.0;
  Vec off(2);
  off << P(0, hi), -P(0, lo);
  return Hull{VPolytope(V), HPolytope::trusted(N, off)};
}

}  // namespace

Hull convex_hull(const Mat& points, const HullOptions& options) {
  if (points.cols() == 0 || points.rows() == 0) throw Error(ErrorCode::EmptyInput, "no points to hull");
  if (!points.allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite coordinate");
  if (options.coplanar_tol <= 0.0) throw Error(ErrorCode::InvalidArgument, "coplanar_tol must be positive");
  const int d = static_cast<int>(points.rows());
  if (d == 1) return hull_1d(points);
  if (points.cols() < d + 1) throw Error(ErrorCode::DegenerateInput, "fewer than d+1 points");

  const Vec lo = points.rowwise().minCoeff();
  const Vec hi = points.rowwise().maxCoeff();
  const double scale = std::max(1.0, std::max(lo.cwiseAbs().maxCoeff(), hi.cwiseAbs().maxCoeff()));
  const double extent = (hi - lo).norm();
  const double eps = 1e-12 * scale;

  const std::vector<int> simplex = initial_simplex(points, 1e-10 * std::max(extent, 1e-300) + 1e-13 * scale);
  QuickHull qh(points, eps);
  qh.run(simplex);

  // Merge simplicial facets that share a plane.
  struct Group {
    Vec normal_sum;
    Vec first;
    std::vector<int> members;
  };
  std::vector<Group> groups;
  const std::vector<int> alive = qh.alive_facets();
  for (int k : alive) {
    const Facet& f = qh.facet(k);
    bool placed = false;
    for (Group& g : groups) {
      if ((g.first - f.normal).norm() < options.coplanar_tol) {
        g.normal_sum += f.normal;
        g.members.push_back(k);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back(Group{f.normal, f.normal, {k}});
  }

  const int m = static_cast<int>(groups.size());
  Mat N(m, d);
  Vec off(m);
  for (int j = 0; j < m; ++j) {
    const Vec n = groups[j].members.size() == 1 ? groups[j].first : Vec(groups[j].normal_sum.normalized());
    N.row(j) = n.transpose();
    off(j) = (n.transpose() * points).maxCoeff();
  }

  // Hull vertices that are extreme under the merged description.
  std::vector<int> candidates;
  for (int k : alive)
    for (int v : qh.facet(k).verts) candidates.push_back(v);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  const double act_tol = 1e-7 * scale;
  const double rank_tol = std::max(1e-9, 10.0 * options.coplanar_tol);
  std::vector<int> extreme;
  for (int v : candidates) {
    const Vec slack = off - N * points.col(v);
    std::vector<int> active;
    for (int j = 0; j < m; ++j)
      if (slack(j) <= act_tol) active.push_back(j);
    if (static_cast<int>(active.size()) < d) continue;
    Mat An(static_cast<int>(active.size()), d);
    for (std::size_t i = 0; i < active.size(); ++i) An.row(static_cast<int>(i)) = N.row(active[i]);
    Eigen::JacobiSVD<Mat> svd(An);
    if (svd.singularValues()(d - 1) > rank_tol) extreme.push_back(v);
  }
  // Drop duplicated coordinates (input may repeat points).
  std::vector<int> unique_extreme;
  for (int v : extreme) {
    bool dup = false;
    for (int u : unique_extreme)
      if (points.col(u) == points.col(v)) dup = true;
    if (!dup) unique_extreme.push_back(v);
  }

  Mat V(d, static_cast<int>(unique_extreme.size()));
  for (std::size_t i = 0; i < unique_extreme.size(); ++i) V.col(static_cast<int>(i)) = points.col(unique_extreme[i]);
  return Hull{VPolytope(std::move(V)), HPolytope::trusted(std::move(N), std::move(off))};
}

Hull convex_hull(const std::vector<Vec>& points, const HullOptions& options) {
  if (points.empty()) throw Error(ErrorCode::EmptyInput, "no points to hull");
  Mat P(points.front().size(), static_cast<int>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != P.rows()) throw Error(ErrorCode::DimensionMismatch, "points of mixed dimension");
    P.col(static_cast<int>(i)) = points[i];
  }
  return convex_hull(P, options);
}

}  // namespace reachnav
