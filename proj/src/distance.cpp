#include "reachnav/distance.hpp"

#include "reachnav/error.hpp"
#include "reachnav/lp.hpp"
#include "reachnav/qp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace reachnav {

DistanceResult project_point(const Vec& x, const HPolytope& h) {
  if (x.size() != h.dim()) throw Error(ErrorCode::DimensionMismatch, "point dimension");
  if (contains(h, x, kTol.membership)) return DistanceResult{0.0, x, x};
  const int d = h.dim();
  QpProblem qp;
  qp.H = Mat::Identity(d, d);
  qp.g = -x;
  qp.Ain = h.normals();
  qp.bin = h.offsets();
  QpOptions opts;
  opts.kkt_tol = 1e-10;
  const QpResult res = solve_qp(qp, std::nullopt, opts);
  if (res.status == QpStatus::Infeasible) throw Error(ErrorCode::EmptyPolytope, "projection onto an empty polytope");
  return DistanceResult{(x - res.x).norm(), x, res.x};
}

namespace {

struct CorralPoint {
  int ia;
  int ib;
  Vec q;
};

// Minimiser of |sum alpha_i q_i| over the affine hull (sum alpha = 1).
Vec affine_minimiser(const std::vector<CorralPoint>& S) {
  const int k = static_cast<int>(S.size());
  Mat K(k + 1, k + 1);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) K(i, j) = S[i].q.dot(S[j].q);
  K.col(k).head(k).setOnes();
  K.row(k).head(k).setOnes();
  K(k, k) = 0.0;
  Vec rhs = Vec::Zero(k + 1);
  rhs(k) = 1.0;
  return K.colPivHouseholderQr().solve(rhs).head(k);
}

}  // namespace

DistanceResult polytope_distance(const VPolytope& a, const VPolytope& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "distance between different dimensions");
  const int d = a.dim();
  const double scale = 1.0 + std::max(a.vertices().cwiseAbs().maxCoeff(), b.vertices().cwiseAbs().maxCoeff());

  auto point = [&](int ia, int ib) { return CorralPoint{ia, ib, a.vertex(ia) - b.vertex(ib)}; };
  std::vector<CorralPoint> S{point(0, 0)};
  Vec w = Vec::Ones(1);
  Vec x = S[0].q;
  double max_q2 = x.squaredNorm();

  const int max_major = 1000;
  for (int major = 0; major < max_major; ++major) {
    if (x.norm() <= 1e-13 * scale) break;
    const auto sa = support(a, -x);
    const auto sb = support(b, x);
    const CorralPoint cand = point(sa.index, sb.index);
    max_q2 = std::max(max_q2, cand.q.squaredNorm());
    if (x.squaredNorm() - x.dot(cand.q) <= 1e-14 * std::max(1.0, max_q2)) break;
    bool duplicate = false;
    for (const auto& s : S) duplicate = duplicate || (s.ia == cand.ia && s.ib == cand.ib);
    if (duplicate || static_cast<int>(S.size()) > d) break;
    S.push_back(cand);
    w.conservativeResize(w.size() + 1);
    w(w.size() - 1) = 0.0;

    for (int minor = 0; minor < 4 * (d + 2); ++minor) {
      const Vec alpha = affine_minimiser(S);
      if ((alpha.array() > 1e-14).all()) {
        w = alpha;
        break;
      }
      double theta = 1.0;
      for (int i = 0; i < alpha.size(); ++i)
        if (alpha(i) <= 1e-14 && w(i) - alpha(i) > 0.0) theta = std::min(theta, w(i) / (w(i) - alpha(i)));
      w = theta * alpha + (1.0 - theta) * w;
      std::vector<CorralPoint> keep;
      std::vector<double> keep_w;
      for (int i = 0; i < w.size(); ++i) {
        if (w(i) > 1e-14) {
          keep.push_back(S[i]);
          keep_w.push_back(w(i));
        }
      }
      if (keep.empty()) {  // numerical corner case: fall back to the newest point
        keep.push_back(S.back());
        keep_w.push_back(1.0);
      }
      S = std::move(keep);
      w = Eigen::Map<Vec>(keep_w.data(), static_cast<int>(keep_w.size()));
      w /= w.sum();
    }
    x = Vec::Zero(d);
    for (std::size_t i = 0; i < S.size(); ++i) x += w(static_cast<int>(i)) * S[i].q;
  }

  DistanceResult out;
  out.closest_a = Vec::Zero(d);
  out.closest_b = Vec::Zero(d);
  for (std::size_t i = 0; i < S.size(); ++i) {
    out.closest_a += w(static_cast<int>(i)) * a.vertex(S[i].ia);
    out.closest_b += w(static_cast<int>(i)) * b.vertex(S[i].ib);
  }
  out.distance = (out.closest_a - out.closest_b).norm();
  if (out.distance <= 1e-12 * scale) out.distance = 0.0;
  return out;
}

}  // namespace reachnav
