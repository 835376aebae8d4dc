#include "reachnav/reach.hpp"

#include "reachnav/error.hpp"
#include "reachnav/lp.hpp"

#include <cmath>
#include <numbers>
#include <optional>

namespace reachnav {
namespace {

class StepTable {
 public:
  StepTable(const LinearSystem& sys, const TimeGrid& grid) : sys_(sys), grid_(grid), cache_(sys.segments()) {}

  const Rk4Step& at(int k) {
    const int seg = sys_.segment_at(grid_.t0 + (k + 0.5) * grid_.h);
    auto& slot = cache_[static_cast<std::size_t>(seg)];
    if (!slot) slot = rk4_step(sys_.A(seg), sys_.B(seg), grid_.h);
    return *slot;
  }
  const Mat& B(int k) const { return sys_.B(sys_.segment_at(grid_.t0 + (k + 0.5) * grid_.h)); }

 private:
  const LinearSystem& sys_;
  TimeGrid grid_;
  std::vector<std::optional<Rk4Step>> cache_;
};

bool is_position_direction(const Vec& c, const PositionIndices& position) {
  if (position.empty()) return false;
  std::vector<char> pos(static_cast<std::size_t>(c.size()), 0);
  for (int i : position) pos[static_cast<std::size_t>(i)] = 1;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (!pos[static_cast<std::size_t>(i)] && c(i) != 0.0) return false;
  return true;
}

SupportedFacet restrict_to_position(const SupportedFacet& f, const PositionIndices& position) {
  const int p = static_cast<int>(position.size());
  SupportedFacet out;
  out.normal.resize(p);
  out.support_point.resize(p);
  for (int i = 0; i < p; ++i) {
    out.normal(i) = f.normal(position[static_cast<std::size_t>(i)]);
    out.support_point(i) = f.support_point(position[static_cast<std::size_t>(i)]);
  }
  out.offset = f.offset;
  return out;
}

void check_directions(const std::vector<Vec>& directions, int n) {
  if (directions.empty()) throw Error(ErrorCode::InsufficientDirections, "no directions supplied");
  Mat D(static_cast<Eigen::Index>(directions.size()), n);
  for (std::size_t j = 0; j < directions.size(); ++j) {
    if (directions[j].size() != n) throw Error(ErrorCode::DimensionMismatch, "direction dimension differs from the state");
    if (directions[j].isZero(0.0)) throw Error(ErrorCode::ZeroDirection, "zero terminal direction");
    D.row(static_cast<Eigen::Index>(j)) = directions[j].normalized().transpose();
  }
  Eigen::JacobiSVD<Mat> svd(D, Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  const Eigen::Index r = svd.rank();
  const Mat coords = D * svd.matrixV().leftCols(r);
  if (!rows_positively_span(coords))
    throw Error(ErrorCode::InsufficientDirections,
                "directions do not positively span the subspace they generate (bounded facet set needs >= rank+1)");
}

ReachPolytope assemble(double time, const std::vector<Vec>& directions, std::vector<SupportedFacet> facets,
                       const PositionIndices& position) {
  ReachPolytope out;
  out.time = time;
  out.facets = std::move(facets);
  for (std::size_t j = 0; j < directions.size(); ++j)
    if (is_position_direction(directions[j], position)) out.position_facets.push_back(restrict_to_position(out.facets[j], position));
  return out;
}

}  // namespace

TimeGrid TimeGrid::make(double t0, double T, double dt) {
  if (!std::isfinite(t0) || !std::isfinite(T) || !(T > t0)) throw Error(ErrorCode::InvalidHorizon, "need t0 < T");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidHorizon, "need dt > 0");
  TimeGrid g;
  g.t0 = t0;
  g.T = T;
  g.steps = std::max(1, static_cast<int>(std::ceil((T - t0) / dt - 1e-9)));
  g.h = (T - t0) / g.steps;
  return g;
}

Rk4Step rk4_step(const Mat& A, const Mat& B, double h) {
  const Eigen::Index n = A.rows();
  const Mat I = Mat::Identity(n, n);
  const Mat X = h * A;
  const Mat X2 = X * X;
  const Mat X3 = X2 * X;
  Rk4Step s;
  s.Psi = I + X / 2.0 + X2 / 6.0 + X3 / 24.0;
  s.Phi = I + X * s.Psi;
  s.Gamma = h * s.Psi * B;
  return s;
}

Vec optimal_facet_control(const Vec& c, const Mat& B, const ControlBox& box) {
  if (c.size() != B.rows() || B.cols() != box.dim())
    throw Error(ErrorCode::DimensionMismatch, "costate, input matrix and control box dimensions disagree");
  const Vec g = B.transpose() * c;
  Vec u(g.size());
  for (Eigen::Index k = 0; k < g.size(); ++k) u(k) = g(k) < 0.0 ? box.lower(k) : box.upper(k);
  return u;
}

CostatePath propagate_costate(const LinearSystem& sys, const Vec& c_terminal, double t0, double T, double dt) {
  if (c_terminal.size() != sys.n()) throw Error(ErrorCode::DimensionMismatch, "terminal costate dimension");
  CostatePath path;
  path.grid = TimeGrid::make(t0, T, dt);
  const int K = path.grid.steps;
  path.c.assign(static_cast<std::size_t>(K + 1), Vec());
  path.c[static_cast<std::size_t>(K)] = c_terminal;
  StepTable steps(sys, path.grid);
  for (int k = K - 1; k >= 0; --k)
    path.c[static_cast<std::size_t>(k)] = steps.at(k).Phi.transpose() * path.c[static_cast<std::size_t>(k + 1)];
  return path;
}

SupportedFacet support_point_on_initial_set(const VPolytope& x0, const Vec& c) {
  if (c.size() != x0.dim()) throw Error(ErrorCode::DimensionMismatch, "direction dimension");
  const double norm = c.norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::ZeroDirection, "zero costate at the initial time");
  SupportedFacet f;
  f.normal = c / norm;
  f.support_point = support(x0, c).vertex;
  f.offset = f.normal.dot(f.support_point);
  return f;
}

SupportedFacet propagate_support_point(const LinearSystem& sys, const ControlBox& u_box, const SupportedFacet& facet0,
                                       const CostatePath& costate, double t0, double T, double dt,
                                       std::vector<Vec>* controls) {
  const TimeGrid grid = TimeGrid::make(t0, T, dt);
  if (!(costate.grid == grid) || static_cast<int>(costate.c.size()) != grid.steps + 1)
    throw Error(ErrorCode::GridMismatch, "costate path was computed on a different grid");
  if (facet0.support_point.size() != sys.n() || u_box.dim() != sys.m())
    throw Error(ErrorCode::DimensionMismatch, "support point or control box dimension");
  StepTable steps(sys, grid);
  Vec z = facet0.support_point;
  if (controls) controls->clear();
  for (int k = 0; k < grid.steps; ++k) {
    const Rk4Step& s = steps.at(k);
    const Vec u = optimal_facet_control(s.Psi.transpose() * costate.c[static_cast<std::size_t>(k + 1)], steps.B(k), u_box);
    z = s.Phi * z + s.Gamma * u;
    if (controls) controls->push_back(u);
  }
  const Vec& cT = costate.c.back();
  const double norm = cT.norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::ZeroDirection, "zero terminal costate");
  SupportedFacet f;
  f.normal = cT / norm;
  f.support_point = z;
  f.offset = f.normal.dot(z);
  return f;
}

HPolytope ReachPolytope::position_hpolytope() const {
  if (position_facets.empty()) throw Error(ErrorCode::InsufficientDirections, "reach polytope has no position facets");
  const Eigen::Index p = position_facets.front().normal.size();
  Mat N(static_cast<Eigen::Index>(position_facets.size()), p);
  Vec off(N.rows());
  for (std::size_t j = 0; j < position_facets.size(); ++j) {
    N.row(static_cast<Eigen::Index>(j)) = position_facets[j].normal.transpose();
    off(static_cast<Eigen::Index>(j)) = position_facets[j].offset;
  }
  return HPolytope::trusted(std::move(N), std::move(off));
}

bool ReachPolytope::contains(const Vec& x, double tol) const {
  for (const auto& f : facets)
    if (f.normal.dot(x) > f.offset + tol) return false;
  return true;
}

ReachPolytope reach_polytope(const LinearSystem& sys, const VPolytope& x0, const ControlBox& u_box, double t0, double T,
                             const std::vector<Vec>& directions, double dt, const PositionIndices& position) {
  if (x0.dim() != sys.n()) throw Error(ErrorCode::DimensionMismatch, "initial set dimension");
  for (int i : position)
    if (i < 0 || i >= sys.n()) throw Error(ErrorCode::DimensionMismatch, "position index out of range");
  check_directions(directions, sys.n());
  std::vector<SupportedFacet> facets;
  facets.reserve(directions.size());
  for (const Vec& c : directions) {
    const CostatePath path = propagate_costate(sys, c, t0, T, dt);
    const SupportedFacet f0 = support_point_on_initial_set(x0, path.c.front());
    facets.push_back(propagate_support_point(sys, u_box, f0, path, t0, T, dt));
  }
  return assemble(T, directions, std::move(facets), position);
}

std::vector<ReachPolytope> reach_tube(const LinearSystem& sys, const VPolytope& x0, const ControlBox& u_box, double t0,
                                      const std::vector<double>& times, const std::vector<Vec>& directions, double dt,
                                      const PositionIndices& position) {
  std::vector<ReachPolytope> out;
  double prev = t0;
  for (double T : times) {
    if (!(T > prev)) throw Error(ErrorCode::InvalidHorizon, "tube times must be strictly increasing and after t0");
    prev = T;
  }
  out.reserve(times.size());
  for (double T : times) out.push_back(reach_polytope(sys, x0, u_box, t0, T, directions, dt, position));
  return out;
}

std::vector<Vec3> position_directions(int count) {
  if (count < 4) throw Error(ErrorCode::InsufficientDirections, "at least 4 position directions are needed");
  std::vector<Vec3> axes, corners, edges;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c) {
        const int nz = (a != 0) + (b != 0) + (c != 0);
        const Vec3 v = Vec3(a, b, c);
        if (nz == 1) axes.push_back(v);
        else if (nz == 2) edges.push_back(v.normalized());
        else if (nz == 3) corners.push_back(v.normalized());
      }
  std::vector<Vec3> out = axes;
  switch (count) {
    case 6:
      return out;
    case 14:
      out.insert(out.end(), corners.begin(), corners.end());
      return out;
    case 18:
      out.insert(out.end(), edges.begin(), edges.end());
      return out;
    case 26:
      out.insert(out.end(), edges.begin(), edges.end());
      out.insert(out.end(), corners.begin(), corners.end());
      return out;
    default:
      break;
  }
  out.clear();
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    out.emplace_back(r * std::cos(golden * i), r * std::sin(golden * i), z);
  }
  return out;
}

std::vector<Vec> default_directions(int n, const PositionIndices& position, const std::vector<int>& extra_axes,
                                    int position_count) {
  if (position.size() != 3) throw Error(ErrorCode::DimensionMismatch, "default directions assume 3 position coordinates");
  std::vector<Vec> out;
  for (const Vec3& d : position_directions(position_count)) {
    Vec c = Vec::Zero(n);
    for (int k = 0; k < 3; ++k) c(position[static_cast<std::size_t>(k)]) = d(k);
    out.push_back(c);
  }
  for (int i : extra_axes) {
    for (double s : {1.0, -1.0}) {
      Vec c = Vec::Zero(n);
      c(i) = s;
      out.push_back(c);
    }
  }
  return out;
}

LtiReachCache::LtiReachCache(const LinearSystem& sys, const ControlBox& u_box, std::vector<double> horizons,
                             std::vector<Vec> directions, double dt, PositionIndices position)
    : horizons_(std::move(horizons)), directions_(std::move(directions)), position_(std::move(position)) {
  if (!sys.time_invariant()) throw Error(ErrorCode::InvalidArgument, "reach cache needs a time-invariant system");
  const VPolytope origin = VPolytope::point(Vec::Zero(sys.n()));
  from_zero_ = reach_tube(sys, origin, u_box, 0.0, horizons_, directions_, dt, position_);
  for (double tau : horizons_) {
    const TimeGrid grid = TimeGrid::make(0.0, tau, dt);
    const Rk4Step s = rk4_step(sys.A(0), sys.B(0), grid.h);
    Mat phi = Mat::Identity(sys.n(), sys.n());
    for (int k = 0; k < grid.steps; ++k) phi = s.Phi * phi;
    phi_.push_back(phi);
  }
}

std::vector<ReachPolytope> LtiReachCache::tube(const Vec& x, double t) const {
  std::vector<ReachPolytope> out;
  out.reserve(horizons_.size());
  for (std::size_t i = 0; i < horizons_.size(); ++i) {
    const Vec free = phi_[i] * x;
    std::vector<SupportedFacet> facets = from_zero_[i].facets;
    for (auto& f : facets) {
      f.support_point += free;
      f.offset = f.normal.dot(f.support_point);
    }
    out.push_back(assemble(t + horizons_[i], directions_, std::move(facets), position_));
  }
  return out;
}

}  // namespace reachnav
