#pragma once

#include "reachnav/linear_system.hpp"
#include "reachnav/polytope.hpp"

#include <vector>

namespace reachnav {

/// Uniform integration grid on [t0, T]: `steps` RK4 steps of size `h`,
/// with steps = ceil((T - t0) / dt).
struct TimeGrid {
  double t0 = 0.0;
  double T = 0.0;
  int steps = 0;
  double h = 0.0;

  static TimeGrid make(double t0, double T, double dt);
  double time(int k) const { return k == steps ? T : t0 + k * h; }
  bool operator==(const TimeGrid& o) const { return t0 == o.t0 && T == o.T && steps == o.steps && h == o.h; }
};

/// Costate samples c(t0 + k h), k = 0..steps, with c.back() = c(T).
struct CostatePath {
  TimeGrid grid;
  std::vector<Vec> c;
};

/// Per-step RK4 maps for a constant segment: x_{k+1} = Phi x_k + Gamma u_k.
/// Psi satisfies Gamma = h Psi B.
struct Rk4Step {
  Mat Phi;
  Mat Psi;
  Mat Gamma;
};
Rk4Step rk4_step(const Mat& A, const Mat& B, double h);

/// Bang-bang maximiser of <B'c, u> over the box; exact zeros take the upper bound.
Vec optimal_facet_control(const Vec& c, const Mat& B, const ControlBox& box);

/// Backward RK4 of c' = -A(t)' c from c(T) = c_terminal. A is held at its
/// value at each step midpoint; no renormalisation.
CostatePath propagate_costate(const LinearSystem& sys, const Vec& c_terminal, double t0, double T, double dt);

/// Facet of x0 with normal c/|c| through its support point.
SupportedFacet support_point_on_initial_set(const VPolytope& x0, const Vec& c_at_t0);

/// Forward RK4 of z' = A z + B u* from facet0.support_point. On each step u*
/// is the bang-bang control for the direction Psi' c_{k+1}, which makes the
/// endpoint the exact maximiser of <c(T), .> over the RK4-discretised
/// reachable set. `controls`, when given, receives the per-step inputs.
SupportedFacet propagate_support_point(const LinearSystem& sys, const ControlBox& u_box, const SupportedFacet& facet0,
                                       const CostatePath& costate, double t0, double T, double dt,
                                       std::vector<Vec>* controls = nullptr);

struct ReachPolytope {
  double time = 0.0;
  std::vector<SupportedFacet> facets;
  /// Facets whose normals vanish off the position coordinates, restated in
  /// position space (normal, offset and support point of dimension p).
  std::vector<SupportedFacet> position_facets;

  HPolytope position_hpolytope() const;
  /// True when x satisfies every state-space facet within tol.
  bool contains(const Vec& x, double tol) const;
};

/// Position coordinates of the state; empty means position_facets stays empty.
using PositionIndices = std::vector<int>;

ReachPolytope reach_polytope(const LinearSystem& sys, const VPolytope& x0, const ControlBox& u_box, double t0, double T,
                             const std::vector<Vec>& directions, double dt, const PositionIndices& position = {});

std::vector<ReachPolytope> reach_tube(const LinearSystem& sys, const VPolytope& x0, const ControlBox& u_box, double t0,
                                      const std::vector<double>& times, const std::vector<Vec>& directions, double dt,
                                      const PositionIndices& position = {});

/// Unit directions in R^3: 6, 14, 18 and 26 pick the sign-vector families of
/// {-1, 0, 1}^3 (axes, + cube diagonals, + edge diagonals, all); other counts
/// use a Fibonacci sphere.
std::vector<Vec3> position_directions(int count);

/// Position directions embedded into the state through `position`, followed
/// by the +/- axes of every other state coordinate in `extra_axes`.
std::vector<Vec> default_directions(int n, const PositionIndices& position, const std::vector<int>& extra_axes,
                                    int position_count = 26);

/// Reach tubes of a time-invariant system from singleton initial states.
/// The input-driven part is computed once; a tube for state x then only
/// needs the free response Phi(tau) x.
class LtiReachCache {
 public:
  LtiReachCache(const LinearSystem& sys, const ControlBox& u_box, std::vector<double> offsets_in_time,
                std::vector<Vec> directions, double dt, PositionIndices position);

  /// Tube at times t + offsets_in_time for the singleton initial state x.
  std::vector<ReachPolytope> tube(const Vec& x, double t = 0.0) const;
  const std::vector<double>& horizons() const { return horizons_; }

 private:
  std::vector<double> horizons_;
  std::vector<Vec> directions_;
  PositionIndices position_;
  std::vector<Mat> phi_;                 // free-response map per horizon
  std::vector<ReachPolytope> from_zero_;  // tube from the origin
};

}  // namespace reachnav
