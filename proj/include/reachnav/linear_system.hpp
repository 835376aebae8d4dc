#pragma once

#include "reachnav/types.hpp"

#include <limits>
#include <vector>

namespace reachnav {

/// x' = A(t) x + B(t) u with A, B piecewise constant on a uniform grid
/// starting at `grid_origin`. Segment i covers
/// [grid_origin + i*grid_step, grid_origin + (i+1)*grid_step); times past
/// the last segment use the last segment.
class LinearSystem {
 public:
  LinearSystem(std::vector<Mat> A, std::vector<Mat> B, double grid_step, double grid_origin = 0.0);
  static LinearSystem constant(const Mat& A, const Mat& B);

  int n() const { return static_cast<int>(A_.front().rows()); }
  int m() const { return static_cast<int>(B_.front().cols()); }
  int segments() const { return static_cast<int>(A_.size()); }
  double grid_step() const { return grid_step_; }
  double grid_origin() const { return grid_origin_; }
  bool time_invariant() const { return A_.size() == 1; }

  int segment_at(double t) const;
  const Mat& A_at(double t) const { return A_[static_cast<std::size_t>(segment_at(t))]; }
  const Mat& B_at(double t) const { return B_[static_cast<std::size_t>(segment_at(t))]; }
  const Mat& A(int segment) const { return A_[static_cast<std::size_t>(segment)]; }
  const Mat& B(int segment) const { return B_[static_cast<std::size_t>(segment)]; }

 private:
  std::vector<Mat> A_;
  std::vector<Mat> B_;
  double grid_step_;
  double grid_origin_;
};

struct ControlBox {
  Vec lower;
  Vec upper;

  ControlBox(Vec lower, Vec upper);
  static ControlBox symmetric(const Vec& limit) { return ControlBox(-limit, limit); }
  int dim() const { return static_cast<int>(lower.size()); }
  Vec clamp(const Vec& u) const { return u.cwiseMax(lower).cwiseMin(upper); }
  bool contains(const Vec& u) const {
    return u.size() == lower.size() && (u.array() >= lower.array()).all() && (u.array() <= upper.array()).all();
  }
};

/// Three decoupled double integrators with state [x, vx, y, vy, z, vz] and
/// input [Fx/m, Fy/m, Fz/m]; the mass enters through the control box.
LinearSystem double_integrator_3d();
ControlBox force_box(const Vec3& force_limits, double mass);

inline constexpr int kPositionIndex[3] = {0, 2, 4};
inline constexpr int kVelocityIndex[3] = {1, 3, 5};

Vec3 position_of(const Vec& state);
Vec3 velocity_of(const Vec& state);
Vec make_state(const Vec3& position, const Vec3& velocity);

/// Zero-order-hold matrices for one constant segment.
struct DiscreteModel {
  Mat Ad;
  Mat Bd;
};

/// Exact ZOH of every schedule segment via the exponential of
/// [[A, B], [0, 0]] * dt. Requires 0 < dt <= grid step.
std::vector<DiscreteModel> discretize(const LinearSystem& sys, double dt);

/// Matrix exponential by scaling and squaring of a Taylor series. When the
/// matrix is nilpotent the series is summed directly and is exact.
Mat expm(const Mat& M);

}  // namespace reachnav
