#include "reachnav/linear_system.hpp"

#include "reachnav/error.hpp"

#include <cmath>

namespace reachnav {

LinearSystem::LinearSystem(std::vector<Mat> A, std::vector<Mat> B, double grid_step, double grid_origin)
    : A_(std::move(A)), B_(std::move(B)), grid_step_(grid_step), grid_origin_(grid_origin) {
  if (A_.empty() || A_.size() != B_.size()) throw Error(ErrorCode::GridMismatch, "A and B schedules must share the grid");
  if (!(grid_step_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid step must be positive");
  const Eigen::Index n = A_.front().rows();
  const Eigen::Index m = B_.front().cols();
  if (n == 0 || m == 0) throw Error(ErrorCode::DimensionMismatch, "empty system");
  for (std::size_t i = 0; i < A_.size(); ++i) {
    if (A_[i].rows() != n || A_[i].cols() != n || B_[i].rows() != n || B_[i].cols() != m)
      throw Error(ErrorCode::DimensionMismatch, "inconsistent schedule matrix shapes");
    if (!A_[i].allFinite() || !B_[i].allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite system matrix");
  }
}

LinearSystem LinearSystem::constant(const Mat& A, const Mat& B) {
  return LinearSystem({A}, {B}, std::numeric_limits<double>::infinity());
}

int LinearSystem::segment_at(double t) const {
  if (A_.size() == 1) return 0;
  const double s = std::floor((t - grid_origin_) / grid_step_);
  if (s <= 0.0) return 0;
  const double last = static_cast<double>(A_.size() - 1);
  return static_cast<int>(std::min(s, last));
}

ControlBox::ControlBox(Vec lo, Vec hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size()) throw Error(ErrorCode::DimensionMismatch, "control box bounds differ in size");
  if (!lower.allFinite() || !upper.allFinite()) throw Error(ErrorCode::InvalidArgument, "control box bounds must be finite");
  if ((lower.array() > upper.array()).any()) throw Error(ErrorCode::InvalidArgument, "control box lower > upper");
}

LinearSystem double_integrator_3d() {
  Mat A = Mat::Zero(6, 6);
  Mat B = Mat::Zero(6, 3);
  for (int k = 0; k < 3; ++k) {
    A(kPositionIndex[k], kVelocityIndex[k]) = 1.0;
    B(kVelocityIndex[k], k) = 1.0;
  }
  return LinearSystem::constant(A, B);
}

ControlBox force_box(const Vec3& force_limits, double mass) {
  if (!(mass > 0.0)) throw Error(ErrorCode::InvalidArgument, "mass must be positive");
  if ((force_limits.array() < 0.0).any()) throw Error(ErrorCode::InvalidArgument, "force limits must be nonnegative");
  return ControlBox::symmetric(force_limits / mass);
}

Vec3 position_of(const Vec& s) { return Vec3(s(kPositionIndex[0]), s(kPositionIndex[1]), s(kPositionIndex[2])); }
Vec3 velocity_of(const Vec& s) { return Vec3(s(kVelocityIndex[0]), s(kVelocityIndex[1]), s(kVelocityIndex[2])); }

Vec make_state(const Vec3& p, const Vec3& v) {
  Vec s(6);
  for (int k = 0; k < 3; ++k) {
    s(kPositionIndex[k]) = p(k);
    s(kVelocityIndex[k]) = v(k);
  }
  return s;
}

Mat expm(const Mat& M) {
  const Eigen::Index n = M.rows();
  const Mat I = Mat::Identity(n, n);

  // Direct summation when M is nilpotent (M^n = 0).
  {
    Mat term = I, sum = I;
    for (Eigen::Index k = 1; k <= n; ++k) {
      term = term * M / static_cast<double>(k);
      if (term.isZero(0.0)) return sum;
      sum += term;
    }
  }

  const double norm = M.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Mat S = M / std::ldexp(1.0, squarings);
  Mat term = I, E = I;
  for (int k = 1; k <= 20; ++k) {
    term = term * S / static_cast<double>(k);
    E += term;
    if (term.cwiseAbs().maxCoeff() <= 1e-18 * E.cwiseAbs().maxCoeff()) break;
  }
  for (int i = 0; i < squarings; ++i) E = E * E;
  return E;
}

std::vector<DiscreteModel> discretize(const LinearSystem& sys, double dt) {
  if (!(dt > 0.0) || dt > sys.grid_step() * (1.0 + 1e-12))
    throw Error(ErrorCode::InvalidArgument, "discretization step must be positive and at most the grid step");
  const int n = sys.n(), m = sys.m();
  std::vector<DiscreteModel> out;
  out.reserve(static_cast<std::size_t>(sys.segments()));
  for (int s = 0; s < sys.segments(); ++s) {
    Mat aug = Mat::Zero(n + m, n + m);
    aug.topLeftCorner(n, n) = sys.A(s) * dt;
    aug.topRightCorner(n, m) = sys.B(s) * dt;
    const Mat E = expm(aug);
    out.push_back({E.topLeftCorner(n, n), E.topRightCorner(n, m)});
  }
  return out;
}

}  // namespace reachnav
