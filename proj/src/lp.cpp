#include "reachnav/lp.hpp"

#include "reachnav/error.hpp"

#include <cmath>
#include <limits>

namespace reachnav {
namespace {

constexpr double kPivotEps = 1e-10;
constexpr double kCostEps = 1e-10;
constexpr int kDegenerateRunBeforeBland = 50;

class Tableau {
 public:
  Tableau(const Mat& M, const Vec& r) : k_(M.rows()), n_(M.cols()) {
    T_ = Mat::Zero(k_ + 1, n_ + k_ + 1);
    basis_.resize(k_);
    alive_.assign(k_, true);
    for (int i = 0; i < k_; ++i) {
      const double sign = r(i) < 0.0 ? -1.0 : 1.0;
      T_.row(i).head(n_) = sign * M.row(i);
      T_(i, n_ + i) = 1.0;
      T_(i, rhs()) = sign * r(i);
      basis_[i] = n_ + i;
    }
  }

  int rhs() const { return n_ + k_; }

  // Phase I: minimize the sum of artificials.
  bool phase_one(double infeasibility_tol) {
    T_.row(k_).setZero();
    for (int i = 0; i < k_; ++i) {
      T_.row(k_).head(n_) -= T_.row(i).head(n_);
      T_(k_, rhs()) -= T_(i, rhs());
    }
    if (!iterate()) return false;  // cannot happen: phase I is bounded below
    if (-T_(k_, rhs()) > infeasibility_tol) return false;
    drive_out_artificials();
    return true;
  }

  // Phase II with the given cost; returns false on unboundedness.
  bool phase_two(const Vec& c) {
    T_.row(k_).setZero();
    T_.row(k_).head(n_) = c.transpose();
    for (int i = 0; i < k_; ++i) {
      if (!alive_[i]) continue;
      const double cb = c(basis_[i]);
      if (cb == 0.0) continue;
      T_.row(k_).head(n_) -= cb * T_.row(i).head(n_);
      T_(k_, rhs()) -= cb * T_(i, rhs());
    }
    return iterate();
  }

  double objective() const { return -T_(k_, rhs()); }

  Vec solution() const {
    Vec y = Vec::Zero(n_);
    for (int i = 0; i < k_; ++i)
      if (alive_[i] && basis_[i] < n_) y(basis_[i]) = T_(i, rhs());
    return y;
  }

  std::vector<int> basis() const {
    std::vector<int> out;
    for (int i = 0; i < k_; ++i)
      if (alive_[i] && basis_[i] < n_) out.push_back(basis_[i]);
    return out;
  }

 private:
  void pivot(int row, int col) {
    const double p = T_(row, col);
    T_.row(row) /= p;
    for (int i = 0; i <= k_; ++i) {
      if (i == row) continue;
      const double f = T_(i, col);
      if (f != 0.0) T_.row(i) -= f * T_.row(row);
    }
    basis_[row] = col;
  }

  // Returns false when the current objective is unbounded below.
  bool iterate() {
    const long max_iter = 200L * (n_ + k_) + 1000;
    int degenerate_run = 0;
    bool bland = false;
    for (long it = 0; it < max_iter; ++it) {
      int col = -1;
      double best = -kCostEps;
      for (int j = 0; j < n_; ++j) {
        const double dj = T_(k_, j);
        if (dj < best) {
          col = j;
          if (bland) break;
          best = dj;
        }
      }
      if (col < 0) return true;

      int row = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < k_; ++i) {
        if (!alive_[i]) continue;
        const double a = T_(i, col);
        if (a <= kPivotEps) continue;
        const double ratio = T_(i, rhs()) / a;
        if (ratio < best_ratio - 1e-14 ||
            (std::abs(ratio - best_ratio) <= 1e-14 && row >= 0 && basis_[i] < basis_[row])) {
          best_ratio = ratio;
          row = i;
        }
      }
      if (row < 0) return false;
      if (best_ratio <= 1e-14) {
        if (++degenerate_run > kDegenerateRunBeforeBland) bland = true;
      } else {
        degenerate_run = 0;
      }
      pivot(row, col);
    }
    throw Error(ErrorCode::InvalidArgument, "simplex iteration limit reached");
  }

  void drive_out_artificials() {
    for (int i = 0; i < k_; ++i) {
      if (basis_[i] < n_) continue;
      int col = -1;
      double best = 1e-9;
      for (int j = 0; j < n_; ++j) {
        if (std::abs(T_(i, j)) > best) {
          best = std::abs(T_(i, j));
          col = j;
        }
      }
      if (col >= 0) {
        pivot(i, col);
      } else {
        alive_[i] = false;  // redundant equality
        T_.row(i).setZero();
      }
    }
  }

  int k_;
  int n_;
  Mat T_;
  std::vector<int> basis_;
  std::vector<bool> alive_;
};

}  // namespace

StandardLpResult solve_standard_lp(const Mat& M, const Vec& r, const Vec& c) {
  if (M.rows() != r.size() || M.cols() != c.size())
    throw Error(ErrorCode::DimensionMismatch, "standard LP shapes disagree");
  StandardLpResult out;
  Tableau tab(M, r);
  const double scale = std::max(1.0, r.cwiseAbs().maxCoeff() * (r.size() > 0 ? 1.0 : 0.0));
  if (!tab.phase_one(1e-9 * scale)) {
    out.status = LpStatus::Infeasible;
    return out;
  }
  if (!tab.phase_two(c)) {
    out.status = LpStatus::Unbounded;
    return out;
  }
  out.status = LpStatus::Optimal;
  out.objective = tab.objective();
  out.y = tab.solution();
  out.basis = tab.basis();
  return out;
}

InequalityLpResult lp_maximize(const Mat& A, const Vec& b, const Vec& g) {
  if (A.rows() != b.size() || A.cols() != g.size())
    throw Error(ErrorCode::DimensionMismatch, "inequality LP shapes disagree");
  InequalityLpResult out;
  const int d = static_cast<int>(A.cols());
  // Dual: min b'y  s.t.  A'y = g, y >= 0.
  const StandardLpResult dual = solve_standard_lp(A.transpose(), g, b);
  if (dual.status == LpStatus::Unbounded) {
    out.status = LpStatus::Infeasible;
    return out;
  }
  if (dual.status == LpStatus::Infeasible) {
    const FeasibilityResult feas = lp_feasible(A, b, BoundsCheck::Skip);
    out.status = feas.status == Feasibility::Feasible ? LpStatus::Unbounded : LpStatus::Infeasible;
    if (feas.witness) out.x = *feas.witness;
    return out;
  }
  out.status = LpStatus::Optimal;
  out.objective = dual.objective;
  // Primal point: the constraints in the dual basis hold with equality.
  const auto& basis = dual.basis;
  Mat AB(static_cast<int>(basis.size()), d);
  Vec bB(static_cast<int>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    AB.row(static_cast<int>(i)) = A.row(basis[i]);
    bB(static_cast<int>(i)) = b(basis[i]);
  }
  out.x = basis.empty() ? Vec(Vec::Zero(d)) : Vec(AB.completeOrthogonalDecomposition().solve(bB));
  return out;
}

FeasibilityResult lp_feasible(const Mat& A, const Vec& b, BoundsCheck bounds, double tol) {
  if (A.rows() != b.size()) throw Error(ErrorCode::DimensionMismatch, "normals/offsets count differs");
  const int m = static_cast<int>(A.rows());
  const int d = static_cast<int>(A.cols());
  FeasibilityResult out;
  if (m == 0) {
    if (bounds == BoundsCheck::Check && d > 0)
      throw Error(ErrorCode::Unbounded, "empty constraint system is unbounded");
    out.status = Feasibility::Feasible;
    out.witness = Vec::Zero(d);
    out.depth = 1.0;
    return out;
  }
  // max t  s.t.  A x + |A_i| t <= b,  t <= 1
  Mat Ax(m + 1, d + 1);
  Vec bx(m + 1);
  Ax.topLeftCorner(m, d) = A;
  Ax.col(d).head(m) = A.rowwise().norm();
  Ax.row(m).setZero();
  Ax(m, d) = 1.0;
  bx.head(m) = b;
  bx(m) = 1.0;
  Vec g = Vec::Zero(d + 1);
  g(d) = 1.0;
  const InequalityLpResult res = lp_maximize(Ax, bx, g);
  if (res.status != LpStatus::Optimal) {
    out.status = Feasibility::Infeasible;
    out.depth = -std::numeric_limits<double>::infinity();
    return out;
  }
  out.depth = res.objective;
  if (res.objective < -tol) {
    out.status = Feasibility::Infeasible;
    return out;
  }
  out.status = Feasibility::Feasible;
  out.witness = res.x.head(d);
  if (bounds == BoundsCheck::Check && !rows_positively_span(A))
    throw Error(ErrorCode::Unbounded, "feasible system is unbounded; supply arena bounds");
  return out;
}

bool rows_positively_span(const Mat& A) {
  const int m = static_cast<int>(A.rows());
  const int d = static_cast<int>(A.cols());
  if (m <= d) return false;
  Eigen::FullPivLU<Mat> lu(A);
  if (lu.rank() < d) return false;
  // A strictly positive y with A'y = 0 exists: y = 1 + w, w >= 0.
  const Vec rhs = -A.transpose() * Vec::Ones(m);
  const StandardLpResult res = solve_standard_lp(A.transpose(), rhs, Vec::Zero(m));
  return res.status == LpStatus::Optimal;
}

}  // namespace reachnav
