#pragma once

#include "reachnav/types.hpp"

#include <optional>
#include <vector>

namespace reachnav {

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// Solution of `min c'y  s.t.  M y = r, y >= 0`.
struct StandardLpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  Vec y;
  std::vector<int> basis;  // column indices of the final basis
};

/// Dense two-phase tableau simplex. Dantzig pricing with a switch to Bland's
/// rule after a run of degenerate pivots, so it terminates on degenerate
/// geometry. Intended for few rows and many columns.
StandardLpResult solve_standard_lp(const Mat& M, const Vec& r, const Vec& c);

/// Solution of `max g'x  s.t.  A x <= b` with x free.
struct InequalityLpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  Vec x;
};

/// Solves the inequality LP through its dual, which has one row per
/// variable. Unbounded is reported only when the system is feasible.
InequalityLpResult lp_maximize(const Mat& A, const Vec& b, const Vec& g);

enum class Feasibility { Feasible, Infeasible };

struct FeasibilityResult {
  Feasibility status = Feasibility::Infeasible;
  std::optional<Vec> witness;
  /// Largest uniform slack t with A x + |A_i| t <= b (negative when empty).
  double depth = 0.0;
};

enum class BoundsCheck { Check, Skip };

/// Feasibility of `A x <= b`. The witness is the deepest point of the
/// system (Chebyshev-style center with depth capped at 1). With
/// BoundsCheck::Check a feasible but unbounded system throws Unbounded.
FeasibilityResult lp_feasible(const Mat& A, const Vec& b, BoundsCheck bounds = BoundsCheck::Check,
                              double tol = kTol.feasibility);

/// True when `{x : A x <= b}` is bounded, assuming it is nonempty.
bool rows_positively_span(const Mat& A);

}  // namespace reachnav
