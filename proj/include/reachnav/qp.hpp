#pragma once

#include "reachnav/types.hpp"

#include <optional>

namespace reachnav {

/// min 0.5 x'Hx + g'x  s.t.  Aeq x = beq,  Ain x <= bin   (H positive definite)
struct QpProblem {
  Mat H;
  Vec g;
  Mat Aeq;
  Vec beq;
  Mat Ain;
  Vec bin;
};

enum class QpStatus { Optimal, Infeasible, Stalled };

struct QpOptions {
  int max_iterations = 5000;
  double kkt_tol = 1e-4;
  double feasibility_tol = kTol.feasibility;
};

struct QpResult {
  QpStatus status = QpStatus::Infeasible;
  Vec x;
  Vec multipliers;  // one per inequality row (zero when inactive)
  int iterations = 0;
  double kkt_residual = 0.0;
};

/// Primal active-set method. Starts from `start` when it is feasible within
/// the feasibility tolerance, otherwise from an LP phase-one point.
QpResult solve_qp(const QpProblem& qp, const std::optional<Vec>& start = std::nullopt, const QpOptions& options = {});

}  // namespace reachnav
