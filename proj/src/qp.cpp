#include "reachnav/qp.hpp"

#include "reachnav/error.hpp"
#include "reachnav/lp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace reachnav {
namespace {

double max_violation(const QpProblem& qp, const Vec& x) {
  double v = 0.0;
  if (qp.Aeq.rows() > 0) v = std::max(v, (qp.Aeq * x - qp.beq).cwiseAbs().maxCoeff());
  if (qp.Ain.rows() > 0) v = std::max(v, (qp.Ain * x - qp.bin).maxCoeff());
  return v;
}

std::optional<Vec> phase_one(const QpProblem& qp, double tol) {
  const int n = static_cast<int>(qp.H.rows());
  const int me = static_cast<int>(qp.Aeq.rows());
  const int mi = static_cast<int>(qp.Ain.rows());
  Mat A(2 * me + mi, n);
  Vec b(2 * me + mi);
  if (me > 0) {
    A.topRows(me) = qp.Aeq;
    A.middleRows(me, me) = -qp.Aeq;
    b.head(me) = qp.beq;
    b.segment(me, me) = -qp.beq;
  }
  if (mi > 0) {
    A.bottomRows(mi) = qp.Ain;
    b.tail(mi) = qp.bin;
  }
  const FeasibilityResult feas = lp_feasible(A, b, BoundsCheck::Skip, tol);
  if (feas.status != Feasibility::Feasible) return std::nullopt;
  Vec x = *feas.witness;
  if (me > 0) {
    // Snap onto the equality manifold.
    const Vec r = qp.beq - qp.Aeq * x;
    x += qp.Aeq.transpose() * (qp.Aeq * qp.Aeq.transpose()).ldlt().solve(r);
  }
  return x;
}

}  // namespace

QpResult solve_qp(const QpProblem& qp_in, const std::optional<Vec>& start, const QpOptions& options) {
  QpProblem qp = qp_in;
  const int n = static_cast<int>(qp.H.rows());
  if (qp.H.cols() != n || qp.g.size() != n) throw Error(ErrorCode::DimensionMismatch, "QP objective shapes");
  if (qp.Aeq.size() == 0) {
    qp.Aeq.resize(0, n);
    qp.beq.resize(0);
  }
  if (qp.Ain.size() == 0) {
    qp.Ain.resize(0, n);
    qp.bin.resize(0);
  }
  if (qp.Aeq.cols() != n || qp.Ain.cols() != n || qp.Aeq.rows() != qp.beq.size() || qp.Ain.rows() != qp.bin.size())
    throw Error(ErrorCode::DimensionMismatch, "QP constraint shapes");
  const int me = static_cast<int>(qp.Aeq.rows());
  const int mi = static_cast<int>(qp.Ain.rows());

  QpResult out;
  Vec x;
  if (start && start->size() == n && max_violation(qp, *start) <= options.feasibility_tol) {
    x = *start;
  } else {
    auto p1 = phase_one(qp, options.feasibility_tol);
    if (!p1) {
      out.status = QpStatus::Infeasible;
      return out;
    }
    x = *p1;
  }

  const Eigen::LLT<Mat> llt(qp.H);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::InvalidArgument, "QP Hessian is not positive definite");
  const Mat Hinv = llt.solve(Mat::Identity(n, n));

  std::vector<int> working;  // inequality rows
  std::vector<char> in_working(mi, 0);
  Vec lambda_eq = Vec::Zero(me);
  Vec lambda_w;
  const double scale = 1.0 + qp.g.cwiseAbs().maxCoeff();

  auto build_active = [&]() {
    Mat AW(me + static_cast<int>(working.size()), n);
    if (me > 0) AW.topRows(me) = qp.Aeq;
    for (std::size_t i = 0; i < working.size(); ++i) AW.row(me + static_cast<int>(i)) = qp.Ain.row(working[i]);
    return AW;
  };

  bool converged = false;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const Vec grad = qp.H * x + qp.g;
    const Mat AW = build_active();
    Vec p;
    Vec lambda;
    if (AW.rows() == 0) {
      p = -Hinv * grad;
    } else {
      const Mat HinvAt = Hinv * AW.transpose();
      const Mat M = AW * HinvAt;
      lambda = -M.ldlt().solve(AW * (Hinv * grad));
      p = -Hinv * grad - HinvAt * lambda;
    }

    if (p.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + x.cwiseAbs().maxCoeff())) {
      int drop = -1;
      double most_negative = -1e-10 * scale;
      for (std::size_t i = 0; i < working.size(); ++i) {
        const double li = lambda(me + static_cast<int>(i));
        if (li < most_negative) {
          most_negative = li;
          drop = static_cast<int>(i);
        }
      }
      if (drop < 0) {
        lambda_eq = me > 0 ? Vec(lambda.head(me)) : Vec();
        lambda_w = AW.rows() > me ? Vec(lambda.tail(AW.rows() - me)) : Vec();
        converged = true;
        break;
      }
      in_working[working[drop]] = 0;
      working.erase(working.begin() + drop);
      continue;
    }

    double alpha = 1.0;
    int block = -1;
    for (int i = 0; i < mi; ++i) {
      if (in_working[i]) continue;
      const double ap = qp.Ain.row(i).dot(p);
      if (ap <= 1e-14) continue;
      const double slack = std::max(0.0, qp.bin(i) - qp.Ain.row(i).dot(x));
      const double ai = slack / ap;
      if (ai < alpha) {
        alpha = ai;
        block = i;
      }
    }
    x += alpha * p;
    if (block >= 0) {
      working.push_back(block);
      in_working[block] = 1;
    }
  }

  out.x = x;
  out.iterations = it;
  out.multipliers = Vec::Zero(mi);
  if (converged)
    for (std::size_t i = 0; i < working.size(); ++i) out.multipliers(working[i]) = lambda_w(static_cast<int>(i));

  Vec stationarity = qp.H * x + qp.g + qp.Ain.transpose() * out.multipliers;
  if (me > 0 && lambda_eq.size() == me) stationarity += qp.Aeq.transpose() * lambda_eq;
  out.kkt_residual = std::max({stationarity.cwiseAbs().maxCoeff(), max_violation(qp, x),
                               mi > 0 ? std::max(0.0, -out.multipliers.minCoeff()) : 0.0});
  out.status = converged && out.kkt_residual <= options.kkt_tol * scale ? QpStatus::Optimal : QpStatus::Stalled;
  return out;
}

}  // namespace reachnav
