#include "reachnav/planner.hpp"

#include "reachnav/distance.hpp"
#include "reachnav/error.hpp"
#include "reachnav/hull.hpp"
#include "reachnav/lp.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace reachnav {
namespace {

const PositionIndices kPos{kPositionIndex[0], kPositionIndex[1], kPositionIndex[2]};
const std::vector<int> kVel{kVelocityIndex[0], kVelocityIndex[1], kVelocityIndex[2]};

Mat selector(const std::vector<int>& rows, int n) {
  Mat S = Mat::Zero(static_cast<Eigen::Index>(rows.size()), n);
  for (std::size_t i = 0; i < rows.size(); ++i) S(static_cast<Eigen::Index>(i), rows[i]) = 1.0;
  return S;
}

// Signed distance of p to facet j of h (positive outside).
double facet_sd(const HPolytope& h, int j, const Vec3& p) { return h.normals().row(j).dot(p) - h.offset(j); }

std::vector<double> tube_times(double dt, double lookahead) {
  std::vector<double> out;
  for (int k = 1;; ++k) {
    const double tau = k * dt;
    if (tau >= lookahead - 1e-9 * dt) break;
    out.push_back(tau);
  }
  out.push_back(lookahead);
  return out;
}

double min_clearance_at(const Scenario& s, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  const VPolytope body = translate(s.robot, Vec(p));
  for (const auto& o : s.obstacles) best = std::min(best, polytope_distance(body, o).distance);
  return best;
}

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::vector<CSpaceObstacle> build_cspace(const std::vector<VPolytope>& obstacles, const VPolytope& robot) {
  const VPolytope neg = reflect(robot);
  std::vector<CSpaceObstacle> out;
  out.reserve(obstacles.size());
  for (const VPolytope& o : obstacles) {
    if (o.dim() != robot.dim()) throw Error(ErrorCode::DimensionMismatch, "robot and obstacle dimensions differ");
    Hull h = convex_hull(minkowski_sum(o, neg).vertices());
    out.push_back({std::move(h.vertices), std::move(h.facets)});
  }
  return out;
}

std::vector<bool> certify_safe(const ReachPolytope& reach, const std::vector<HPolytope>& inflated, double margin) {
  const HPolytope r = reach.position_hpolytope();
  std::vector<bool> out;
  out.reserve(inflated.size());
  for (const HPolytope& o : inflated) {
    if (o.dim() != r.dim()) throw Error(ErrorCode::DimensionMismatch, "obstacle dimension differs from reach facets");
    Mat A(r.num_facets() + o.num_facets(), r.dim());
    A << r.normals(), o.normals();
    Vec b(A.rows());
    b << r.offsets(), o.offsets().array() + margin;
    out.push_back(lp_feasible(A, b, BoundsCheck::Skip).status == Feasibility::Infeasible);
  }
  return out;
}

PlannerContext::PlannerContext(const Scenario& scenario, const PlannerParams& params)
    : scenario_(scenario),
      params_(params),
      cspace_(build_cspace(scenario.obstacles, scenario.robot)),
      goal_h_(convex_hull(scenario.goal.vertices()).facets),
      models_(discretize(scenario.system, params.dt)),
      directions_(default_directions(scenario.system.n(), kPos, kVel, params.facet_directions)),
      tube_offsets_(tube_times(params.dt, params.lookahead)) {
  if (scenario.system.n() != 6 || scenario.system.m() != 3)
    throw Error(ErrorCode::InvalidScenario, "planner expects the 6-state, 3-input point-mass model");
  position_bounds_.min = scenario.arena.min - Vec3(scenario.robot.lower_corner());
  position_bounds_.max = scenario.arena.max - Vec3(scenario.robot.upper_corner());
  if (scenario.system.time_invariant())
    cache_.emplace(scenario.system, scenario.u_box, tube_offsets_, directions_, params.reach_dt, kPos);
}

const DiscreteModel& PlannerContext::model_at(double t) const {
  return models_[static_cast<std::size_t>(scenario_.system.segment_at(t + 0.5 * params_.dt))];
}

std::vector<ReachPolytope> PlannerContext::reach_tube_from(const Vec& state, double t) const {
  if (cache_) return cache_->tube(state, t);
  std::vector<double> times;
  for (double tau : tube_offsets_) times.push_back(t + tau);
  return reach_tube(scenario_.system, VPolytope::point(state), scenario_.u_box, t, times, directions_, params_.reach_dt, kPos);
}

MpcResult mpc_step(const Vec& state, double t, const PlannerContext& ctx, const Vec& warm_start) {
  const Scenario& sc = ctx.scenario();
  const PlannerParams& prm = ctx.params();
  const int n = sc.system.n(), m = sc.system.m(), N = prm.horizon_steps, nu = m * N;
  if (state.size() != n) throw Error(ErrorCode::DimensionMismatch, "state dimension");

  // Condensed prediction x_k = Sx[k] x + Su[k] U.
  std::vector<Mat> Sx(static_cast<std::size_t>(N + 1)), Su(static_cast<std::size_t>(N + 1));
  Sx[0] = Mat::Identity(n, n);
  Su[0] = Mat::Zero(n, nu);
  for (int k = 0; k < N; ++k) {
    const DiscreteModel& dm = ctx.model_at(t + k * prm.dt);
    Sx[static_cast<std::size_t>(k + 1)] = dm.Ad * Sx[static_cast<std::size_t>(k)];
    Su[static_cast<std::size_t>(k + 1)] = dm.Ad * Su[static_cast<std::size_t>(k)];
    Su[static_cast<std::size_t>(k + 1)].middleCols(k * m, m) += dm.Bd;
  }
  const Mat P = selector(kPos, n), V = selector(kVel, n);

  Vec U0 = warm_start.size() == nu ? warm_start : Vec::Zero(nu);
  U0 = U0.cwiseMax(sc.u_box.lower.replicate(N, 1)).cwiseMin(sc.u_box.upper.replicate(N, 1));
  std::vector<Vec3> guess(static_cast<std::size_t>(N + 1));
  for (int k = 0; k <= N; ++k)
    guess[static_cast<std::size_t>(k)] = P * (Sx[static_cast<std::size_t>(k)] * state + Su[static_cast<std::size_t>(k)] * U0);

  MpcResult res;
  const Vec3 p0 = guess[0];
  res.goal_target = project_point(Vec(p0), ctx.goal_facets()).closest_b;

  QpProblem qp;
  const Mat GN = P * Su[static_cast<std::size_t>(N)];
  const Vec3 pfree = P * Sx[static_cast<std::size_t>(N)] * state;
  qp.H = 2.0 * (GN.transpose() * GN + prm.control_weight * Mat::Identity(nu, nu));
  qp.g = 2.0 * GN.transpose() * (pfree - res.goal_target);
  qp.Aeq = V * Su[static_cast<std::size_t>(N)];
  qp.beq = -V * Sx[static_cast<std::size_t>(N)] * state;

  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> rhs;
  auto add = [&](const Eigen::RowVectorXd& a, double b) {
    rows.push_back(a);
    rhs.push_back(b);
  };
  for (int j = 0; j < nu; ++j) {
    Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(nu);
    e(j) = 1.0;
    add(e, sc.u_box.upper(j % m));
    add(-e, -sc.u_box.lower(j % m));
  }
  const Vec ubox_width = (sc.u_box.upper - sc.u_box.lower).replicate(N, 1);
  std::vector<double> reach_radius(static_cast<std::size_t>(N + 1), 0.0);
  for (int k = 1; k <= N; ++k) {
    const Mat Gk = P * Su[static_cast<std::size_t>(k)];
    const Vec3 fk = P * Sx[static_cast<std::size_t>(k)] * state;
    reach_radius[static_cast<std::size_t>(k)] = (Gk.cwiseAbs() * ubox_width).norm();
    for (int a = 0; a < 3; ++a) {
      add(Gk.row(a), ctx.position_bounds().max(a) - fk(a));
      add(-Gk.row(a), fk(a) - ctx.position_bounds().min(a));
    }
  }

  // Separating-facet convexification, one facet per obstacle and segment.
  const double margin = prm.safety_margin;
  auto impose = [&](int k, int i, const HPolytope& h, int j) {
    const Vec3 hn = h.normal(j);
    // Drop constraints that no admissible input sequence can violate.
    if (hn.dot(guess[static_cast<std::size_t>(k)]) - reach_radius[static_cast<std::size_t>(k)] >= h.offset(j) + margin) return;
    const Mat Gk = P * Su[static_cast<std::size_t>(k)];
    const Vec3 fk = P * Sx[static_cast<std::size_t>(k)] * state;
    add(-(hn.transpose() * Gk), hn.dot(fk) - h.offset(j) - margin);
    res.constraints.push_back({k, i, hn, h.offset(j)});
  };
  for (std::size_t i = 0; i < ctx.cspace().size(); ++i) {
    const HPolytope& h = ctx.cspace()[i].facets;
    for (int k = 1; k <= N; ++k) {
      int best = 0;
      double best_sd = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < h.num_facets(); ++j) {
        const double sd = std::min(facet_sd(h, j, guess[static_cast<std::size_t>(k - 1)]), facet_sd(h, j, guess[static_cast<std::size_t>(k)]));
        if (sd > best_sd) {
          best_sd = sd;
          best = j;
        }
      }
      if (k >= 2) impose(k - 1, static_cast<int>(i), h, best);
      impose(k, static_cast<int>(i), h, best);
    }
  }
  qp.Ain.resize(static_cast<Eigen::Index>(rows.size()), nu);
  qp.bin.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    qp.Ain.row(static_cast<Eigen::Index>(r)) = rows[r];
    qp.bin(static_cast<Eigen::Index>(r)) = rhs[r];
  }

  QpOptions opts;
  opts.max_iterations = 5000;
  opts.kkt_tol = 1e-4;
  const QpResult sol = solve_qp(qp, U0, opts);
  res.iterations = sol.iterations;
  if (sol.status == QpStatus::Infeasible) {
    res.status = MpcStatus::Infeasible;
    return res;
  }
  res.status = sol.status == QpStatus::Optimal ? MpcStatus::Optimal : MpcStatus::SolverStall;
  res.controls = sol.x;
  res.control = sol.x.head(m);
  for (int k = 0; k <= N; ++k)
    res.predicted.push_back(Sx[static_cast<std::size_t>(k)] * state + Su[static_cast<std::size_t>(k)] * sol.x);
  return res;
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::GoalReached:
      return "GoalReached";
    case Outcome::Timeout:
      return "Timeout";
    case Outcome::InfeasibleStop:
      return "InfeasibleStop";
  }
  return "Unknown";
}

Trajectory run(const Scenario& scenario) { return run(scenario, scenario.params); }

Trajectory run(const Scenario& scenario, const PlannerParams& params, const RunOptions& options) {
  if (!(params.dt > 0.0) || !(params.lookahead > 0.0) || params.horizon_steps < 1 || !(params.max_sim_time > 0.0))
    throw Error(ErrorCode::InvalidScenario, "planner parameters must be positive");
  if (scenario.x0.size() != 1) throw Error(ErrorCode::InvalidScenario, "planner needs a single initial state");
  const PlannerContext ctx(scenario, params);
  std::vector<HPolytope> inflated;
  for (const auto& c : ctx.cspace()) inflated.push_back(c.facets);
  const ControlBox& box = scenario.u_box;
  const int m = scenario.system.m();
  const int N = params.horizon_steps;
  const int max_steps = static_cast<int>(std::floor(params.max_sim_time / params.dt + 1e-9));

  Trajectory traj;
  Vec x = scenario.initial_state();
  Vec warm = Vec::Zero(m * N);
  for (int step = 0;; ++step) {
    const double t = step * params.dt;
    const Vec3 p = position_of(x);
    TrajectorySample sample;
    sample.t = t;
    sample.state = x;
    sample.control = box.clamp(Vec::Zero(m));
    sample.diag.dist_to_goal = project_point(Vec(p), ctx.goal_facets()).distance;
    sample.diag.min_clearance = min_clearance_at(scenario, p);

    if (contains(ctx.goal_facets(), Vec(p), params.goal_tol)) {
      traj.outcome = Outcome::GoalReached;
      traj.samples.push_back(sample);
      break;
    }
    if (step >= max_steps) {
      traj.outcome = Outcome::Timeout;
      traj.samples.push_back(sample);
      break;
    }

    const auto tube = ctx.reach_tube_from(x, t);
    bool safe = true;
    for (const auto& r : tube)
      for (bool ok : certify_safe(r, inflated, params.safety_margin)) safe = safe && ok;
    sample.diag.safe_cert = safe;
    sample.diag.reach_goal_distance = polytope_distance(scenario.goal, h_to_v(tube.back().position_hpolytope())).distance;
    if (options.snapshot_stride > 0 && step % options.snapshot_stride == 0) {
      traj.reach_snapshots.push_back(tube);
      traj.snapshot_steps.push_back(step);
    }

    const MpcResult mpc = mpc_step(x, t, ctx, warm);
    sample.diag.qp_iterations = mpc.iterations;
    Vec u;
    if (mpc.status == MpcStatus::Optimal) {
      u = box.clamp(mpc.control);
      warm = Vec::Zero(m * N);
      warm.head(m * (N - 1)) = mpc.controls.tail(m * (N - 1));
    } else {
      const Vec3 v = velocity_of(x);
      sample.diag.fallback = true;
      warm = Vec::Zero(m * N);
      if (v.norm() == 0.0) {
        // At rest and still infeasible: the problem will not change.
        traj.outcome = Outcome::InfeasibleStop;
        traj.samples.push_back(sample);
        break;
      }
      u = box.clamp(Vec(-v / params.dt));
    }
    sample.control = u;
    traj.samples.push_back(sample);
    const DiscreteModel& dm = ctx.model_at(t);
    x = dm.Ad * x + dm.Bd * u;
  }
  return traj;
}

VerificationReport verify_trajectory(const Trajectory& traj, const Scenario& scenario) {
  VerificationReport rep;
  rep.min_clearance = std::numeric_limits<double>::infinity();
  if (traj.samples.empty()) return rep;
  const std::vector<CSpaceObstacle> cspace = build_cspace(scenario.obstacles, scenario.robot);
  const double dt = traj.samples.size() > 1 ? traj.samples[1].t - traj.samples[0].t : scenario.params.dt;
  const std::vector<DiscreteModel> models = discretize(scenario.system, dt);
  constexpr int kSub = 5;

  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const auto& s = traj.samples[k];
    const bool last = k + 1 == traj.samples.size();
    if (!last) {
      const auto& dm = models[static_cast<std::size_t>(scenario.system.segment_at(s.t + 0.5 * dt))];
      const Vec pred = dm.Ad * s.state + dm.Bd * s.control;
      rep.max_dynamics_residual = std::max(rep.max_dynamics_residual, (pred - traj.samples[k + 1].state).cwiseAbs().maxCoeff());
    }
    for (int sub = 0; sub < (last ? 1 : kSub); ++sub) {
      const double f = static_cast<double>(sub) / kSub;
      const Vec state = last ? s.state : Vec((1.0 - f) * s.state + f * traj.samples[k + 1].state);
      const Vec3 p = position_of(state);
      const VPolytope body = translate(scenario.robot, Vec(p));
      for (std::size_t i = 0; i < scenario.obstacles.size(); ++i) {
        const double d = polytope_distance(body, scenario.obstacles[i]).distance;
        rep.min_clearance = std::min(rep.min_clearance, d);
        if (d < 1e-9) {
          const Vec slack = cspace[i].facets.offsets() - cspace[i].facets.normals() * p;
          rep.violations.push_back({static_cast<int>(k), f, static_cast<int>(i), std::max(0.0, slack.minCoeff())});
        }
      }
    }
  }
  return rep;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = std::string(kTrajectoryCsvHeader) + "\n";
  for (const auto& s : traj.samples) {
    const Vec3 p = position_of(s.state), v = velocity_of(s.state);
    out += g9(s.t);
    for (int k = 0; k < 3; ++k) out += "," + g9(p(k));
    for (int k = 0; k < 3; ++k) out += "," + g9(v(k));
    for (int k = 0; k < 3; ++k) out += "," + g9(s.control(k));
    out += "," + g9(s.diag.dist_to_goal) + "," + g9(s.diag.min_clearance) + "," + (s.diag.safe_cert ? "1" : "0") + "\n";
  }
  return out;
}

Trajectory parse_trajectory_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::SchemaError, "empty trajectory CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTrajectoryCsvHeader) throw Error(ErrorCode::SchemaError, "unexpected trajectory CSV header");
  Trajectory traj;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(v))
        throw Error(ErrorCode::SchemaError, "trajectory CSV row " + std::to_string(row) + ": bad value '" + cell + "'");
      f.push_back(v);
    }
    if (f.size() != 13) throw Error(ErrorCode::SchemaError, "trajectory CSV row " + std::to_string(row) + ": expected 13 fields");
    TrajectorySample s;
    s.t = f[0];
    s.state = make_state(Vec3(f[1], f[2], f[3]), Vec3(f[4], f[5], f[6]));
    s.control = Vec3(f[7], f[8], f[9]);
    s.diag.dist_to_goal = f[10];
    s.diag.min_clearance = f[11];
    s.diag.safe_cert = f[12] != 0.0;
    traj.samples.push_back(std::move(s));
  }
  return traj;
}

namespace {

using Json = nlohmann::ordered_json;

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json vertices_json(const VPolytope& p) {
  Json a = Json::array();
  for (int i = 0; i < p.size(); ++i) a.push_back(vec_json(p.vertex(i)));
  return a;
}

Json facets_json(const HPolytope& h) {
  Json normals = Json::array();
  for (int j = 0; j < h.num_facets(); ++j) normals.push_back(vec_json(h.normal(j)));
  return Json{{"normals", normals}, {"offsets", vec_json(h.offsets())}};
}

Json box_json(const Box3& b) { return Json{{"min", vec_json(b.min)}, {"max", vec_json(b.max)}}; }

}  // namespace

std::string report_json(const VerificationReport& report) {
  Json v = Json::array();
  for (const auto& x : report.violations)
    v.push_back(Json{{"step", x.step}, {"fraction", x.fraction}, {"obstacle", x.obstacle}, {"depth", x.depth}});
  Json out{{"violations", v}, {"max_dynamics_residual", report.max_dynamics_residual}};
  // Infinite clearance (no obstacles) is not representable in JSON.
  if (std::isfinite(report.min_clearance))
    out["min_clearance"] = report.min_clearance;
  else
    out["min_clearance"] = nullptr;
  return out.dump(2) + "\n";
}

std::string plot_json(const Scenario& scenario, const PlannerContext& ctx, const Trajectory& traj) {
  Json out;
  out["arena"] = box_json(scenario.arena);
  out["robot"] = Json{{"vertices", vertices_json(scenario.robot)}};
  out["goal"] = Json{{"vertices", vertices_json(scenario.goal)}, {"facets", facets_json(ctx.goal_facets())}};
  Json obs = Json::array();
  for (std::size_t i = 0; i < scenario.obstacles.size(); ++i)
    obs.push_back(Json{{"vertices", vertices_json(scenario.obstacles[i])},
                       {"cspace_vertices", vertices_json(ctx.cspace()[i].vertices)},
                       {"cspace_facets", facets_json(ctx.cspace()[i].facets)}});
  out["obstacles"] = obs;
  Json samples = Json::array();
  for (const auto& s : traj.samples)
    samples.push_back(Json{{"t", s.t},
                           {"position", vec_json(position_of(s.state))},
                           {"velocity", vec_json(velocity_of(s.state))},
                           {"control", vec_json(s.control)},
                           {"dist_to_goal", s.diag.dist_to_goal},
                           {"reach_goal_distance", s.diag.reach_goal_distance},
                           {"safe_cert", s.diag.safe_cert},
                           {"fallback", s.diag.fallback}});
  out["trajectory"] = samples;
  Json snaps = Json::array();
  for (std::size_t k = 0; k < traj.reach_snapshots.size(); ++k) {
    Json tube = Json::array();
    for (const auto& r : traj.reach_snapshots[k]) {
      const HPolytope h = r.position_hpolytope();
      Json e = facets_json(h);
      e["time"] = r.time;
      e["vertices"] = vertices_json(h_to_v(h));
      tube.push_back(e);
    }
    snaps.push_back(Json{{"step", traj.snapshot_steps[k]}, {"tube", tube}});
  }
  out["reach_snapshots"] = snaps;
  out["outcome"] = to_string(traj.outcome);
  return out.dump(2) + "\n";
}

}  // namespace reachnav
