#pragma once

#include "reachnav/linear_system.hpp"
#include "reachnav/polytope.hpp"
#include "reachnav/qp.hpp"
#include "reachnav/reach.hpp"
#include "reachnav/scenario.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace reachnav {

struct CSpaceObstacle {
  VPolytope vertices;
  HPolytope facets;
};

/// O_i (+) reflect(S) for every obstacle, in both representations.
std::vector<CSpaceObstacle> build_cspace(const std::vector<VPolytope>& obstacles, const VPolytope& robot);

/// Per obstacle: true when the reach position facets and the obstacle grown
/// by `margin` have no common point.
std::vector<bool> certify_safe(const ReachPolytope& reach, const std::vector<HPolytope>& inflated_obstacles, double margin);

/// Halfspace <normal, p_step> >= offset + margin imposed on a predicted position.
struct AvoidanceConstraint {
  int step = 0;  // 1..N
  int obstacle = 0;
  Vec3 normal = Vec3::Zero();
  double offset = 0.0;
};

enum class MpcStatus { Optimal, Infeasible, SolverStall };

struct MpcResult {
  MpcStatus status = MpcStatus::Infeasible;
  Vec control;                     // first input
  Vec controls;                    // all N inputs stacked
  std::vector<Vec> predicted;      // states x_0..x_N
  std::vector<AvoidanceConstraint> constraints;
  Vec3 goal_target = Vec3::Zero();
  int iterations = 0;
};

/// Everything the receding-horizon loop reuses between steps.
class PlannerContext {
 public:
  PlannerContext(const Scenario& scenario, const PlannerParams& params);

  const Scenario& scenario() const { return scenario_; }
  const PlannerParams& params() const { return params_; }
  const std::vector<CSpaceObstacle>& cspace() const { return cspace_; }
  const HPolytope& goal_facets() const { return goal_h_; }
  /// Feasible region for the reference point imposed by the arena.
  const Box3& position_bounds() const { return position_bounds_; }

  /// Zero-order-hold model of the step starting at time t.
  const DiscreteModel& model_at(double t) const;
  std::vector<ReachPolytope> reach_tube_from(const Vec& state, double t) const;
  const std::vector<Vec>& directions() const { return directions_; }

 private:
  const Scenario& scenario_;
  PlannerParams params_;
  std::vector<CSpaceObstacle> cspace_;
  HPolytope goal_h_;
  Box3 position_bounds_;
  std::vector<DiscreteModel> models_;
  std::vector<Vec> directions_;
  std::vector<double> tube_offsets_;
  std::optional<LtiReachCache> cache_;
};

/// One constrained receding-horizon solve from `state` at time t.
/// `warm_start` holds N stacked inputs (empty means zeros).
MpcResult mpc_step(const Vec& state, double t, const PlannerContext& ctx, const Vec& warm_start);

enum class Outcome { GoalReached, Timeout, InfeasibleStop };
std::string to_string(Outcome outcome);

struct StepDiagnostics {
  double dist_to_goal = 0.0;         // reference point to goal polytope
  double min_clearance = 0.0;        // robot body to nearest obstacle
  bool safe_cert = false;            // reach tube certified against every inflated obstacle
  double reach_goal_distance = 0.0;  // goal to the last reach snapshot (position)
  bool fallback = false;
  int qp_iterations = 0;
};

struct TrajectorySample {
  double t = 0.0;
  Vec state;
  Vec control;
  StepDiagnostics diag;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  Outcome outcome = Outcome::Timeout;
  /// Reach tube computed at every `snapshot_stride`-th step (plot data).
  std::vector<std::vector<ReachPolytope>> reach_snapshots;
  std::vector<int> snapshot_steps;
};

struct RunOptions {
  int snapshot_stride = 10;
};

Trajectory run(const Scenario& scenario, const PlannerParams& params, const RunOptions& options = {});
Trajectory run(const Scenario& scenario);

struct Violation {
  int step = 0;         // sample index; sub-samples report the earlier sample
  double fraction = 0;  // position inside the step at dt/5 resolution
  int obstacle = 0;
  double depth = 0.0;   // penetration estimate (0 when merely touching)
};

struct VerificationReport {
  std::vector<Violation> violations;
  double max_dynamics_residual = 0.0;
  double min_clearance = 0.0;
};

VerificationReport verify_trajectory(const Trajectory& traj, const Scenario& scenario);

std::string trajectory_csv(const Trajectory& traj);
/// Reads the CSV format written by trajectory_csv (9 significant digits).
Trajectory parse_trajectory_csv(const std::string& text);
std::string report_json(const VerificationReport& report);
std::string plot_json(const Scenario& scenario, const PlannerContext& ctx, const Trajectory& traj);

inline constexpr const char* kTrajectoryCsvHeader =
    "t,x,y,z,vx,vy,vz,ux,uy,uz,dist_to_goal,min_clearance,safe_cert";

}  // namespace reachnav
