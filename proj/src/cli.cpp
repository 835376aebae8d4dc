#include "reachnav/cli.hpp"

#include "reachnav/error.hpp"
#include "reachnav/hull_json.hpp"
#include "reachnav/planner.hpp"
#include "reachnav/pointcloud.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace reachnav {
namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void dump(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out << text;
  if (!out.flush()) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

struct HullArgs {
  std::string input, output;
  double voxel = 0.05;
  std::vector<double> outlier;
};

struct ReachArgs {
  std::string scenario, output;
  double time = 0.0;
};

struct PlanArgs {
  std::string scenario, out, plot, params;
  bool require_goal = false;
};

struct VerifyArgs {
  std::string scenario, traj, report;
};

int do_hull(const HullArgs& a, std::ostream& out) {
  PointCloud cloud = read_ply_file(a.input).points;
  if (!a.outlier.empty()) {
    const double k = a.outlier[0];
    if (k < 1 || k != static_cast<int>(k)) throw Error(ErrorCode::InvalidArgument, "--outlier k must be a positive integer");
    cloud = outlier_filter(cloud, static_cast<int>(k), a.outlier[1]);
  }
  if (a.voxel < 0.0) throw Error(ErrorCode::NonPositiveVoxel, "--voxel must be nonnegative");
  if (a.voxel > 0.0) cloud = voxel_downsample(cloud, a.voxel);
  const Hull h = convex_hull(to_matrix(cloud));
  dump(a.output, hull_to_json(h));
  out << "hull: " << cloud.size() << " points, " << h.vertices.size() << " vertices, " << h.facets.num_facets()
      << " facets\n";
  return kExitOk;
}

int do_reach(const ReachArgs& a, std::ostream& out) {
  const Scenario s = load_scenario(a.scenario);
  if (!(a.time > 0.0)) throw Error(ErrorCode::InvalidHorizon, "--time must be positive");
  const PlannerContext ctx(s, s.params);
  const ReachPolytope r = reach_polytope(s.system, s.x0, s.u_box, 0.0, a.time, ctx.directions(), s.params.reach_dt,
                                         {kPositionIndex[0], kPositionIndex[1], kPositionIndex[2]});
  dump(a.output, reach_to_json(r));
  out << "reach: " << r.facets.size() << " facets at t=" << a.time << "\n";
  return kExitOk;
}

int do_plan(const PlanArgs& a, std::ostream& out) {
  const Scenario s = load_scenario(a.scenario);
  PlannerParams params = s.params;
  if (!a.params.empty()) apply_planner_overrides(params, slurp(a.params));
  const Trajectory traj = run(s, params);
  dump(a.out, trajectory_csv(traj));
  if (!a.plot.empty()) dump(a.plot, plot_json(s, PlannerContext(s, params), traj));
  out << "plan: " << to_string(traj.outcome) << " after " << traj.samples.size() << " samples, t="
      << traj.samples.back().t << "\n";
  if (a.require_goal && traj.outcome != Outcome::GoalReached) return kExitGoalMissed;
  return kExitOk;
}

int do_verify(const VerifyArgs& a, std::ostream& out) {
  const Scenario s = load_scenario(a.scenario);
  const Trajectory traj = parse_trajectory_csv(slurp(a.traj));
  const VerificationReport rep = verify_trajectory(traj, s);
  dump(a.report, report_json(rep));
  out << "verify: " << rep.violations.size() << " violations, max dynamics residual " << rep.max_dynamics_residual
      << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reachability-based navigation among polytopic obstacles"};
  app.require_subcommand(1);

  HullArgs ha;
  auto* hull = app.add_subcommand("hull", "Convex hull of an ASCII PLY point cloud");
  hull->add_option("--input", ha.input, "PLY file")->required();
  hull->add_option("--output", ha.output, "hull JSON")->required();
  hull->add_option("--voxel", ha.voxel, "voxel edge for downsampling, 0 disables")->capture_default_str();
  hull->add_option("--outlier", ha.outlier, "k-nearest-neighbour filter: k sigma")->expected(2);

  ReachArgs ra;
  auto* reach = app.add_subcommand("reach", "Reach polytope of the scenario start state");
  reach->add_option("--scenario", ra.scenario)->required();
  reach->add_option("--time", ra.time, "horizon in seconds")->required();
  reach->add_option("--output", ra.output)->required();

  PlanArgs pa;
  auto* plan = app.add_subcommand("plan", "Receding-horizon run to the goal");
  plan->add_option("--scenario", pa.scenario)->required();
  plan->add_option("--out", pa.out, "trajectory CSV")->required();
  plan->add_option("--plot-data", pa.plot, "plot JSON");
  plan->add_option("--params", pa.params, "planner parameter overrides (JSON)");
  plan->add_flag("--require-goal", pa.require_goal, "exit 3 unless the goal is reached");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Independent collision and dynamics check of a trajectory");
  verify->add_option("--scenario", va.scenario)->required();
  verify->add_option("--traj", va.traj)->required();
  verify->add_option("--report", va.report)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kExitValidation;
  }

  try {
    if (*hull) return do_hull(ha, out);
    if (*reach) return do_reach(ra, out);
    if (*plan) return do_plan(pa, out);
    return do_verify(va, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace reachnav
