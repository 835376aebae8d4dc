// Acceptance checks, one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include "montecarlo.hpp"
#include "oracles.hpp"
#include "reachnav/cli.hpp"
#include "reachnav/distance.hpp"
#include "reachnav/hull.hpp"
#include "reachnav/lp.hpp"
#include "reachnav/planner.hpp"
#include "reachnav/pointcloud.hpp"
#include "reachnav/reach.hpp"
#include "test_util.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace reachnav;
namespace fs = std::filesystem;

namespace {

const std::string kData = REACHNAV_DATA_DIR;
using Vec2 = Eigen::Vector2d;
const PositionIndices kPos{0, 2, 4};

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first failing condition.
struct Checker {
  Outcome out;
  std::ostringstream notes;
  void require(bool ok, const std::string& what) {
    if (!ok && out.pass) {
      out.pass = false;
      out.detail = what;
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<void(Checker&)>& body) {
  Checker ck;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(ck);
  } catch (const std::exception& e) {
    ck.require(false, std::string("exception: ") + e.what());
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0) ck.require(elapsed < budget_s, "runtime " + std::to_string(elapsed) + " s over budget");
  if (!ck.out.pass) ++failures;
  std::printf("%s [%d] %s (%.2f s)%s%s%s\n", ck.out.pass ? "PASS" : "FAIL", id, name.c_str(), elapsed,
              ck.notes.str().empty() ? "" : " -- ", ck.notes.str().c_str(),
              ck.out.pass ? "" : ("; failed: " + ck.out.detail).c_str());
  std::fflush(stdout);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "reachnav");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "reachnav_acceptance";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<Vec> random_directions(std::mt19937_64& rng, int n, int count) {
  std::vector<Vec> d;
  for (int i = 0; i < n; ++i) {
    d.push_back(Vec::Unit(n, i));
    d.push_back(-Vec::Unit(n, i));
  }
  while (static_cast<int>(d.size()) < count) d.push_back(testutil::random_unit(rng, n));
  return d;
}

struct McCase {
  std::string name;
  LinearSystem sys;
  ControlBox box;
  VPolytope x0;
};

std::vector<McCase> soundness_cases() {
  std::mt19937_64 rng(2024);
  std::vector<McCase> cases;
  Mat B(3, 2);
  B << 1, 0.5, -0.3, 1, 0.2, -0.7;
  cases.push_back({"A=0", LinearSystem::constant(Mat::Zero(3, 3), B), ControlBox(Vec2(-1, -0.5), Vec2(0.5, 2)),
                   VPolytope(testutil::random_points(rng, 3, 6))});
  cases.push_back({"double integrator", double_integrator_3d(), ControlBox::symmetric(Vec::Ones(3)),
                   VPolytope::point(Vec::Zero(6))});
  cases.push_back({"stable LTV", montecarlo::random_stable_ltv(rng, 3, 2, 10, 0.1), ControlBox::symmetric(Vec::Ones(2)),
                   VPolytope(testutil::random_points(rng, 3, 8))});
  return cases;
}

}  // namespace

int main() {
  criterion(1, "reachability exactness: position offsets T^2/2, costate c(0)=(1,1)", 5.0, [](Checker& ck) {
    const LinearSystem di = double_integrator_3d();
    const ControlBox unit = ControlBox::symmetric(Vec::Ones(3));
    std::vector<Vec> dirs;
    for (int k : kPos) {
      dirs.push_back(Vec::Unit(6, k));
      dirs.push_back(-Vec::Unit(6, k));
    }
    for (int k : {1, 3, 5}) {
      dirs.push_back(Vec::Unit(6, k));
      dirs.push_back(-Vec::Unit(6, k));
    }
    double worst = 0.0;
    for (double T : {0.25, 0.5, 1.0}) {
      const ReachPolytope r = reach_polytope(di, VPolytope::point(Vec::Zero(6)), unit, 0.0, T, dirs, 1e-3, kPos);
      for (int j = 0; j < 6; ++j) worst = std::max(worst, std::abs(r.facets[static_cast<std::size_t>(j)].offset - T * T / 2));
    }
    ck.require(worst <= 1e-3, "offset error " + std::to_string(worst));
    Mat A(2, 2), B(2, 1);
    A << 0, 1, 0, 0;
    B << 0, 1;
    const auto path = propagate_costate(LinearSystem::constant(A, B), Vec2(1, 0), 0.0, 1.0, 1e-3);
    const double cerr = (path.c.front() - Vec2(1, 1)).norm();
    ck.require(cerr <= 1e-9, "costate error " + std::to_string(cerr));
    ck.notes << "max offset error " << worst << ", costate error " << cerr;
  });

  criterion(2, "outer-approximation soundness: 10^4 rollouts x 3 systems", 60.0, [](Checker& ck) {
    std::mt19937_64 rng(77);
    for (const McCase& cs : soundness_cases()) {
      const int n = cs.sys.n();
      const double dt = 1e-3;
      const ReachPolytope r = reach_polytope(cs.sys, cs.x0, cs.box, 0.0, 1.0, random_directions(rng, n, 2 * n + 10), dt);
      const auto res = montecarlo::check_containment(cs.sys, cs.x0, cs.box, r, 0.0, dt, 10000, rng);
      ck.require(res.inside_tight >= 0.999 * res.trials, cs.name + ": tight containment " + std::to_string(res.inside_tight));
      ck.require(res.inside_loose == res.trials, cs.name + ": loose containment " + std::to_string(res.inside_loose));
      ck.notes << cs.name << " " << res.inside_tight << "/" << res.trials << " ";
    }
  });

  criterion(3, "facet tightness: replay and hyperplane contact within 1e-7", 0.0, [](Checker& ck) {
    std::mt19937_64 rng(78);
    double worst_replay = 0.0, worst_plane = 0.0;
    for (const McCase& cs : soundness_cases()) {
      const int n = cs.sys.n();
      const double dt = 1e-3;
      for (const Vec& c : random_directions(rng, n, 2 * n + 10)) {
        const auto path = propagate_costate(cs.sys, c, 0.0, 1.0, dt);
        const auto f0 = support_point_on_initial_set(cs.x0, path.c.front());
        std::vector<Vec> us;
        const auto f = propagate_support_point(cs.sys, cs.box, f0, path, 0.0, 1.0, dt, &us);
        const Vec replay = oracle::simulate_held(montecarlo::schedule_of(cs.sys), f0.support_point, 0.0, path.grid.h, us);
        worst_replay = std::max(worst_replay, (replay - f.support_point).norm());
        worst_plane = std::max(worst_plane, std::abs(f.normal.dot(f.support_point) - f.offset));
      }
    }
    ck.require(worst_replay <= 1e-7, "replay error " + std::to_string(worst_replay));
    ck.require(worst_plane <= 1e-7, "plane error " + std::to_string(worst_plane));
    ck.notes << "replay " << worst_replay << ", plane " << worst_plane;
  });

  criterion(4, "geometry suite: cube facets, additivity, membership, distance oracle, zero <=> LP", 0.0, [](Checker& ck) {
    const Hull cube = convex_hull(to_matrix(read_ply_file(kData + "/clouds/cube.ply").points));
    ck.require(cube.facets.num_facets() == 6, "cube facets " + std::to_string(cube.facets.num_facets()));

    std::mt19937_64 rng(79);
    double worst_add = 0.0;
    for (int pair = 0; pair < 200; ++pair) {
      const Mat P = testutil::random_points(rng, 3, 4 + pair % 12);
      const Mat Q = testutil::random_points(rng, 3, 4 + pair % 7, 0.6);
      const VPolytope S = minkowski_sum(VPolytope(P), VPolytope(Q));
      for (int k = 0; k < 20; ++k) {
        const Vec c = testutil::random_unit(rng, 3);
        worst_add = std::max(worst_add, std::abs(testutil::scan_support(S.vertices(), c) - testutil::scan_support(P, c) -
                                                 testutil::scan_support(Q, c)));
      }
    }
    ck.require(worst_add <= 1e-9, "additivity error " + std::to_string(worst_add));

    double worst_member = 0.0, worst_dist = 0.0;
    int zero_mismatch = 0, zero_count = 0;
    std::uniform_real_distribution<double> sep(0.0, 3.0);
    for (int pair = 0; pair < 100; ++pair) {
      const Mat Pa = testutil::random_points(rng, 3, 5 + pair % 10);
      const Vec cb = testutil::random_unit(rng, 3) * sep(rng);
      const Mat Pb = testutil::random_points(rng, 3, 5 + pair % 8, 0.7, &cb);
      const Hull ha = convex_hull(Pa), hb = convex_hull(Pb);
      for (const auto* h : {&ha, &hb}) {
        const Mat& pts = h == &ha ? Pa : Pb;
        for (int i = 0; i < pts.cols(); ++i)
          worst_member = std::max(worst_member, (h->facets.normals() * pts.col(i) - h->facets.offsets()).maxCoeff());
      }
      const double d = polytope_distance(ha.vertices, hb.vertices).distance;
      worst_dist = std::max(worst_dist, std::abs(d - oracle::min_distance_convex_weights(Pa, Pb)));
      Mat A(ha.facets.num_facets() + hb.facets.num_facets(), 3);
      A << ha.facets.normals(), hb.facets.normals();
      Vec b(A.rows());
      b << ha.facets.offsets(), hb.facets.offsets();
      const bool feasible = lp_feasible(A, b).status == Feasibility::Feasible;
      zero_mismatch += (d == 0.0) != feasible;
      zero_count += d == 0.0;
    }
    ck.require(worst_member <= 1e-9, "membership slack " + std::to_string(worst_member));
    ck.require(worst_dist <= 1e-5, "distance error " + std::to_string(worst_dist));
    ck.require(zero_mismatch == 0, std::to_string(zero_mismatch) + " zero/LP mismatches");
    ck.notes << "additivity " << worst_add << ", membership " << worst_member << ", distance " << worst_dist << ", "
             << zero_count << " touching pairs";
  });

  for (const char* name : {"paper_fig6_6obs", "paper_fig7_10obs"}) {
    criterion(5, std::string("scenario reproduction: ") + name + " GoalReached, zero violations", 60.0,
              [name](Checker& ck) {
                const std::string scen = kData + "/scenarios/" + name + ".json";
                const fs::path csv = scratch(std::string(name) + ".csv"), rep = scratch(std::string(name) + "_report.json");
                ck.require(cli({"plan", "--scenario", scen, "--out", csv.string(), "--require-goal"}) == 0,
                           "plan did not reach the goal");
                ck.require(cli({"verify", "--scenario", scen, "--traj", csv.string(), "--report", rep.string()}) == 0,
                           "verify failed");
                const auto doc = nlohmann::json::parse(slurp(rep));
                ck.require(doc["violations"].empty(), std::to_string(doc["violations"].size()) + " violations");
                const double resid = doc["max_dynamics_residual"].get<double>();
                ck.require(resid < 1e-6, "residual " + std::to_string(resid));
                ck.notes << "residual " << resid << ", min clearance " << doc["min_clearance"].dump();
              });
  }

  criterion(5, "dense cloud hull: stable facet count, every point inside within 1e-9", 0.0, [](Checker& ck) {
    const PointCloud cloud = read_ply_file(kData + "/clouds/rover_dense.ply").points;
    const Mat pts = to_matrix(cloud);
    const Hull a = convex_hull(pts), b = convex_hull(pts);
    ck.require(a.facets.num_facets() == b.facets.num_facets(), "facet count changed between runs");
    const double slack = (a.facets.normals() * pts - a.facets.offsets().replicate(1, pts.cols())).maxCoeff();
    ck.require(slack <= 1e-9, "point outside by " + std::to_string(slack));
    ck.notes << cloud.size() << " points, " << a.facets.num_facets() << " facets";
  });

  criterion(6, "safety under blockage: 100 seeds, zero verified collisions", 0.0, [](Checker& ck) {
    const std::string path = kData + "/scenarios/blocked_goal.json";
    ScenarioConfig cfg = parse_scenario_config(slurp(path), kData + "/scenarios");
    int infeasible = 0, timeout = 0, violations = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      cfg.obstacles.seed = seed;
      const Scenario s = build_scenario(cfg);
      const Trajectory tr = run(s);
      ck.require(tr.outcome != reachnav::Outcome::GoalReached, "seed " + std::to_string(seed) + " reached a walled goal");
      infeasible += tr.outcome == reachnav::Outcome::InfeasibleStop;
      timeout += tr.outcome == reachnav::Outcome::Timeout;
      violations += static_cast<int>(verify_trajectory(tr, s).violations.size());
    }
    ck.require(violations == 0, std::to_string(violations) + " violations");
    ck.notes << infeasible << " InfeasibleStop, " << timeout << " Timeout";
  });

  criterion(7, "determinism: two plan runs give byte-identical CSV", 0.0, [](Checker& ck) {
    const std::string scen = kData + "/scenarios/paper_fig6_6obs.json";
    const fs::path a = scratch("det_a.csv"), b = scratch("det_b.csv");
    ck.require(cli({"plan", "--scenario", scen, "--out", a.string()}) == 0, "first run failed");
    ck.require(cli({"plan", "--scenario", scen, "--out", b.string()}) == 0, "second run failed");
    const std::string x = slurp(a), y = slurp(b);
    ck.require(!x.empty() && x == y, "CSV files differ");
    ck.notes << x.size() << " bytes";
  });

  criterion(8, "PLY round-trip: 1000 random points at printed precision", 0.0, [](Checker& ck) {
    std::mt19937_64 rng(80);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-6, 6);
    PointCloud cloud(1000);
    for (auto& p : cloud)
      for (int k = 0; k < 3; ++k) p(k) = mant(rng) * std::pow(10.0, expo(rng));
    const PlyDocument doc = parse_ply(write_ply(cloud));
    ck.require(doc.points.size() == cloud.size(), "point count changed");
    int mismatches = 0;
    for (std::size_t i = 0; i < cloud.size() && i < doc.points.size(); ++i)
      for (int k = 0; k < 3; ++k) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.9g", cloud[i](k));
        mismatches += doc.points[i](k) != std::strtod(buf, nullptr);
      }
    ck.require(mismatches == 0, std::to_string(mismatches) + " coordinates differ");
  });

  std::printf("%d criteria failed\n", failures);
  return failures;
}
