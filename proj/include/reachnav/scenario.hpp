#pragma once

#include "reachnav/linear_system.hpp"
#include "reachnav/polytope.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace reachnav {

struct PlannerParams {
  double dt = 0.05;             // control period (s)
  double lookahead = 0.5;       // reach-tube horizon T_la (s)
  int horizon_steps = 10;       // MPC horizon N
  int facet_directions = 26;    // position-space reach directions
  double goal_tol = 1e-6;       // goal membership slack (units)
  double safety_margin = 0.05;  // units
  double max_sim_time = 30.0;   // s
  std::uint64_t seed = 0;
  double reach_dt = 1e-3;          // RK4 step for reach sets (s)
  double control_weight = 1e-3;    // epsilon in the MPC cost

  bool operator==(const PlannerParams&) const = default;
};

struct Box3 {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
  bool operator==(const Box3& o) const { return min == o.min && max == o.max; }
};

/// Parsed configuration; mirrors the JSON document key for key.
struct ScenarioConfig {
  Box3 arena;
  struct Shape {
    std::string source = "box";  // "box" | "ply"
    Vec3 center = Vec3::Zero();
    Vec3 half_extents = Vec3::Zero();
    std::string ply_path;
    double voxel = 0.0;  // 0 disables downsampling
    bool has_voxel = false;
    bool operator==(const Shape& o) const {
      return source == o.source && center == o.center && half_extents == o.half_extents && ply_path == o.ply_path &&
             voxel == o.voxel && has_voxel == o.has_voxel;
    }
  };
  Shape robot;
  Shape goal;
  Vec3 start_position = Vec3::Zero();
  Vec3 start_velocity = Vec3::Zero();
  struct Obstacles {
    std::string mode = "explicit";  // "explicit" | "random"
    std::vector<Box3> list;
    int count = 0;
    double size_min = 0.5;
    double size_max = 2.0;
    std::uint64_t seed = 0;
    bool operator==(const Obstacles& o) const {
      return mode == o.mode && list == o.list && count == o.count && size_min == o.size_min && size_max == o.size_max &&
             seed == o.seed;
    }
  } obstacles;
  double mass = 1.0;
  Vec3 force_limits = Vec3::Constant(4.0);
  PlannerParams planner;
  /// Directory used to resolve relative PLY paths.
  std::string base_dir = ".";

  bool operator==(const ScenarioConfig& o) const;
};

/// Fully resolved planning problem.
struct Scenario {
  Box3 arena;
  std::vector<VPolytope> obstacles;
  VPolytope goal;
  VPolytope robot;  // body frame, reference point at the origin
  VPolytope x0;     // state space
  LinearSystem system;
  ControlBox u_box;
  PlannerParams params;
  ScenarioConfig config;

  Vec initial_state() const { return x0.vertex(0); }
  bool operator==(const Scenario& o) const;
};

ScenarioConfig parse_scenario_config(const std::string& json_text, const std::string& base_dir = ".");
std::string serialize_scenario_config(const ScenarioConfig& config);

/// Applies a planner-override document (same keys as the "planner" block).
void apply_planner_overrides(PlannerParams& params, const std::string& json_text);

/// Resolves shapes, generates obstacles and validates the scenario.
Scenario build_scenario(const ScenarioConfig& config);
Scenario load_scenario(const std::string& path);
std::string serialize_scenario(const Scenario& scenario);

/// Uniform doubles in [0, 1) from the top 53 bits of a std::mt19937_64
/// stream seeded with `seed`.
class ScenarioRng {
 public:
  explicit ScenarioRng(std::uint64_t seed);
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

/// Axis-aligned cuboids with edge lengths drawn from size_range, placed
/// uniformly inside the arena and resampled while they touch a keepout.
/// Throws PlacementFailure after 10^4 rejections in total.
std::vector<VPolytope> gen_random_obstacles(std::uint64_t seed, int count, double size_min, double size_max,
                                            const Box3& arena, const std::vector<VPolytope>& keepout);

}  // namespace reachnav
