#include "reachnav/scenario.hpp"

#include "reachnav/distance.hpp"
#include "reachnav/error.hpp"
#include "reachnav/hull.hpp"
#include "reachnav/planner.hpp"
#include "reachnav/pointcloud.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace reachnav {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr double kDefaultVoxel = 0.05;
constexpr double kKeepoutClearance = 0.3;
constexpr int kMaxRejections = 10000;

[[noreturn]] void schema_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::SchemaError, "field '" + field + "': " + what);
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) schema_error(where, "expected an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) schema_error(where.empty() ? key : where + "." + key, "unknown key");
}

const json& require(const json& obj, const std::string& where, const std::string& key) {
  const auto it = obj.find(key);
  if (it == obj.end()) schema_error(where.empty() ? key : where + "." + key, "missing");
  return *it;
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) schema_error(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema_error(field, "expected a finite number");
  return d;
}

double positive(const json& v, const std::string& field) {
  const double d = number(v, field);
  if (!(d > 0.0)) schema_error(field, "must be positive");
  return d;
}

int integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) schema_error(field, "expected an integer");
  return v.get<int>();
}

std::string string(const json& v, const std::string& field) {
  if (!v.is_string()) schema_error(field, "expected a string");
  return v.get<std::string>();
}

Vec3 vec3(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 3) schema_error(field, "expected an array of 3 numbers");
  Vec3 out;
  for (int k = 0; k < 3; ++k) out(k) = number(v[static_cast<std::size_t>(k)], field + "[" + std::to_string(k) + "]");
  return out;
}

Box3 box3(const json& v, const std::string& field) {
  check_keys(v, field, {"min", "max"});
  Box3 b{vec3(require(v, field, "min"), field + ".min"), vec3(require(v, field, "max"), field + ".max")};
  if ((b.min.array() >= b.max.array()).any()) schema_error(field, "min must be below max on every axis");
  return b;
}

ScenarioConfig::Shape shape(const json& v, const std::string& field, bool with_center) {
  std::set<std::string> keys{"source", "half_extents", "ply_path", "voxel"};
  if (with_center) keys.insert("center");
  check_keys(v, field, keys);
  ScenarioConfig::Shape s;
  s.source = string(require(v, field, "source"), field + ".source");
  if (s.source == "box") {
    s.half_extents = vec3(require(v, field, "half_extents"), field + ".half_extents");
    if ((s.half_extents.array() <= 0.0).any()) schema_error(field + ".half_extents", "must be positive");
    if (with_center) s.center = vec3(require(v, field, "center"), field + ".center");
  } else if (s.source == "ply") {
    s.ply_path = string(require(v, field, "ply_path"), field + ".ply_path");
    if (with_center && v.contains("center")) s.center = vec3(v["center"], field + ".center");
    if (v.contains("half_extents")) schema_error(field + ".half_extents", "only valid for source \"box\"");
  } else {
    schema_error(field + ".source", "expected \"box\" or \"ply\"");
  }
  if (v.contains("voxel")) {
    s.has_voxel = true;
    s.voxel = number(v["voxel"], field + ".voxel");
    if (s.voxel < 0.0) schema_error(field + ".voxel", "must be nonnegative");
  }
  return s;
}

void read_planner(PlannerParams& p, const json& v, const std::string& field) {
  check_keys(v, field,
             {"dt", "lookahead", "horizon_steps", "facet_directions", "goal_tol", "safety_margin", "max_sim_time"});
  if (v.contains("dt")) p.dt = positive(v["dt"], field + ".dt");
  if (v.contains("lookahead")) p.lookahead = positive(v["lookahead"], field + ".lookahead");
  if (v.contains("horizon_steps")) {
    p.horizon_steps = integer(v["horizon_steps"], field + ".horizon_steps");
    if (p.horizon_steps < 1) schema_error(field + ".horizon_steps", "must be at least 1");
  }
  if (v.contains("facet_directions")) {
    p.facet_directions = integer(v["facet_directions"], field + ".facet_directions");
    if (p.facet_directions < 4) schema_error(field + ".facet_directions", "must be at least 4");
  }
  if (v.contains("goal_tol")) p.goal_tol = positive(v["goal_tol"], field + ".goal_tol");
  if (v.contains("safety_margin")) p.safety_margin = positive(v["safety_margin"], field + ".safety_margin");
  if (v.contains("max_sim_time")) p.max_sim_time = positive(v["max_sim_time"], field + ".max_sim_time");
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, what + " is not valid JSON: " + e.what());
  }
}

ojson vec_json(const Vec3& v) { return ojson::array({v.x(), v.y(), v.z()}); }

ojson shape_json(const ScenarioConfig::Shape& s, bool with_center) {
  ojson out;
  out["source"] = s.source;
  if (s.source == "box") {
    if (with_center) out["center"] = vec_json(s.center);
    out["half_extents"] = vec_json(s.half_extents);
  } else {
    out["ply_path"] = s.ply_path;
    if (with_center) out["center"] = vec_json(s.center);
  }
  if (s.has_voxel) out["voxel"] = s.voxel;
  return out;
}

std::string resolve(const ScenarioConfig& c, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(c.base_dir) / p).lexically_normal().string();
}

VPolytope hull_of_ply(const ScenarioConfig& c, const ScenarioConfig::Shape& s, const std::string& field) {
  PlyDocument doc;
  try {
    doc = read_ply_file(resolve(c, s.ply_path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) throw;
    throw Error(ErrorCode::GeometryError, field + ": " + e.what());
  }
  PointCloud cloud = doc.points;
  const double voxel = s.has_voxel ? s.voxel : kDefaultVoxel;
  if (voxel > 0.0) cloud = voxel_downsample(cloud, voxel);
  try {
    return convex_hull(to_matrix(cloud)).vertices;
  } catch (const Error& e) {
    throw Error(ErrorCode::GeometryError, field + ": " + e.what());
  }
}

VPolytope centered_at(const VPolytope& p, const Vec3& center) {
  const Vec mid = 0.5 * (p.lower_corner() + p.upper_corner());
  return translate(p, Vec(center - mid));
}

bool inside_box(const VPolytope& p, const Box3& b, double tol = 1e-9) {
  return (p.lower_corner().array() >= b.min.array() - tol).all() && (p.upper_corner().array() <= b.max.array() + tol).all();
}

VPolytope grown_box(const Vec& lo, const Vec& hi, double pad) {
  return VPolytope::box(lo.array() - pad, hi.array() + pad);
}

}  // namespace

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  return arena == o.arena && robot == o.robot && goal == o.goal && start_position == o.start_position &&
         start_velocity == o.start_velocity && obstacles == o.obstacles && mass == o.mass &&
         force_limits == o.force_limits && planner == o.planner;
}

bool Scenario::operator==(const Scenario& o) const {
  if (!(arena == o.arena && obstacles == o.obstacles && goal == o.goal && robot == o.robot && x0 == o.x0 &&
        params == o.params && u_box.lower == o.u_box.lower && u_box.upper == o.u_box.upper && config == o.config))
    return false;
  if (system.segments() != o.system.segments()) return false;
  for (int s = 0; s < system.segments(); ++s)
    if (system.A(s) != o.system.A(s) || system.B(s) != o.system.B(s)) return false;
  return true;
}

ScenarioConfig parse_scenario_config(const std::string& text, const std::string& base_dir) {
  const json doc = parse_json(text, "scenario");
  check_keys(doc, "", {"arena", "robot", "start", "goal", "obstacles", "dynamics", "planner"});
  ScenarioConfig c;
  c.base_dir = base_dir;
  c.arena = box3(require(doc, "", "arena"), "arena");
  c.robot = shape(require(doc, "", "robot"), "robot", false);
  c.goal = shape(require(doc, "", "goal"), "goal", true);

  const json& start = require(doc, "", "start");
  check_keys(start, "start", {"position", "velocity"});
  c.start_position = vec3(require(start, "start", "position"), "start.position");
  c.start_velocity = start.contains("velocity") ? vec3(start["velocity"], "start.velocity") : Vec3::Zero();

  const json& obs = require(doc, "", "obstacles");
  check_keys(obs, "obstacles", {"mode", "list", "count", "size_range", "seed"});
  c.obstacles.mode = string(require(obs, "obstacles", "mode"), "obstacles.mode");
  if (c.obstacles.mode != "explicit" && c.obstacles.mode != "random")
    schema_error("obstacles.mode", "expected \"explicit\" or \"random\"");
  if (obs.contains("list")) {
    if (!obs["list"].is_array()) schema_error("obstacles.list", "expected an array");
    for (std::size_t i = 0; i < obs["list"].size(); ++i)
      c.obstacles.list.push_back(box3(obs["list"][i], "obstacles.list[" + std::to_string(i) + "]"));
  } else if (c.obstacles.mode == "explicit") {
    schema_error("obstacles.list", "missing (required in explicit mode)");
  }
  if (c.obstacles.mode == "random") {
    c.obstacles.count = integer(require(obs, "obstacles", "count"), "obstacles.count");
    if (c.obstacles.count < 0) schema_error("obstacles.count", "must be nonnegative");
    const json& range = require(obs, "obstacles", "size_range");
    if (!range.is_array() || range.size() != 2) schema_error("obstacles.size_range", "expected [min, max]");
    c.obstacles.size_min = positive(range[0], "obstacles.size_range[0]");
    c.obstacles.size_max = positive(range[1], "obstacles.size_range[1]");
    if (c.obstacles.size_min > c.obstacles.size_max) schema_error("obstacles.size_range", "min exceeds max");
    const json& seed = require(obs, "obstacles", "seed");
    if (!seed.is_number_integer() || (seed.is_number_integer() && !seed.is_number_unsigned() && seed.get<long long>() < 0))
      schema_error("obstacles.seed", "expected a nonnegative integer");
    c.obstacles.seed = seed.get<std::uint64_t>();
  } else {
    for (const char* k : {"count", "size_range", "seed"})
      if (obs.contains(k)) schema_error(std::string("obstacles.") + k, "only valid in random mode");
  }

  const json& dyn = require(doc, "", "dynamics");
  check_keys(dyn, "dynamics", {"mass", "force_limits"});
  c.mass = positive(require(dyn, "dynamics", "mass"), "dynamics.mass");
  c.force_limits = vec3(require(dyn, "dynamics", "force_limits"), "dynamics.force_limits");
  if ((c.force_limits.array() <= 0.0).any()) schema_error("dynamics.force_limits", "must be positive");

  if (doc.contains("planner")) read_planner(c.planner, doc["planner"], "planner");
  c.planner.seed = c.obstacles.seed;
  return c;
}

void apply_planner_overrides(PlannerParams& params, const std::string& text) {
  read_planner(params, parse_json(text, "planner parameters"), "params");
}

std::string serialize_scenario_config(const ScenarioConfig& c) {
  ojson doc;
  doc["arena"] = {{"min", vec_json(c.arena.min)}, {"max", vec_json(c.arena.max)}};
  doc["robot"] = shape_json(c.robot, false);
  doc["start"] = {{"position", vec_json(c.start_position)}, {"velocity", vec_json(c.start_velocity)}};
  doc["goal"] = shape_json(c.goal, true);
  ojson obs;
  obs["mode"] = c.obstacles.mode;
  ojson list = ojson::array();
  for (const Box3& b : c.obstacles.list) list.push_back({{"min", vec_json(b.min)}, {"max", vec_json(b.max)}});
  obs["list"] = list;
  if (c.obstacles.mode == "random") {
    obs["count"] = c.obstacles.count;
    obs["size_range"] = ojson::array({c.obstacles.size_min, c.obstacles.size_max});
    obs["seed"] = c.obstacles.seed;
  }
  doc["obstacles"] = obs;
  doc["dynamics"] = {{"mass", c.mass}, {"force_limits", vec_json(c.force_limits)}};
  const PlannerParams& p = c.planner;
  doc["planner"] = {{"dt", p.dt},
                    {"lookahead", p.lookahead},
                    {"horizon_steps", p.horizon_steps},
                    {"facet_directions", p.facet_directions},
                    {"goal_tol", p.goal_tol},
                    {"safety_margin", p.safety_margin},
                    {"max_sim_time", p.max_sim_time}};
  return doc.dump(2) + "\n";
}

ScenarioRng::ScenarioRng(std::uint64_t seed) : engine_(seed) {}

double ScenarioRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::vector<VPolytope> gen_random_obstacles(std::uint64_t seed, int count, double size_min, double size_max,
                                            const Box3& arena, const std::vector<VPolytope>& keepout) {
  if (count < 0) throw Error(ErrorCode::InvalidArgument, "obstacle count must be nonnegative");
  if (!(size_min > 0.0) || size_min > size_max) throw Error(ErrorCode::InvalidArgument, "invalid size range");
  const Vec3 extent = arena.max - arena.min;
  if ((extent.array() < size_max).any()) throw Error(ErrorCode::InvalidArgument, "size range exceeds the arena");

  ScenarioRng rng(seed);
  std::vector<VPolytope> out;
  int rejections = 0;
  while (static_cast<int>(out.size()) < count) {
    Vec3 size, lo;
    for (int k = 0; k < 3; ++k) size(k) = rng.uniform(size_min, size_max);
    for (int k = 0; k < 3; ++k) lo(k) = arena.min(k) + rng.uniform() * (extent(k) - size(k));
    const VPolytope box = VPolytope::box(lo, lo + size);
    bool clear = true;
    for (const VPolytope& k : keepout) clear = clear && polytope_distance(box, k).distance > 0.0;
    if (clear) {
      out.push_back(box);
      continue;
    }
    if (++rejections >= kMaxRejections)
      throw Error(ErrorCode::PlacementFailure, "could not place " + std::to_string(count) + " obstacles after " +
                                                   std::to_string(kMaxRejections) + " rejections");
  }
  return out;
}

Scenario build_scenario(const ScenarioConfig& c) {
  const Box3& arena = c.arena;
  VPolytope robot = c.robot.source == "box" ? VPolytope::box(-c.robot.half_extents, c.robot.half_extents)
                                            : centered_at(hull_of_ply(c, c.robot, "robot"), Vec3::Zero());
  VPolytope goal = c.goal.source == "box" ? VPolytope::box(c.goal.center - c.goal.half_extents, c.goal.center + c.goal.half_extents)
                                          : hull_of_ply(c, c.goal, "goal");
  if (c.goal.source == "ply" && c.goal.center != Vec3::Zero()) goal = centered_at(goal, c.goal.center);

  std::vector<VPolytope> obstacles;
  for (const Box3& b : c.obstacles.list) obstacles.push_back(VPolytope::box(b.min, b.max));
  if (c.obstacles.mode == "random") {
    const Vec rlo = robot.lower_corner(), rhi = robot.upper_corner();
    const Vec start = c.start_position;
    std::vector<VPolytope> keepout{
        grown_box(start + rlo, start + rhi, kKeepoutClearance),
        grown_box(goal.lower_corner() + rlo, goal.upper_corner() + rhi, kKeepoutClearance)};
    auto extra = gen_random_obstacles(c.obstacles.seed, c.obstacles.count, c.obstacles.size_min, c.obstacles.size_max,
                                      arena, keepout);
    obstacles.insert(obstacles.end(), extra.begin(), extra.end());
  }

  const LinearSystem system = double_integrator_3d();
  const ControlBox u_box = force_box(c.force_limits, c.mass);
  Scenario s{arena,
             std::move(obstacles),
             std::move(goal),
             std::move(robot),
             VPolytope::point(make_state(c.start_position, c.start_velocity)),
             system,
             u_box,
             c.planner,
             c};

  for (std::size_t i = 0; i < s.obstacles.size(); ++i)
    if (!inside_box(s.obstacles[i], arena))
      throw Error(ErrorCode::InvalidScenario, "obstacle " + std::to_string(i) + " leaves the arena");
  if (!inside_box(s.goal, arena)) throw Error(ErrorCode::InvalidScenario, "goal leaves the arena");
  if (!inside_box(translate(s.robot, Vec(c.start_position)), arena))
    throw Error(ErrorCode::InvalidScenario, "robot at the start position leaves the arena");

  const auto cspace = build_cspace(s.obstacles, s.robot);
  for (std::size_t i = 0; i < cspace.size(); ++i) {
    if (polytope_distance(s.goal, cspace[i].vertices).distance <= 0.0)
      throw Error(ErrorCode::InvalidScenario, "goal intersects inflated obstacle " + std::to_string(i));
    if (contains(cspace[i].facets, Vec(c.start_position), 0.0))
      throw Error(ErrorCode::InvalidScenario, "start position collides with obstacle " + std::to_string(i));
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open scenario " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return build_scenario(parse_scenario_config(ss.str(), dir.empty() ? "." : dir));
}

std::string serialize_scenario(const Scenario& scenario) { return serialize_scenario_config(scenario.config); }

}  // namespace reachnav
