#include "pdoc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "pdoc/errors.hpp"

namespace pdoc {

using nlohmann::json;

namespace {

double require_number(const json& j, const std::string& field) {
  if (!j.contains(field) || !j[field].is_number()) {
    throw SchemaError("scenario schema: missing or non-numeric field '" + field + "'");
  }
  return j[field].get<double>();
}

Vec2 read_point(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw SchemaError("scenario schema: '" + field + "' must be a [x, y] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

std::optional<Interval> read_interval_opt(const json& j, const std::string& field) {
  if (!j.contains(field)) return std::nullopt;
  const json& v = j[field];
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw SchemaError("scenario schema: '" + field + "' must be a [lo, hi] pair");
  }
  Interval iv{v[0].get<double>(), v[1].get<double>()};
  if (iv.lo > iv.hi) {
    throw SchemaError("scenario schema: '" + field + "' bounds out of order");
  }
  return iv;
}

}  // namespace

std::pair<Scenario, PlanningProblem> load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("scenario schema: invalid JSON: ") + e.what());
  }

  Scenario sc;
  sc.dt = require_number(j, "dt");
  if (sc.dt <= 0.0) throw SchemaError("scenario schema: 'dt' must be > 0");
  if (!j.contains("horizon") || !j["horizon"].is_number_integer()) {
    throw SchemaError("scenario schema: missing or non-integer field 'horizon'");
  }
  sc.horizon = j["horizon"].get<int>();
  if (sc.horizon < 0) throw SchemaError("scenario schema: 'horizon' must be >= 0");

  if (!j.contains("lanelets") || !j["lanelets"].is_array()) {
    throw SchemaError("scenario schema: missing field 'lanelets'");
  }
  for (const json& lj : j["lanelets"]) {
    Lanelet lane;
    lane.width = require_number(lj, "width");
    if (!lj.contains("centerline") || !lj["centerline"].is_array()) {
      throw SchemaError("scenario schema: lanelet missing 'centerline'");
    }
    for (const json& pj : lj["centerline"]) {
      lane.centerline.push_back(read_point(pj, "centerline"));
    }
    if (lane.centerline.size() < 2) {
      throw SchemaError("scenario schema: 'centerline' needs >= 2 points");
    }
    sc.lanelets.push_back(std::move(lane));
  }

  if (!j.contains("obstacles") || !j["obstacles"].is_array()) {
    throw SchemaError("scenario schema: missing field 'obstacles'");
  }
  for (const json& oj : j["obstacles"]) {
    Obstacle ob;
    ob.length = require_number(oj, "length");
    ob.width = require_number(oj, "width");
    if (!oj.contains("poses") || !oj["poses"].is_array()) {
      throw SchemaError("scenario schema: obstacle missing 'poses'");
    }
    for (const json& pj : oj["poses"]) {
      if (!pj.is_array() || pj.size() != 3) {
        throw SchemaError("scenario schema: 'poses' entries must be [x, y, theta]");
      }
      ob.poses.push_back({pj[0].get<double>(), pj[1].get<double>(), pj[2].get<double>()});
    }
    if (static_cast<int>(ob.poses.size()) < sc.horizon + 1) {
      throw SchemaError("scenario schema: obstacle 'poses' shorter than horizon");
    }
    sc.obstacles.push_back(std::move(ob));
  }

  if (!j.contains("planning_problem")) {
    throw SchemaError("scenario schema: missing field 'planning_problem'");
  }
  const json& pp = j["planning_problem"];
  if (!pp.contains("initial_state")) {
    throw SchemaError("scenario schema: missing field 'initial_state'");
  }
  const json& is = pp["initial_state"];
  PlanningProblem problem;
  problem.initial_state.x = require_number(is, "x");
  problem.initial_state.y = require_number(is, "y");
  problem.initial_state.orientation = wrap_angle(require_number(is, "orientation"));
  problem.initial_state.velocity = require_number(is, "velocity");
  if (problem.initial_state.velocity < 0.0) {
    throw SchemaError("scenario schema: 'velocity' must be >= 0");
  }
  problem.initial_state.steering_angle = require_number(is, "steering_angle");
  problem.initial_state.time_step = 0;

  if (!pp.contains("goal")) throw SchemaError("scenario schema: missing field 'goal'");
  const json& gj = pp["goal"];
  GoalRegion goal;
  if (!gj.contains("center")) throw SchemaError("scenario schema: goal missing 'center'");
  goal.center = read_point(gj["center"], "center");
  if (!gj.contains("half_extents")) {
    throw SchemaError("scenario schema: goal missing 'half_extents'");
  }
  Vec2 he = read_point(gj["half_extents"], "half_extents");
  if (he.x < 0.0 || he.y < 0.0) {
    throw SchemaError("scenario schema: 'half_extents' must be >= 0");
  }
  goal.half_x = he.x;
  goal.half_y = he.y;
  if (!gj.contains("time_interval") || !gj["time_interval"].is_array() ||
      gj["time_interval"].size() != 2) {
    throw SchemaError("scenario schema: goal missing 'time_interval'");
  }
  goal.t_start = gj["time_interval"][0].get<int>();
  goal.t_end = gj["time_interval"][1].get<int>();
  if (goal.t_start > goal.t_end) {
    throw SchemaError("scenario schema: 'time_interval' bounds out of order");
  }
  goal.velocity_interval = read_interval_opt(gj, "velocity_interval");
  goal.orientation_interval = read_interval_opt(gj, "orientation_interval");
  problem.goal = goal;

  return {std::move(sc), std::move(problem)};
}

void save_scenario(const std::string& path, const Scenario& scenario,
                   const PlanningProblem& problem) {
  json j;
  j["dt"] = scenario.dt;
  j["horizon"] = scenario.horizon;
  j["lanelets"] = json::array();
  for (const Lanelet& lane : scenario.lanelets) {
    json lj;
    lj["width"] = lane.width;
    lj["centerline"] = json::array();
    for (const Vec2& p : lane.centerline) lj["centerline"].push_back({p.x, p.y});
    j["lanelets"].push_back(std::move(lj));
  }
  j["obstacles"] = json::array();
  for (const Obstacle& ob : scenario.obstacles) {
    json oj;
    oj["length"] = ob.length;
    oj["width"] = ob.width;
    oj["poses"] = json::array();
    for (const Pose& p : ob.poses) oj["poses"].push_back({p.x, p.y, p.theta});
    j["obstacles"].push_back(std::move(oj));
  }
  const VehicleState& is = problem.initial_state;
  j["planning_problem"]["initial_state"] = {{"x", is.x},
                                            {"y", is.y},
                                            {"orientation", is.orientation},
                                            {"velocity", is.velocity},
                                            {"steering_angle", is.steering_angle}};
  const GoalRegion& g = problem.goal;
  json gj;
  gj["center"] = {g.center.x, g.center.y};
  gj["half_extents"] = {g.half_x, g.half_y};
  gj["time_interval"] = {g.t_start, g.t_end};
  if (g.velocity_interval) {
    gj["velocity_interval"] = {g.velocity_interval->lo, g.velocity_interval->hi};
  }
  if (g.orientation_interval) {
    gj["orientation_interval"] = {g.orientation_interval->lo, g.orientation_interval->hi};
  }
  j["planning_problem"]["goal"] = std::move(gj);

  std::ofstream out(path);
  if (!out) throw IoError("cannot write scenario file: " + path);
  out << j.dump(2) << "\n";
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trajectory file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("trajectory schema: invalid JSON: ") + e.what());
  }
  Trajectory traj;
  traj.dt = require_number(j, "dt");
  if (!j.contains("states") || !j["states"].is_array()) {
    throw SchemaError("trajectory schema: missing field 'states'");
  }
  for (const json& sj : j["states"]) {
    VehicleState s;
    s.x = require_number(sj, "x");
    s.y = require_number(sj, "y");
    s.orientation = require_number(sj, "orientation");
    s.velocity = require_number(sj, "velocity");
    s.steering_angle = require_number(sj, "steering_angle");
    if (!sj.contains("time_step") || !sj["time_step"].is_number_integer()) {
      throw SchemaError("trajectory schema: missing or non-integer 'time_step'");
    }
    s.time_step = sj["time_step"].get<int>();
    traj.states.push_back(s);
  }
  validate_trajectory(traj);
  return traj;
}

std::string trajectory_to_json(const Trajectory& traj) {
  json j;
  j["dt"] = traj.dt;
  j["states"] = json::array();
  for (const VehicleState& s : traj.states) {
    j["states"].push_back({{"x", s.x},
                           {"y", s.y},
                           {"orientation", s.orientation},
                           {"velocity", s.velocity},
                           {"steering_angle", s.steering_angle},
                           {"time_step", s.time_step}});
  }
  return j.dump(2);
}

void save_trajectory(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trajectory file: " + path);
  out << trajectory_to_json(traj) << "\n";
}

void validate_trajectory(const Trajectory& traj) {
  if (traj.states.empty()) throw SchemaError("trajectory invariant: empty state list");
  if (traj.dt <= 0.0) throw SchemaError("trajectory invariant: dt must be > 0");
  for (size_t i = 0; i < traj.states.size(); ++i) {
    const VehicleState& s = traj.states[i];
    if (s.velocity < 0.0) throw SchemaError("trajectory invariant: negative velocity");
    if (s.time_step < 0) throw SchemaError("trajectory invariant: negative time_step");
    if (s.orientation <= -M_PI - 1e-12 || s.orientation > M_PI + 1e-12) {
      throw SchemaError("trajectory invariant: orientation not wrapped");
    }
    if (i > 0 && s.time_step != traj.states[i - 1].time_step + 1) {
      throw SchemaError("trajectory invariant: time steps not consecutive");
    }
  }
}

bool state_in_goal(const VehicleState& state, const GoalRegion& goal) {
  if (std::fabs(state.x - goal.center.x) > goal.half_x) return false;
  if (std::fabs(state.y - goal.center.y) > goal.half_y) return false;
  if (state.time_step < goal.t_start || state.time_step > goal.t_end) return false;
  if (goal.velocity_interval) {
    if (state.velocity < goal.velocity_interval->lo ||
        state.velocity > goal.velocity_interval->hi) {
      return false;
    }
  }
  if (goal.orientation_interval) {
    if (state.orientation < goal.orientation_interval->lo ||
        state.orientation > goal.orientation_interval->hi) {
      return false;
    }
  }
  return true;
}

bool goal_reached(const Trajectory& traj, const GoalRegion& goal) {
  for (const VehicleState& s : traj.states) {
    if (state_in_goal(s, goal)) return true;
  }
  return false;
}

double distance_to_goal(const VehicleState& state, const GoalRegion& goal) {
  return std::hypot(state.x - goal.center.x, state.y - goal.center.y);
}

LaneOffsets lane_offsets(const VehicleState& state, const Scenario& scenario) {
  if (scenario.lanelets.empty()) {
    throw NoLaneInformationError("lane offsets undefined: scenario has no lanelets");
  }
  const Vec2 p{state.x, state.y};
  double best = std::numeric_limits<double>::infinity();
  double best_dir = 0.0;
  for (const Lanelet& lane : scenario.lanelets) {
    for (size_t i = 0; i + 1 < lane.centerline.size(); ++i) {
      const Vec2 a = lane.centerline[i];
      const Vec2 b = lane.centerline[i + 1];
      const double d = point_segment_distance(p, a, b);
      if (d < best) {
        best = d;
        best_dir = std::atan2(b.y - a.y, b.x - a.x);
      }
    }
  }
  return {best, angle_abs_diff(state.orientation, best_dir)};
}

}  // namespace pdoc
