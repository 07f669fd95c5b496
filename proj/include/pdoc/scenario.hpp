#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pdoc/geometry.hpp"

namespace pdoc {

struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double orientation = 0.0;  // wrapped to (-pi, pi]
  double velocity = 0.0;     // >= 0
  double steering_angle = 0.0;
  int time_step = 0;
};

struct Trajectory {
  std::vector<VehicleState> states;  // non-empty, consecutive time steps
  double dt = 0.1;

  double duration() const {
    return states.empty() ? 0.0
                          : (states.back().time_step - states.front().time_step) * dt;
  }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct GoalRegion {
  Vec2 center;
  double half_x = 0.0;
  double half_y = 0.0;
  int t_start = 0;
  int t_end = 0;
  std::optional<Interval> velocity_interval;
  std::optional<Interval> orientation_interval;
};

struct PlanningProblem {
  VehicleState initial_state;  // time_step 0
  GoalRegion goal;
};

struct Lanelet {
  std::vector<Vec2> centerline;  // >= 2 points
  double width = 0.0;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

struct Obstacle {
  double length = 0.0;
  double width = 0.0;
  std::vector<Pose> poses;  // one per time step, covers 0..horizon
};

struct Scenario {
  double dt = 0.1;
  int horizon = 0;
  std::vector<Lanelet> lanelets;
  std::vector<Obstacle> obstacles;
};

struct LaneOffsets {
  double lateral = 0.0;      // >= 0
  double orientation = 0.0;  // [0, pi]
};

// File I/O. Schema: top-level dt, horizon, lanelets, obstacles,
// planning_problem; see README. Throws SchemaError naming the offending
// field, Error on I/O failure.
std::pair<Scenario, PlanningProblem> load_scenario(const std::string& path);
void save_scenario(const std::string& path, const Scenario& scenario,
                   const PlanningProblem& problem);

// Trajectory file I/O: {dt, states:[{x,y,orientation,velocity,steering_angle,time_step}]}.
Trajectory load_trajectory(const std::string& path);
void save_trajectory(const std::string& path, const Trajectory& traj);
std::string trajectory_to_json(const Trajectory& traj);

// Membership of a single state in the goal region (closed sets everywhere).
bool state_in_goal(const VehicleState& state, const GoalRegion& goal);

// True iff some state of the trajectory satisfies the goal region.
bool goal_reached(const Trajectory& traj, const GoalRegion& goal);

// Euclidean distance from the state position to the goal rectangle center.
double distance_to_goal(const VehicleState& state, const GoalRegion& goal);

// Offsets to the nearest centerline segment over all lanelets.
// Throws NoLaneInformationError when the scenario has no lanelets.
LaneOffsets lane_offsets(const VehicleState& state, const Scenario& scenario);

// Validates trajectory invariants; throws SchemaError on violation.
void validate_trajectory(const Trajectory& traj);

}  // namespace pdoc
