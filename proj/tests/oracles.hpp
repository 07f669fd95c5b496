#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is deliberately written the "dumb" way (exhaustive
// enumeration, brute force, straight transcription of a formula) so that
// agreement with the optimized production code is meaningful.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdoc/astar_planner.hpp"
#include "pdoc/heuristic_dsl.hpp"
#include "pdoc/motion_primitives.hpp"
#include "pdoc/scenario.hpp"

namespace oracles {

using namespace pdoc;

/* ---------- exhaustive lattice enumeration ---------- */

// Depth-bounded DFS over every primitive sequence, mirroring the planner's
// horizon clipping and collision rules. best_g is the cheapest g among
// paths that reach the goal; sequences counts explored prefixes.
struct EnumResult {
  bool found = false;
  double best_g = std::numeric_limits<double>::infinity();
  long long sequences = 0;
};

namespace detail {

inline void enumerate_rec(const Scenario& sc, const PlanningProblem& problem,
                          const PrimitiveSet& set, std::vector<VehicleState>& path,
                          int v_idx, int sa_idx, double g, int depth_left,
                          EnumResult& res) {
  if (depth_left == 0) return;
  const VehicleState tail = path.back();
  if (tail.time_step >= sc.horizon) return;
  for (int pidx : set.starting_at(v_idx, sa_idx)) {
    const MotionPrimitive& prim = set.primitives[pidx];
    std::vector<VehicleState> segment = transform_primitive(prim, tail);
    while (!segment.empty() && segment.back().time_step > sc.horizon)
      segment.pop_back();
    if (segment.size() < 2) continue;
    std::vector<VehicleState> fresh(segment.begin() + 1, segment.end());
    if (!collision_free(fresh, sc, set.params)) continue;

    ++res.sequences;
    const double ng = g + step_cost(segment, problem, sc.dt);
    const size_t old_size = path.size();
    path.insert(path.end(), fresh.begin(), fresh.end());
    if (goal_reached(Trajectory{path, sc.dt}, problem.goal)) {
      res.found = true;
      res.best_g = std::min(res.best_g, ng);
    } else {
      enumerate_rec(sc, problem, set, path, prim.v_end_idx, prim.sa_end_idx, ng,
                    depth_left - 1, res);
    }
    path.resize(old_size);
  }
}

}  // namespace detail

// Requires the initial state to sit exactly on the sample grid (all the
// tiny fixtures do), so no snapping logic needs to be duplicated here.
inline EnumResult enumerate_plans(const Scenario& sc, const PlanningProblem& problem,
                                  const PrimitiveSet& set, int max_depth) {
  EnumResult res;
  int v_idx = -1, sa_idx = -1;
  for (size_t i = 0; i < set.v_samples.size(); ++i)
    if (std::fabs(set.v_samples[i] - problem.initial_state.velocity) < 1e-12)
      v_idx = static_cast<int>(i);
  for (size_t i = 0; i < set.sa_samples.size(); ++i)
    if (std::fabs(set.sa_samples[i] - problem.initial_state.steering_angle) < 1e-12)
      sa_idx = static_cast<int>(i);
  if (v_idx < 0 || sa_idx < 0)
    throw std::logic_error("enumeration fixture start is not on the sample grid");

  VehicleState root = problem.initial_state;
  root.time_step = 0;
  if (!collision_free({root}, sc, set.params)) return res;
  if (goal_reached(Trajectory{{root}, sc.dt}, problem.goal)) {
    res.found = true;
    res.best_g = 0.0;
    return res;
  }
  std::vector<VehicleState> path{root};
  detail::enumerate_rec(sc, problem, set, path, v_idx, sa_idx, 0.0, max_depth, res);
  return res;
}

/* ---------- tiny lattice fixtures ---------- */

// Hand-sized planning problems whose full sequence tree fits under a few
// hundred nodes, so optimality can be checked by enumeration.
struct TinyFixture {
  std::string name;
  Scenario scenario;
  PlanningProblem problem;
  std::string primitive_id;
  int max_depth = 4;
  bool expect_solution = true;
};

inline Obstacle static_obstacle(double length, double width, double x, double y,
                                int horizon) {
  Obstacle ob;
  ob.length = length;
  ob.width = width;
  ob.poses.assign(horizon + 1, Pose{x, y, 0.0});
  return ob;
}

inline TinyFixture make_tiny(const std::string& name, const std::string& id,
                             int horizon, Vec2 goal_center, Vec2 goal_half,
                             int t_start, int t_end, double v0) {
  TinyFixture f;
  f.name = name;
  f.primitive_id = id;
  f.scenario.dt = 0.1;
  f.scenario.horizon = horizon;
  f.problem.initial_state = VehicleState{0.0, 0.0, 0.0, v0, 0.0, 0};
  f.problem.goal.center = goal_center;
  f.problem.goal.half_x = goal_half.x;
  f.problem.goal.half_y = goal_half.y;
  f.problem.goal.t_start = t_start;
  f.problem.goal.t_end = t_end;
  return f;
}

inline std::vector<TinyFixture> tiny_lattice_fixtures() {
  const std::string kStraightId =
      "V_8.0_8.0_Vstep_1.0_SA_0.0_0.0_SAstep_1.0_T_0.5_Model_BMW_320i";
  const std::string kSteerId =
      "V_8.0_8.0_Vstep_1.0_SA_-0.15_0.15_SAstep_0.15_T_0.5_Model_BMW_320i";
  const std::string kTwoSpeedId =
      "V_4.0_8.0_Vstep_4.0_SA_0.0_0.0_SAstep_1.0_T_0.5_Model_BMW_320i";

  std::vector<TinyFixture> out;

  // 1. single straight primitive, goal dead ahead
  out.push_back(make_tiny("straight_line", kStraightId, 20, {16.0, 0.0}, {1.5, 1.5},
                          20, 20, 8.0));

  // 2. laterally offset goal, three steering choices per step
  out.push_back(make_tiny("swerve_to_offset_goal", kSteerId, 20, {14.5, 1.5},
                          {2.5, 1.6}, 15, 20, 8.0));

  // 3. small obstacle on the straight path forces a detour
  {
    TinyFixture f = make_tiny("obstacle_detour", kSteerId, 20, {15.0, 1.0},
                              {2.5, 2.5}, 15, 20, 8.0);
    f.scenario.obstacles.push_back(static_obstacle(0.5, 0.5, 10.5, 0.0, 20));
    out.push_back(f);
  }

  // 4. two velocity samples; only the constant-speed profile arrives in the
  // goal box at the required speed
  {
    TinyFixture f = make_tiny("speed_profile", kTwoSpeedId, 20, {8.0, 0.0},
                              {1.5, 1.5}, 10, 20, 8.0);
    f.problem.goal.velocity_interval = Interval{7.0, 9.0};
    out.push_back(f);
  }

  // 5. horizon not a multiple of the primitive length: final segment clipped
  out.push_back(make_tiny("horizon_clip", kStraightId, 13, {10.4, 0.0}, {1.2, 1.0},
                          13, 13, 8.0));

  // 6. wall across the whole corridor: no goal-reaching sequence exists
  {
    TinyFixture f = make_tiny("walled_goal", kSteerId, 20, {15.0, 0.0}, {2.0, 2.0},
                              10, 20, 8.0);
    f.scenario.obstacles.push_back(static_obstacle(0.5, 8.0, 7.0, 0.0, 20));
    f.expect_solution = false;
    out.push_back(f);
  }
  return out;
}

/* ---------- pass@k by subset enumeration ---------- */

// Exact fraction of k-subsets of n samples containing at least one of the
// c passing samples (the passing ones are taken to be indices 0..c-1).
inline double pass_fraction_by_enumeration(int n, int c, int k) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  long long total = 0, hit = 0;
  for (;;) {
    ++total;
    bool has_pass = false;
    for (int i : idx)
      if (i < c) has_pass = true;
    if (has_pass) ++hit;
    // next k-combination of {0..n-1} in lexicographic order
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
  return static_cast<double>(hit) / static_cast<double>(total);
}

/* ---------- random expression ASTs ---------- */

inline ExprPtr random_expr(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> leaf_pick(0, 1);
  std::uniform_real_distribution<double> constant(0.0, 50.0);
  const auto& features = list_features().entries;
  std::uniform_int_distribution<size_t> feature_pick(0, features.size() - 1);
  if (depth <= 1 || leaf_pick(rng) == 0) {
    if (leaf_pick(rng) == 0) return make_constant(constant(rng));
    return make_feature(features[feature_pick(rng)].name);
  }
  static const Expr::Kind ops[] = {
      Expr::Kind::Add, Expr::Kind::Sub,           Expr::Kind::Mul,
      Expr::Kind::Div, Expr::Kind::Min,           Expr::Kind::Max,
      Expr::Kind::IfReachedGoal, Expr::Kind::IfZeroVelocity};
  std::uniform_int_distribution<int> op_pick(0, 7);
  return make_binary(ops[op_pick(rng)], random_expr(rng, depth - 1),
                     random_expr(rng, depth - 1));
}

inline bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Constant:
      return a->value == b->value;
    case Expr::Kind::Feature:
      return a->feature == b->feature;
    default:
      return structurally_equal(a->left, b->left) &&
             structurally_equal(a->right, b->right);
  }
}

/* ---------- random primitive-set IDs ---------- */

// Field values that survive any of the textual renderings below without
// breaking the ID invariants.
struct RandomIdParts {
  double v_min, v_max, v_step, sa_min, sa_max, sa_step, duration;
  std::string model;
};

inline RandomIdParts random_id_parts(std::mt19937& rng) {
  std::uniform_real_distribution<double> lo(0.0, 10.0);
  std::uniform_real_distribution<double> span(1.0, 15.0);
  std::uniform_real_distribution<double> step(0.1, 8.0);
  std::uniform_real_distribution<double> sa_span(0.2, 1.5);
  std::uniform_real_distribution<double> sa_step(0.1, 2.0);
  std::uniform_real_distribution<double> dur(0.1, 2.0);
  static const char* models[] = {"BMW_320i", "FORD_ESCORT", "VW_VANAGON_T3", "KIT"};
  std::uniform_int_distribution<int> model_pick(0, 3);
  RandomIdParts p;
  p.v_min = lo(rng);
  p.v_max = p.v_min + span(rng);
  p.v_step = step(rng);
  p.sa_max = sa_span(rng);
  p.sa_min = -p.sa_max;
  p.sa_step = sa_step(rng);
  p.duration = dur(rng);
  p.model = models[model_pick(rng)];
  return p;
}

// Renders a value in one of several equivalent spellings; all keep at
// least one decimal so rounding cannot break the ordering invariants.
inline std::string vary_number_text(double v, std::mt19937& rng) {
  char buf[64];
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0: std::snprintf(buf, sizeof(buf), "%.1f", v); break;
    case 1: std::snprintf(buf, sizeof(buf), "%.3f", v); break;
    case 2: std::snprintf(buf, sizeof(buf), "%.6f", v); break;
    default: std::snprintf(buf, sizeof(buf), "%.2f", v); break;
  }
  return buf;
}

inline std::string random_id_text(std::mt19937& rng) {
  RandomIdParts p = random_id_parts(rng);
  // rounded spellings could reorder near-equal bounds; re-separate them
  p.v_max = p.v_min + std::max(1.0, p.v_max - p.v_min);
  return "V_" + vary_number_text(p.v_min, rng) + "_" + vary_number_text(p.v_max, rng) +
         "_Vstep_" + vary_number_text(p.v_step, rng) + "_SA_" +
         vary_number_text(p.sa_min, rng) + "_" + vary_number_text(p.sa_max, rng) +
         "_SAstep_" + vary_number_text(p.sa_step, rng) + "_T_" +
         vary_number_text(p.duration, rng) + "_Model_" + p.model;
}

/* ---------- random trajectories and evaluation contexts ---------- */

inline Trajectory random_trajectory(std::mt19937& rng, int min_len = 1,
                                    int max_len = 40) {
  std::uniform_int_distribution<int> len_pick(min_len, max_len);
  std::uniform_int_distribution<int> start_pick(0, 5);
  std::uniform_real_distribution<double> pos(-30.0, 30.0);
  std::uniform_real_distribution<double> step(-2.0, 2.0);
  std::uniform_real_distribution<double> vel(0.0, 25.0);
  std::uniform_real_distribution<double> steer(-1.5, 1.5);
  std::uniform_real_distribution<double> heading(-M_PI, M_PI);

  Trajectory t;
  t.dt = 0.1;
  const int len = len_pick(rng);
  int ts = start_pick(rng);
  double x = pos(rng), y = pos(rng);
  for (int i = 0; i < len; ++i) {
    t.states.push_back(VehicleState{x, y, wrap_angle(heading(rng)), vel(rng),
                                    steer(rng), ts});
    x += step(rng);
    y += step(rng);
    ++ts;
  }
  return t;
}

// A self-contained bundle: trajectory + scenario + problem with stable
// addresses, plus a valid segment_begin into the trajectory.
struct RandomWorld {
  Trajectory traj;
  Scenario scenario;
  PlanningProblem problem;
  std::size_t segment_begin = 0;

  NodeContext context() const { return {&traj, segment_begin, &problem, &scenario}; }
};

inline RandomWorld random_world(std::mt19937& rng) {
  std::uniform_real_distribution<double> pos(-30.0, 30.0);
  std::uniform_real_distribution<double> half(0.5, 6.0);
  std::uniform_int_distribution<int> lane_count(0, 2);
  std::uniform_int_distribution<int> point_count(2, 4);
  std::uniform_int_distribution<int> coin(0, 1);

  RandomWorld w;
  w.traj = random_trajectory(rng, 1, 25);
  std::uniform_int_distribution<std::size_t> seg(0, w.traj.states.size() - 1);
  w.segment_begin = seg(rng);

  w.scenario.dt = w.traj.dt;
  w.scenario.horizon = w.traj.states.back().time_step + 5;
  const int lanes = lane_count(rng);
  for (int l = 0; l < lanes; ++l) {
    Lanelet lane;
    lane.width = 4.0;
    const int pts = point_count(rng);
    for (int i = 0; i < pts; ++i) lane.centerline.push_back({pos(rng), pos(rng)});
    w.scenario.lanelets.push_back(std::move(lane));
  }

  w.problem.initial_state = w.traj.states.front();
  w.problem.initial_state.time_step = 0;
  w.problem.goal.center = {pos(rng), pos(rng)};
  w.problem.goal.half_x = half(rng);
  w.problem.goal.half_y = half(rng);
  w.problem.goal.t_start = 0;
  w.problem.goal.t_end = w.scenario.horizon;
  if (coin(rng)) w.problem.goal.velocity_interval = Interval{5.0, 15.0};
  return w;
}

}  // namespace oracles
