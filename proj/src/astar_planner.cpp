#include "pdoc/astar_planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <queue>
#include <sstream>
#include <tuple>

#include "pdoc/errors.hpp"
#include "pdoc/geometry.hpp"

namespace pdoc {
namespace {

// Duplicate-detection key: pose quantized (0.1 m / 0.05 rad), exact grid
// indices, exact time step.
struct NodeKey {
  std::int64_t qx, qy, qth;
  int v_idx, sa_idx, time_step;

  friend bool operator<(const NodeKey& a, const NodeKey& b) {
    return std::tie(a.qx, a.qy, a.qth, a.v_idx, a.sa_idx, a.time_step) <
           std::tie(b.qx, b.qy, b.qth, b.v_idx, b.sa_idx, b.time_step);
  }
};

NodeKey make_key(const VehicleState& s, int v_idx, int sa_idx) {
  return NodeKey{std::llround(s.x / 0.1), std::llround(s.y / 0.1),
                 std::llround(wrap_angle(s.orientation) / 0.05), v_idx, sa_idx,
                 s.time_step};
}

struct SearchNode {
  std::shared_ptr<const SearchNode> parent;
  std::vector<VehicleState> appended;  // root: just the start state
  double g = 0.0;
  int v_idx = 0, sa_idx = 0;
  bool reaches_goal = false;
};

std::vector<VehicleState> materialize(const SearchNode* node) {
  std::vector<const SearchNode*> chain;
  for (const SearchNode* n = node; n != nullptr; n = n->parent.get()) chain.push_back(n);
  std::vector<VehicleState> path;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    path.insert(path.end(), (*it)->appended.begin(), (*it)->appended.end());
  return path;
}

struct QueueEntry {
  double f;
  double g;
  std::uint64_t seq;
  std::shared_ptr<const SearchNode> node;

  friend bool operator>(const QueueEntry& a, const QueueEntry& b) {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g > b.g;
    return a.seq > b.seq;
  }
};

// Nearest sample index, or nullopt when the value sits farther than half
// the grid spacing from every sample. Ties go to the lower index.
std::optional<int> snap_to_grid(double value, const std::vector<double>& samples,
                                double nominal_step) {
  if (samples.empty()) return std::nullopt;
  double spacing = samples.size() > 1 ? samples[1] - samples[0] : nominal_step;
  int best = 0;
  double best_dist = std::abs(value - samples[0]);
  for (int i = 1; i < static_cast<int>(samples.size()); ++i) {
    double d = std::abs(value - samples[i]);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  if (best_dist > spacing / 2.0 + 1e-9) return std::nullopt;
  return best;
}

OrientedRect footprint(double x, double y, double heading, double length, double width) {
  return OrientedRect{Vec2{x, y}, length / 2.0, width / 2.0, heading};
}

}  // namespace

PlannerConfig make_planner_config(const std::string& heuristic_text,
                                  const std::string& primitive_id_text,
                                  int max_expansions) {
  PlannerConfig cfg;
  cfg.heuristic = parse_heuristic(heuristic_text);
  cfg.heuristic_text = heuristic_text;
  cfg.primitive_set_id = parse_primitive_id(primitive_id_text);
  cfg.max_expansions = max_expansions;
  return cfg;
}

double step_cost(const std::vector<VehicleState>& segment,
                 const PlanningProblem& problem, double dt) {
  (void)problem;
  if (segment.size() < 2) return 0.0;
  return (segment.back().time_step - segment.front().time_step) * dt;
}

bool collision_free(const std::vector<VehicleState>& states, const Scenario& scenario,
                    const VehicleModelParams& params) {
  for (const VehicleState& s : states) {
    if (s.time_step > scenario.horizon) {
      std::ostringstream msg;
      msg << "time step " << s.time_step << " exceeds scenario horizon "
          << scenario.horizon;
      throw HorizonExceededError(msg.str());
    }
    OrientedRect ego = footprint(s.x, s.y, s.orientation, params.length, params.width);
    for (const Obstacle& obs : scenario.obstacles) {
      if (s.time_step < 0 || s.time_step >= static_cast<int>(obs.poses.size()))
        continue;
      const Pose& p = obs.poses[s.time_step];
      OrientedRect other = footprint(p.x, p.y, p.theta, obs.length, obs.width);
      if (rects_overlap(ego, other)) return false;
    }
  }
  return true;
}

PlanOutcome plan(const Scenario& scenario, const PlanningProblem& problem,
                 const PlannerConfig& config, const PrimitiveSet& primitive_set) {
  if (std::abs(primitive_set.dt - scenario.dt) > 1e-12)
    throw ConfigError("primitive set was generated at dt " +
                      std::to_string(primitive_set.dt) + " but the scenario uses dt " +
                      std::to_string(scenario.dt));

  const auto& id = primitive_set.id;
  auto v_idx = snap_to_grid(problem.initial_state.velocity, primitive_set.v_samples,
                            id.v_step);
  auto sa_idx = snap_to_grid(problem.initial_state.steering_angle,
                             primitive_set.sa_samples, id.sa_step);
  if (!v_idx || !sa_idx) {
    std::ostringstream msg;
    msg << "initial state (v=" << problem.initial_state.velocity
        << ", steering=" << problem.initial_state.steering_angle
        << ") does not lie on the sample grid of " << format_primitive_id(id);
    throw InfeasibleStartError(msg.str());
  }

  VehicleState root_state = problem.initial_state;
  root_state.velocity = primitive_set.v_samples[*v_idx];
  root_state.steering_angle = primitive_set.sa_samples[*sa_idx];
  root_state.orientation = wrap_angle(root_state.orientation);
  root_state.time_step = 0;

  PlanOutcome outcome;
  if (!collision_free({root_state}, scenario, primitive_set.params)) return outcome;

  auto eval_h = [&](const std::vector<VehicleState>& path, std::size_t seg_begin) {
    Trajectory t{path, scenario.dt};
    NodeContext ctx{&t, seg_begin, &problem, &scenario};
    return evaluate_heuristic(config.heuristic, ctx);
  };

  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<QueueEntry>> open;
  std::map<NodeKey, double> best_g;
  std::uint64_t seq = 0;

  auto root = std::make_shared<SearchNode>();
  root->appended = {root_state};
  root->g = 0.0;
  root->v_idx = *v_idx;
  root->sa_idx = *sa_idx;
  root->reaches_goal = goal_reached(Trajectory{{root_state}, scenario.dt}, problem.goal);
  best_g[make_key(root_state, root->v_idx, root->sa_idx)] = 0.0;
  open.push(QueueEntry{eval_h({root_state}, 0), 0.0, seq++, root});

  while (!open.empty()) {
    QueueEntry top = open.top();
    open.pop();
    const SearchNode* node = top.node.get();
    const VehicleState& tail = node->appended.back();
    NodeKey key = make_key(tail, node->v_idx, node->sa_idx);
    auto it = best_g.find(key);
    if (it != best_g.end() && top.g > it->second + 1e-12) continue;  // superseded

    if (node->reaches_goal) {
      outcome.trajectory = Trajectory{materialize(node), scenario.dt};
      outcome.g_cost = node->g;
      return outcome;
    }

    if (outcome.expansions >= config.max_expansions) return outcome;
    ++outcome.expansions;

    if (tail.time_step >= scenario.horizon) continue;  // no room to extend

    for (int pidx : primitive_set.starting_at(node->v_idx, node->sa_idx)) {
      const MotionPrimitive& prim = primitive_set.primitives[pidx];
      std::vector<VehicleState> segment = transform_primitive(prim, tail);
      // clip at the horizon; a clipped segment still costs its real duration
      while (!segment.empty() && segment.back().time_step > scenario.horizon)
        segment.pop_back();
      if (segment.size() < 2) continue;
      std::vector<VehicleState> fresh(segment.begin() + 1, segment.end());
      if (!collision_free(fresh, scenario, primitive_set.params)) continue;

      double child_g = node->g + step_cost(segment, problem, scenario.dt);
      NodeKey child_key = make_key(segment.back(), prim.v_end_idx, prim.sa_end_idx);
      auto found = best_g.find(child_key);
      if (found != best_g.end() && child_g >= found->second - 1e-12) continue;
      best_g[child_key] = child_g;

      auto child = std::make_shared<SearchNode>();
      child->parent = top.node;
      child->appended = std::move(fresh);
      child->g = child_g;
      child->v_idx = prim.v_end_idx;
      child->sa_idx = prim.sa_end_idx;

      std::vector<VehicleState> path = materialize(child.get());
      std::size_t seg_begin = path.size() - segment.size();
      Trajectory full{path, scenario.dt};
      child->reaches_goal = goal_reached(full, problem.goal);
      double h = eval_h(path, seg_begin);
      open.push(QueueEntry{child_g + h, child_g, seq++, child});
    }
  }
  return outcome;
}

}  // namespace pdoc
