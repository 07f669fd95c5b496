#include "pdoc/trajectory_evaluator.hpp"

#include <cmath>

namespace pdoc {

CostBreakdown compute_partial_costs(const Trajectory& traj, const Scenario& scenario,
                                    const PlanningProblem& problem) {
  CostBreakdown b;
  const auto& st = traj.states;
  const double dt = traj.dt;

  for (size_t i = 0; i + 1 < st.size(); ++i) {
    const double a = (st[i + 1].velocity - st[i].velocity) / dt;
    const double sr = (st[i + 1].steering_angle - st[i].steering_angle) / dt;
    b.J_A += a * a * dt;
    b.J_SR += sr * sr * dt;
  }

  double v_des = 0.0;
  bool has_v_des = false;
  if (problem.goal.velocity_interval) {
    v_des = 0.5 * (problem.goal.velocity_interval->lo + problem.goal.velocity_interval->hi);
    has_v_des = true;
  }

  const bool has_lanes = !scenario.lanelets.empty();
  for (const VehicleState& s : st) {
    b.J_SA += s.steering_angle * s.steering_angle * dt;
    if (has_lanes) {
      const LaneOffsets off = lane_offsets(s, scenario);
      b.J_LC += off.lateral * off.lateral * dt;
      b.J_O += off.orientation * off.orientation * dt;
    }
    if (has_v_des) {
      const double dv = s.velocity - v_des;
      b.J_V += dv * dv * dt;
    }
  }
  return b;
}

double aggregate(const CostBreakdown& b, const CostWeights& w) {
  return w.w_A * b.J_A + w.w_SA * b.J_SA + w.w_SR * b.J_SR + w.w_LC * b.J_LC +
         w.w_O * b.J_O + w.w_V * b.J_V;
}

ComparisonReport compare(const CostBreakdown& before_components, double before_total,
                         const CostBreakdown& after_components, double after_total) {
  ComparisonReport r;
  r.delta.J_A = after_components.J_A - before_components.J_A;
  r.delta.J_SA = after_components.J_SA - before_components.J_SA;
  r.delta.J_SR = after_components.J_SR - before_components.J_SR;
  r.delta.J_LC = after_components.J_LC - before_components.J_LC;
  r.delta.J_O = after_components.J_O - before_components.J_O;
  r.delta.J_V = after_components.J_V - before_components.J_V;
  r.total_delta = after_total - before_total;
  r.improvement = after_total < before_total;
  if (before_total == 0.0) {
    r.before_total_zero = true;
    r.relative_decrement = 0.0;
  } else {
    r.relative_decrement = (before_total - after_total) / before_total;
  }
  return r;
}

}  // namespace pdoc
