#pragma once

#include "pdoc/scenario.hpp"

namespace pdoc {

// Component weights for the trajectory objective; defaults follow the
// standard weighting this evaluator targets.
struct CostWeights {
  double w_A = 50.0;
  double w_SA = 50.0;
  double w_SR = 50.0;
  double w_LC = 1.0;
  double w_O = 50.0;
  double w_V = 20.0;
};

struct CostBreakdown {
  double J_A = 0.0;   // squared acceleration
  double J_SA = 0.0;  // squared steering angle
  double J_SR = 0.0;  // squared steering rate
  double J_LC = 0.0;  // squared lane-center distance
  double J_O = 0.0;   // squared orientation offset to the lane
  double J_V = 0.0;   // squared deviation from the desired velocity
};

struct ComparisonReport {
  CostBreakdown delta;     // after - before, per component
  double total_delta = 0.0;
  double relative_decrement = 0.0;  // (J_before - J_after) / J_before
  bool improvement = false;         // J_after < J_before
  bool before_total_zero = false;   // decrement reported as 0 in that case
};

// Unweighted Riemann-sum components at the trajectory's dt. Pointwise
// terms sum over every state; difference-based terms over consecutive
// pairs. Lane terms are 0 when the scenario has no lanelets; J_V is 0
// when the goal carries no velocity interval (otherwise v_des is the
// interval midpoint).
CostBreakdown compute_partial_costs(const Trajectory& traj, const Scenario& scenario,
                                    const PlanningProblem& problem);

// Weighted sum of the six components.
double aggregate(const CostBreakdown& breakdown, const CostWeights& weights);

ComparisonReport compare(const CostBreakdown& before_components, double before_total,
                         const CostBreakdown& after_components, double after_total);

}  // namespace pdoc
