#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdoc/heuristic_dsl.hpp"
#include "pdoc/motion_primitives.hpp"
#include "pdoc/scenario.hpp"

namespace pdoc {

inline constexpr int kDefaultMaxExpansions = 100000;

// The patchable planner state: heuristic expression + primitive-set choice.
struct PlannerConfig {
  HeuristicSpec heuristic;
  std::string heuristic_text;  // source the heuristic was parsed from
  PrimitiveSetId primitive_set_id;
  int max_expansions = kDefaultMaxExpansions;
};

// Parses both patchable components; throws DslError / MalformedIdError.
PlannerConfig make_planner_config(const std::string& heuristic_text,
                                  const std::string& primitive_id_text,
                                  int max_expansions = kDefaultMaxExpansions);

struct PlanOutcome {
  std::optional<Trajectory> trajectory;  // empty = NoSolution
  double g_cost = 0.0;                   // of the returned trajectory
  long long expansions = 0;              // nodes whose successors were generated
};

// A* over the primitive lattice. g is pure duration; priority adds the
// (not necessarily admissible) DSL heuristic. Expansion appends whole
// primitives, clipped at the scenario horizon. Ties break on lower g,
// then insertion order. Throws InfeasibleStartError when the initial
// velocity/steering cannot snap to the sample grid (beyond half a step).
PlanOutcome plan(const Scenario& scenario, const PlanningProblem& problem,
                 const PlannerConfig& config, const PrimitiveSet& primitive_set);

// g-increment of one path segment: its duration in seconds.
double step_cost(const std::vector<VehicleState>& segment,
                 const PlanningProblem& problem, double dt);

// True iff no state's footprint rectangle intersects any obstacle
// rectangle at that state's time step. Throws HorizonExceededError for
// time steps past the scenario horizon.
bool collision_free(const std::vector<VehicleState>& states, const Scenario& scenario,
                    const VehicleModelParams& params);

}  // namespace pdoc
