#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pdoc/scenario.hpp"

namespace pdoc {

// Expression AST for heuristic functions. Immutable; nodes shared freely.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind {
    Constant,
    Feature,
    Add,
    Sub,
    Mul,
    Div,
    Min,
    Max,
    IfReachedGoal,   // if_reached_goal(then, else)
    IfZeroVelocity,  // if_zero_velocity(then, else)
  };

  Kind kind = Kind::Constant;
  double value = 0.0;    // Constant
  std::string feature;   // Feature
  ExprPtr left, right;   // binary nodes
};

ExprPtr make_constant(double v);
ExprPtr make_feature(const std::string& name);
ExprPtr make_binary(Expr::Kind kind, ExprPtr left, ExprPtr right);

struct HeuristicSpec {
  ExprPtr root;
};

struct FeatureEntry {
  std::string name;
  std::string docstring;
  std::string unit;
};

struct FeatureCatalog {
  std::vector<FeatureEntry> entries;

  bool contains(const std::string& name) const;
};

// Evaluation context: the partial path so far with its trailing primitive
// segment, plus the problem/scenario the features are measured against.
struct NodeContext {
  const Trajectory* full_path = nullptr;
  std::size_t segment_begin = 0;  // last segment = states[segment_begin..]
  const PlanningProblem* problem = nullptr;
  const Scenario* scenario = nullptr;
};

// The fixed feature catalog available to heuristic expressions.
const FeatureCatalog& list_features();

// Parses the expression grammar:
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := NUMBER | IDENT | "(" expr ")" | FUNC "(" expr "," expr ")"
//   FUNC   ∈ {min, max, if_reached_goal, if_zero_velocity}
// Throws DslError with position on syntax errors; unknown identifiers get
// an error listing the valid feature names (reused as LLM feedback).
HeuristicSpec parse_heuristic(const std::string& text);

// Canonical text; parse_heuristic(render_heuristic(s)) is structurally
// identical to s. Negative constants (not expressible in the grammar)
// render as (0 - c).
std::string render_heuristic(const HeuristicSpec& spec);

// Total evaluation: division by |den| < 1e-12 yields 1e6, non-finite
// intermediates collapse to 1e6, and the final value is clamped to >= 0.
double evaluate_heuristic(const HeuristicSpec& spec, const NodeContext& ctx);

// Single feature value; finite for any valid context.
double evaluate_feature(const std::string& name, const NodeContext& ctx);

// Checks catalog membership, depth <= 64, finite constants. Throws DslError.
void validate_spec(const HeuristicSpec& spec);

inline constexpr double kDivisionGuard = 1e6;

}  // namespace pdoc
