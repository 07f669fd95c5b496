#include "pdoc/heuristic_dsl.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "pdoc/errors.hpp"

namespace pdoc {

namespace {
constexpr int kMaxDepth = 64;
constexpr double kZeroVelocityEps = 1e-8;
}  // namespace

ExprPtr make_constant(double v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Constant;
  e->value = v;
  return e;
}

ExprPtr make_feature(const std::string& name) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Feature;
  e->feature = name;
  return e;
}

ExprPtr make_binary(Expr::Kind kind, ExprPtr left, ExprPtr right) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->left = std::move(left);
  e->right = std::move(right);
  return e;
}

bool FeatureCatalog::contains(const std::string& name) const {
  for (const FeatureEntry& f : entries) {
    if (f.name == name) return true;
  }
  return false;
}

const FeatureCatalog& list_features() {
  static const FeatureCatalog catalog{{
      {"orientation_to_goal_diff",
       "absolute difference between heading-to-goal and current orientation", "rad"},
      {"time_cost", "duration of the last path segment", "s"},
      {"distance_to_goal", "Euclidean distance to goal center", "m"},
      {"velocity", "current velocity", "m/s"},
      {"remaining_desired_time", "goal start time minus current time", "s"},
      {"acceleration_cost", "Returns the acceleration costs.", "m^2/s^3"},
      {"path_efficiency",
       "wasted share of the last segment's traveled length versus straight-line "
       "progress (0 for straight motion, 1 for standing still)",
       "-"},
      {"steering_angle_cost",
       "sum of squared steering angles over the last segment, times dt", "rad^2*s"},
      {"steering_velocity_cost",
       "sum of squared steering rates over the last segment, times dt", "rad^2/s"},
      {"time_to_goal",
       "estimated time to reach the goal: distance to goal center divided by current "
       "velocity (0 once the goal is reached, 1e6 when standing)",
       "s"},
  }};
  return catalog;
}

/* ---------------- parser ---------------- */

namespace {

struct Token {
  enum class Kind { Number, Ident, Plus, Minus, Star, Slash, LParen, RParen, Comma, End };
  Kind kind;
  std::string text;
  double number = 0.0;
  size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  Token next() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
    const size_t start = i_;
    if (i_ >= src_.size()) return {Token::Kind::End, "", 0.0, start};
    const char c = src_[i_];
    switch (c) {
      case '+': ++i_; return {Token::Kind::Plus, "+", 0.0, start};
      case '-': ++i_; return {Token::Kind::Minus, "-", 0.0, start};
      case '*': ++i_; return {Token::Kind::Star, "*", 0.0, start};
      case '/': ++i_; return {Token::Kind::Slash, "/", 0.0, start};
      case '(': ++i_; return {Token::Kind::LParen, "(", 0.0, start};
      case ')': ++i_; return {Token::Kind::RParen, ")", 0.0, start};
      case ',': ++i_; return {Token::Kind::Comma, ",", 0.0, start};
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t j = i_;
      while (j < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[j])) ||
                                 src_[j] == '.')) {
        ++j;
      }
      if (j < src_.size() && (src_[j] == 'e' || src_[j] == 'E')) {
        size_t k = j + 1;
        if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
        size_t digits = k;
        while (digits < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[digits]))) {
          ++digits;
        }
        if (digits > k) j = digits;
      }
      const std::string text = src_.substr(i_, j - i_);
      char* end = nullptr;
      const double v = std::strtod(text.c_str(), &end);
      if (end != text.c_str() + text.size() || !std::isfinite(v)) {
        throw DslError("heuristic syntax error at position " + std::to_string(start) +
                       ": bad number '" + text + "'");
      }
      i_ = j;
      return {Token::Kind::Number, text, v, start};
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i_;
      while (j < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[j])) ||
                                 src_[j] == '_')) {
        ++j;
      }
      const std::string text = src_.substr(i_, j - i_);
      i_ = j;
      return {Token::Kind::Ident, text, 0.0, start};
    }
    throw DslError("heuristic syntax error at position " + std::to_string(start) +
                   ": unexpected character '" + std::string(1, c) + "'");
  }

 private:
  const std::string& src_;
  size_t i_ = 0;
};

std::string valid_feature_names() {
  std::string names;
  for (const FeatureEntry& f : list_features().entries) {
    if (!names.empty()) names += ", ";
    names += f.name;
  }
  return names;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : lexer_(src) { advance(); }

  ExprPtr parse() {
    ExprPtr e = expr(0);
    if (cur_.kind != Token::Kind::End) {
      throw DslError("heuristic syntax error at position " + std::to_string(cur_.pos) +
                     ": unexpected token '" + cur_.text + "'");
    }
    return e;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  void check_depth(int depth) {
    if (depth > kMaxDepth) {
      throw DslError("heuristic expression exceeds maximum depth of " +
                     std::to_string(kMaxDepth));
    }
  }

  ExprPtr expr(int depth) {
    check_depth(depth);
    ExprPtr e = term(depth + 1);
    while (cur_.kind == Token::Kind::Plus || cur_.kind == Token::Kind::Minus) {
      const Expr::Kind op =
          cur_.kind == Token::Kind::Plus ? Expr::Kind::Add : Expr::Kind::Sub;
      advance();
      e = make_binary(op, e, term(depth + 1));
    }
    return e;
  }

  ExprPtr term(int depth) {
    check_depth(depth);
    ExprPtr e = factor(depth + 1);
    while (cur_.kind == Token::Kind::Star || cur_.kind == Token::Kind::Slash) {
      const Expr::Kind op =
          cur_.kind == Token::Kind::Star ? Expr::Kind::Mul : Expr::Kind::Div;
      advance();
      e = make_binary(op, e, factor(depth + 1));
    }
    return e;
  }

  ExprPtr factor(int depth) {
    check_depth(depth);
    if (cur_.kind == Token::Kind::Number) {
      ExprPtr e = make_constant(cur_.number);
      advance();
      return e;
    }
    if (cur_.kind == Token::Kind::LParen) {
      advance();
      ExprPtr e = expr(depth + 1);
      expect(Token::Kind::RParen, ")");
      return e;
    }
    if (cur_.kind == Token::Kind::Ident) {
      const std::string name = cur_.text;
      const size_t pos = cur_.pos;
      advance();
      Expr::Kind func;
      bool is_func = true;
      if (name == "min") {
        func = Expr::Kind::Min;
      } else if (name == "max") {
        func = Expr::Kind::Max;
      } else if (name == "if_reached_goal") {
        func = Expr::Kind::IfReachedGoal;
      } else if (name == "if_zero_velocity") {
        func = Expr::Kind::IfZeroVelocity;
      } else {
        is_func = false;
      }
      if (is_func) {
        expect(Token::Kind::LParen, "(");
        ExprPtr a = expr(depth + 1);
        expect(Token::Kind::Comma, ",");
        ExprPtr b = expr(depth + 1);
        expect(Token::Kind::RParen, ")");
        return make_binary(func, a, b);
      }
      if (!list_features().contains(name)) {
        throw DslError("unknown feature '" + name + "' at position " +
                       std::to_string(pos) + "; valid features are: " +
                       valid_feature_names());
      }
      return make_feature(name);
    }
    throw DslError("heuristic syntax error at position " + std::to_string(cur_.pos) +
                   ": expected a number, feature, or '(' but found '" +
                   (cur_.kind == Token::Kind::End ? "end of input" : cur_.text) + "'");
  }

  void expect(Token::Kind kind, const char* what) {
    if (cur_.kind != kind) {
      throw DslError("heuristic syntax error at position " + std::to_string(cur_.pos) +
                     ": expected '" + what + "' but found '" +
                     (cur_.kind == Token::Kind::End ? "end of input" : cur_.text) + "'");
    }
    advance();
  }

  Lexer lexer_;
  Token cur_;
};

}  // namespace

HeuristicSpec parse_heuristic(const std::string& text) {
  Parser p(text);
  HeuristicSpec spec{p.parse()};
  validate_spec(spec);
  return spec;
}

/* ---------------- renderer ---------------- */

namespace {

int precedence(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
      return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div:
      return 2;
    default:
      return 3;  // atoms and function calls never need wrapping
  }
}

std::string render_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void render(const ExprPtr& e, std::string& out) {
  switch (e->kind) {
    case Expr::Kind::Constant:
      if (e->value < 0.0) {
        out += "(0 - " + render_number(-e->value) + ")";
      } else {
        out += render_number(e->value);
      }
      return;
    case Expr::Kind::Feature:
      out += e->feature;
      return;
    case Expr::Kind::Min:
    case Expr::Kind::Max:
    case Expr::Kind::IfReachedGoal:
    case Expr::Kind::IfZeroVelocity: {
      const char* name = e->kind == Expr::Kind::Min              ? "min"
                         : e->kind == Expr::Kind::Max            ? "max"
                         : e->kind == Expr::Kind::IfReachedGoal  ? "if_reached_goal"
                                                                 : "if_zero_velocity";
      out += name;
      out += "(";
      render(e->left, out);
      out += ", ";
      render(e->right, out);
      out += ")";
      return;
    }
    default:
      break;
  }
  const int prec = precedence(e->kind);
  const char* op = e->kind == Expr::Kind::Add   ? " + "
                   : e->kind == Expr::Kind::Sub ? " - "
                   : e->kind == Expr::Kind::Mul ? " * "
                                                : " / ";
  // Left-associative grammar: the right child needs parentheses at equal
  // precedence to survive a re-parse structurally intact.
  const bool lp = precedence(e->left->kind) < prec;
  const bool rp = precedence(e->right->kind) <= prec;
  if (lp) out += "(";
  render(e->left, out);
  if (lp) out += ")";
  out += op;
  if (rp) out += "(";
  render(e->right, out);
  if (rp) out += ")";
}

}  // namespace

std::string render_heuristic(const HeuristicSpec& spec) {
  std::string out;
  render(spec.root, out);
  return out;
}

/* ---------------- evaluation ---------------- */

namespace {

const VehicleState& last_state(const NodeContext& ctx) {
  return ctx.full_path->states.back();
}

double segment_sum_pairs(const NodeContext& ctx, double (*get)(const VehicleState&)) {
  const auto& states = ctx.full_path->states;
  const double dt = ctx.full_path->dt;
  double sum = 0.0;
  for (size_t i = ctx.segment_begin; i + 1 < states.size(); ++i) {
    const double rate = (get(states[i + 1]) - get(states[i])) / dt;
    sum += rate * rate * dt;
  }
  return sum;
}

bool context_goal_reached(const NodeContext& ctx) {
  return goal_reached(*ctx.full_path, ctx.problem->goal);
}

double eval(const ExprPtr& e, const NodeContext& ctx);

double sanitize(double v) { return std::isfinite(v) ? v : kDivisionGuard; }

double eval(const ExprPtr& e, const NodeContext& ctx) {
  switch (e->kind) {
    case Expr::Kind::Constant:
      return e->value;
    case Expr::Kind::Feature:
      return evaluate_feature(e->feature, ctx);
    case Expr::Kind::Add:
      return sanitize(eval(e->left, ctx) + eval(e->right, ctx));
    case Expr::Kind::Sub:
      return sanitize(eval(e->left, ctx) - eval(e->right, ctx));
    case Expr::Kind::Mul:
      return sanitize(eval(e->left, ctx) * eval(e->right, ctx));
    case Expr::Kind::Div: {
      const double den = eval(e->right, ctx);
      if (std::fabs(den) < 1e-12) return kDivisionGuard;
      return sanitize(eval(e->left, ctx) / den);
    }
    case Expr::Kind::Min:
      return std::min(eval(e->left, ctx), eval(e->right, ctx));
    case Expr::Kind::Max:
      return std::max(eval(e->left, ctx), eval(e->right, ctx));
    case Expr::Kind::IfReachedGoal:
      return context_goal_reached(ctx) ? eval(e->left, ctx) : eval(e->right, ctx);
    case Expr::Kind::IfZeroVelocity:
      return std::fabs(last_state(ctx).velocity) < kZeroVelocityEps
                 ? eval(e->left, ctx)
                 : eval(e->right, ctx);
  }
  return 0.0;
}

}  // namespace

double evaluate_feature(const std::string& name, const NodeContext& ctx) {
  const VehicleState& s = last_state(ctx);
  const GoalRegion& goal = ctx.problem->goal;
  const auto& states = ctx.full_path->states;
  const double dt = ctx.full_path->dt;

  if (name == "orientation_to_goal_diff") {
    const double heading = std::atan2(goal.center.y - s.y, goal.center.x - s.x);
    return angle_abs_diff(heading, s.orientation);
  }
  if (name == "time_cost") {
    return (states.size() - 1 - ctx.segment_begin) * dt;
  }
  if (name == "distance_to_goal") return distance_to_goal(s, goal);
  if (name == "velocity") return s.velocity;
  if (name == "remaining_desired_time") {
    return (goal.t_start - s.time_step) * dt;
  }
  if (name == "acceleration_cost") {
    return segment_sum_pairs(ctx, [](const VehicleState& st) { return st.velocity; });
  }
  if (name == "path_efficiency") {
    double arc = 0.0;
    for (size_t i = ctx.segment_begin; i + 1 < states.size(); ++i) {
      arc += std::hypot(states[i + 1].x - states[i].x, states[i + 1].y - states[i].y);
    }
    if (arc < 1e-9) return 1.0;
    const VehicleState& a = states[ctx.segment_begin];
    const double chord = std::hypot(s.x - a.x, s.y - a.y);
    return std::max(0.0, 1.0 - chord / arc);
  }
  if (name == "steering_angle_cost") {
    double sum = 0.0;
    for (size_t i = ctx.segment_begin; i < states.size(); ++i) {
      sum += states[i].steering_angle * states[i].steering_angle * dt;
    }
    return sum;
  }
  if (name == "steering_velocity_cost") {
    return segment_sum_pairs(ctx,
                             [](const VehicleState& st) { return st.steering_angle; });
  }
  if (name == "time_to_goal") {
    if (context_goal_reached(ctx)) return 0.0;
    if (std::fabs(s.velocity) < kZeroVelocityEps) return kDivisionGuard;
    return distance_to_goal(s, goal) / s.velocity;
  }
  throw DslError("unknown feature '" + name + "'; valid features are: " +
                 valid_feature_names());
}

double evaluate_heuristic(const HeuristicSpec& spec, const NodeContext& ctx) {
  const double v = sanitize(eval(spec.root, ctx));
  return std::max(v, 0.0);
}

/* ---------------- validation ---------------- */

namespace {

void validate_node(const ExprPtr& e, int depth) {
  if (!e) throw DslError("heuristic AST contains a null node");
  if (depth > kMaxDepth) {
    throw DslError("heuristic expression exceeds maximum depth of " +
                   std::to_string(kMaxDepth));
  }
  switch (e->kind) {
    case Expr::Kind::Constant:
      if (!std::isfinite(e->value)) {
        throw DslError("heuristic AST contains a non-finite constant");
      }
      return;
    case Expr::Kind::Feature:
      if (!list_features().contains(e->feature)) {
        throw DslError("unknown feature '" + e->feature + "'; valid features are: " +
                       valid_feature_names());
      }
      return;
    default:
      validate_node(e->left, depth + 1);
      validate_node(e->right, depth + 1);
  }
}

}  // namespace

void validate_spec(const HeuristicSpec& spec) { validate_node(spec.root, 1); }

}  // namespace pdoc
