#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pdoc/scenario.hpp"

namespace pdoc {

// Parsed fields of the primitive-set naming grammar:
//   V_{vmin}_{vmax}_Vstep_{dv}_SA_{samin}_{samax}_SAstep_{dsa}_T_{tau}_Model_{m}
struct PrimitiveSetId {
  double v_min = 0.0;
  double v_max = 0.0;
  double v_step = 0.0;
  double sa_min = 0.0;
  double sa_max = 0.0;
  double sa_step = 0.0;
  double duration = 0.0;  // tau, seconds
  std::string model;

  // Textual forms captured by parse_primitive_id, in field order above.
  // format_primitive_id reuses them so round-trips are byte-exact; empty
  // entries (fresh construction) fall back to canonical rendering.
  std::array<std::string, 7> raw{};

  friend bool operator==(const PrimitiveSetId& a, const PrimitiveSetId& b) {
    return a.v_min == b.v_min && a.v_max == b.v_max && a.v_step == b.v_step &&
           a.sa_min == b.sa_min && a.sa_max == b.sa_max && a.sa_step == b.sa_step &&
           a.duration == b.duration && a.model == b.model;
  }
};

struct VehicleModelParams {
  double wheelbase = 2.578;
  double length = 4.508;
  double width = 1.610;
  double a_max = 11.5;          // |accel| bound, m/s^2
  double steer_rate_max = 0.4;  // |steer rate| bound, rad/s
  std::optional<double> v_switch;  // acceleration derated above this speed
};

// Conventional parameters for the named model family. Unknown models get
// the BMW_320i values; callers needing different dynamics pass their own.
VehicleModelParams default_model_params(const std::string& model);

struct MotionPrimitive {
  std::vector<VehicleState> states;  // canonical frame, first pose (0,0,0)
  double v_start = 0.0, v_end = 0.0;
  double sa_start = 0.0, sa_end = 0.0;
  double accel = 0.0;       // constant input
  double steer_rate = 0.0;  // constant input
  int v_start_idx = 0, v_end_idx = 0;
  int sa_start_idx = 0, sa_end_idx = 0;
};

struct PrimitiveSet {
  PrimitiveSetId id;
  VehicleModelParams params;
  double dt = 0.1;
  std::vector<double> v_samples;
  std::vector<double> sa_samples;
  std::vector<MotionPrimitive> primitives;
  // successor_index[i] lists indices j with connectable(primitives[i], primitives[j]).
  std::vector<std::vector<int>> successor_index;

  // Primitive indices starting at grid cell (v_idx, sa_idx).
  const std::vector<int>& starting_at(int v_idx, int sa_idx) const;

 private:
  friend PrimitiveSet generate_primitive_set(const PrimitiveSetId&,
                                             const VehicleModelParams&, double);
  std::vector<std::vector<int>> start_lookup_;
};

// Parses an ID string; throws MalformedIdError (carrying the offending
// token) on grammar or invariant violations.
PrimitiveSetId parse_primitive_id(const std::string& text);

// Renders the grammar string; byte-identical to the source text for
// parsed ids, canonical numerals otherwise.
std::string format_primitive_id(const PrimitiveSetId& id);

// Sampling rule: max(1, floor(range/step) + 1) evenly spaced values
// spanning [min, max] inclusive. Exposed for reuse by the planner's
// initial-state snapping.
std::vector<double> sample_grid(double min, double max, double step);

// Forward-simulates one primitive per feasible sample tuple. Neighbor
// rule: end samples within one grid index of the start samples. Excluded:
// input bounds violations and negative-velocity samples. Throws
// EmptyPrimitiveSetError if nothing survives, Error on a duration not an
// integer multiple of dt.
PrimitiveSet generate_primitive_set(const PrimitiveSetId& id,
                                    const VehicleModelParams& params, double dt);

bool connectable(const MotionPrimitive& a, const MotionPrimitive& b);

// Rigidly places the canonical states at the anchor pose; time steps
// continue from anchor.time_step. Throws ConnectivityError when the
// anchor's velocity/steering do not match the primitive start.
std::vector<VehicleState> transform_primitive(const MotionPrimitive& p,
                                              const VehicleState& anchor);

}  // namespace pdoc
