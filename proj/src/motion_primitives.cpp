#include "pdoc/motion_primitives.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "pdoc/errors.hpp"

namespace pdoc {

namespace {

bool parse_strict_double(const std::string& tok, double* out) {
  if (tok.empty()) return false;
  const char* begin = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + tok.size()) return false;
  if (!std::isfinite(v)) return false;
  *out = v;
  return true;
}

std::string canonical_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, res.ptr);
  // The grammar always writes velocities etc. with a fractional part.
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
    s += ".0";
  }
  return s;
}

}  // namespace

VehicleModelParams default_model_params(const std::string& /*model*/) {
  return VehicleModelParams{};
}

PrimitiveSetId parse_primitive_id(const std::string& text) {
  std::vector<std::string> toks;
  {
    std::string cur;
    for (char c : text) {
      if (c == '_') {
        toks.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    toks.push_back(cur);
  }

  auto fail = [&](const std::string& why, const std::string& tok) -> PrimitiveSetId {
    throw MalformedIdError("malformed primitive-set ID (" + why + "): '" + tok + "'", tok);
  };

  auto expect_keyword = [&](size_t i, const char* kw) {
    if (i >= toks.size() || toks[i] != kw) {
      fail(std::string("expected keyword '") + kw + "'", i < toks.size() ? toks[i] : "");
    }
  };
  auto number_at = [&](size_t i, double* out) {
    if (i >= toks.size() || !parse_strict_double(toks[i], out)) {
      fail("expected a number", i < toks.size() ? toks[i] : "");
    }
    return toks[i];
  };

  PrimitiveSetId id;
  expect_keyword(0, "V");
  id.raw[0] = number_at(1, &id.v_min);
  id.raw[1] = number_at(2, &id.v_max);
  expect_keyword(3, "Vstep");
  id.raw[2] = number_at(4, &id.v_step);
  expect_keyword(5, "SA");
  id.raw[3] = number_at(6, &id.sa_min);
  id.raw[4] = number_at(7, &id.sa_max);
  expect_keyword(8, "SAstep");
  id.raw[5] = number_at(9, &id.sa_step);
  expect_keyword(10, "T");
  id.raw[6] = number_at(11, &id.duration);
  expect_keyword(12, "Model");
  if (toks.size() < 14) fail("missing model name", "");
  {
    std::string model = toks[13];
    for (size_t i = 14; i < toks.size(); ++i) model += "_" + toks[i];
    if (model.empty()) fail("empty model name", "");
    id.model = model;
  }

  if (id.v_min > id.v_max) fail("v_min > v_max", id.raw[0]);
  if (id.sa_min > id.sa_max) fail("sa_min > sa_max", id.raw[3]);
  if (id.v_step <= 0.0) fail("Vstep must be > 0", id.raw[2]);
  if (id.sa_step <= 0.0) fail("SAstep must be > 0", id.raw[5]);
  if (id.duration <= 0.0) fail("T must be > 0", id.raw[6]);
  return id;
}

std::string format_primitive_id(const PrimitiveSetId& id) {
  const double vals[7] = {id.v_min, id.v_max,   id.v_step,  id.sa_min,
                          id.sa_max, id.sa_step, id.duration};
  std::string out = "V";
  const int keyword_before[7] = {-1, -1, 0, 1, -1, 2, 3};
  static const char* kws[] = {"Vstep", "SA", "SAstep", "T"};
  for (int i = 0; i < 7; ++i) {
    if (keyword_before[i] >= 0) out += std::string("_") + kws[keyword_before[i]];
    out += "_" + (id.raw[i].empty() ? canonical_number(vals[i]) : id.raw[i]);
  }
  out += "_Model_" + id.model;
  return out;
}

std::vector<double> sample_grid(double min, double max, double step) {
  const double range = max - min;
  const int n = std::max(1, static_cast<int>(std::floor(range / step + 1e-9)) + 1);
  std::vector<double> samples(n);
  if (n == 1) {
    samples[0] = min;
    return samples;
  }
  const double spacing = range / (n - 1);
  for (int i = 0; i < n; ++i) samples[i] = min + spacing * i;
  samples[n - 1] = max;  // guard against accumulation drift at the top end
  return samples;
}

const std::vector<int>& PrimitiveSet::starting_at(int v_idx, int sa_idx) const {
  static const std::vector<int> empty;
  if (v_idx < 0 || sa_idx < 0 || v_idx >= static_cast<int>(v_samples.size()) ||
      sa_idx >= static_cast<int>(sa_samples.size())) {
    return empty;
  }
  return start_lookup_[static_cast<size_t>(v_idx) * sa_samples.size() + sa_idx];
}

namespace {

MotionPrimitive simulate(double v_s, double v_e, double sa_s, double sa_e, double tau,
                         double dt, int steps, double wheelbase) {
  MotionPrimitive p;
  p.v_start = v_s;
  p.v_end = v_e;
  p.sa_start = sa_s;
  p.sa_end = sa_e;
  p.accel = (v_e - v_s) / tau;
  p.steer_rate = (sa_e - sa_s) / tau;

  double x = 0.0, y = 0.0, theta = 0.0;
  p.states.reserve(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    const double v = v_s + p.accel * (k * dt);
    const double sa = sa_s + p.steer_rate * (k * dt);
    p.states.push_back({x, y, wrap_angle(theta), std::max(0.0, v), sa, k});
    if (k < steps) {
      x += v * std::cos(theta) * dt;
      y += v * std::sin(theta) * dt;
      theta += v * std::tan(sa) / wheelbase * dt;
    }
  }
  return p;
}

}  // namespace

PrimitiveSet generate_primitive_set(const PrimitiveSetId& id,
                                    const VehicleModelParams& params, double dt) {
  const double ratio = id.duration / dt;
  const int steps = static_cast<int>(std::llround(ratio));
  if (steps < 1 || std::fabs(ratio - steps) > 1e-9) {
    throw Error("primitive duration must be an integer multiple of dt");
  }

  PrimitiveSet set;
  set.id = id;
  set.params = params;
  set.dt = dt;
  set.v_samples = sample_grid(id.v_min, id.v_max, id.v_step);
  set.sa_samples = sample_grid(id.sa_min, id.sa_max, id.sa_step);

  const int n_v = static_cast<int>(set.v_samples.size());
  const int n_sa = static_cast<int>(set.sa_samples.size());
  const double tau = id.duration;

  auto a_limit = [&](double v_from, double v_to) {
    double lim = params.a_max;
    if (params.v_switch) {
      const double v_ref = std::max(std::max(v_from, v_to), *params.v_switch);
      lim = params.a_max * (*params.v_switch) / v_ref;
    }
    return lim;
  };

  for (int vi = 0; vi < n_v; ++vi) {
    if (set.v_samples[vi] < 0.0) continue;  // states must keep velocity >= 0
    for (int si = 0; si < n_sa; ++si) {
      for (int vj = std::max(0, vi - 1); vj < std::min(n_v, vi + 2); ++vj) {
        if (set.v_samples[vj] < 0.0) continue;
        const double accel = (set.v_samples[vj] - set.v_samples[vi]) / tau;
        if (std::fabs(accel) > a_limit(set.v_samples[vi], set.v_samples[vj]) + 1e-9) {
          continue;
        }
        for (int sj = std::max(0, si - 1); sj < std::min(n_sa, si + 2); ++sj) {
          const double rate = (set.sa_samples[sj] - set.sa_samples[si]) / tau;
          if (std::fabs(rate) > params.steer_rate_max + 1e-9) continue;
          MotionPrimitive p = simulate(set.v_samples[vi], set.v_samples[vj],
                                       set.sa_samples[si], set.sa_samples[sj], tau, dt,
                                       steps, params.wheelbase);
          p.v_start_idx = vi;
          p.v_end_idx = vj;
          p.sa_start_idx = si;
          p.sa_end_idx = sj;
          set.primitives.push_back(std::move(p));
        }
      }
    }
  }

  if (set.primitives.empty()) {
    throw EmptyPrimitiveSetError("primitive set is empty after feasibility filtering");
  }

  set.start_lookup_.assign(static_cast<size_t>(n_v) * n_sa, {});
  for (size_t i = 0; i < set.primitives.size(); ++i) {
    const MotionPrimitive& p = set.primitives[i];
    set.start_lookup_[static_cast<size_t>(p.v_start_idx) * n_sa + p.sa_start_idx]
        .push_back(static_cast<int>(i));
  }
  set.successor_index.resize(set.primitives.size());
  for (size_t i = 0; i < set.primitives.size(); ++i) {
    const MotionPrimitive& p = set.primitives[i];
    set.successor_index[i] = set.starting_at(p.v_end_idx, p.sa_end_idx);
  }
  return set;
}

bool connectable(const MotionPrimitive& a, const MotionPrimitive& b) {
  return std::fabs(a.v_end - b.v_start) <= 1e-9 &&
         std::fabs(a.sa_end - b.sa_start) <= 1e-9;
}

std::vector<VehicleState> transform_primitive(const MotionPrimitive& p,
                                              const VehicleState& anchor) {
  if (std::fabs(anchor.velocity - p.v_start) > 1e-9 ||
      std::fabs(anchor.steering_angle - p.sa_start) > 1e-9) {
    std::ostringstream msg;
    msg << "primitive start (v=" << p.v_start << ", sa=" << p.sa_start
        << ") does not continue anchor state (v=" << anchor.velocity
        << ", sa=" << anchor.steering_angle << ")";
    throw ConnectivityError(msg.str());
  }
  const double c = std::cos(anchor.orientation);
  const double s = std::sin(anchor.orientation);
  std::vector<VehicleState> out;
  out.reserve(p.states.size());
  for (const VehicleState& cs : p.states) {
    VehicleState t = cs;
    t.x = anchor.x + c * cs.x - s * cs.y;
    t.y = anchor.y + s * cs.x + c * cs.y;
    t.orientation = wrap_angle(cs.orientation + anchor.orientation);
    t.time_step = anchor.time_step + cs.time_step;
    out.push_back(t);
  }
  return out;
}

}  // namespace pdoc
