#include "pdoc/geometry.hpp"

#include <algorithm>

namespace pdoc {

double wrap_angle(double theta) {
  double t = std::fmod(theta + M_PI, 2.0 * M_PI);
  if (t <= 0.0) t += 2.0 * M_PI;
  return t - M_PI;
}

double angle_abs_diff(double a, double b) {
  return std::fabs(wrap_angle(a - b));
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 < 1e-18) return norm(p - a);
  double t = dot(p - a, ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

std::array<Vec2, 4> OrientedRect::corners() const {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  const Vec2 ax{c * half_length, s * half_length};
  const Vec2 ay{-s * half_width, c * half_width};
  return {center + ax + ay, center + ax - ay, center - ax - ay, center - ax + ay};
}

namespace {

// Projection radius of rect r onto unit axis u, around its own center.
double projection_radius(const OrientedRect& r, Vec2 u) {
  const double c = std::cos(r.heading);
  const double s = std::sin(r.heading);
  const Vec2 ax{c, s};
  const Vec2 ay{-s, c};
  return r.half_length * std::fabs(dot(ax, u)) + r.half_width * std::fabs(dot(ay, u));
}

bool separated_on_axis(const OrientedRect& a, const OrientedRect& b, Vec2 u) {
  const double dist = std::fabs(dot(b.center - a.center, u));
  return dist > projection_radius(a, u) + projection_radius(b, u);
}

}  // namespace

bool rects_overlap(const OrientedRect& a, const OrientedRect& b) {
  const double ca = std::cos(a.heading), sa = std::sin(a.heading);
  const double cb = std::cos(b.heading), sb = std::sin(b.heading);
  const Vec2 axes[4] = {{ca, sa}, {-sa, ca}, {cb, sb}, {-sb, cb}};
  for (const Vec2& u : axes) {
    if (separated_on_axis(a, b, u)) return false;
  }
  return true;
}

}  // namespace pdoc
