#pragma once

#include <array>
#include <cmath>

namespace pdoc {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

// Wraps an angle into (-pi, pi].
double wrap_angle(double theta);

// Absolute wrapped difference between two angles, in [0, pi].
double angle_abs_diff(double a, double b);

// Distance from point p to segment [a, b]; degenerate segments collapse
// to point distance.
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

// Oriented rectangle: center, half extents along heading/lateral, heading.
struct OrientedRect {
  Vec2 center;
  double half_length = 0.0;
  double half_width = 0.0;
  double heading = 0.0;

  std::array<Vec2, 4> corners() const;
};

// Separating-axis overlap test; touching boundaries count as overlap.
bool rects_overlap(const OrientedRect& a, const OrientedRect& b);

}  // namespace pdoc
