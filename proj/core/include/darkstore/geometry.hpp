#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace darkstore {

inline constexpr double kGeomEps = 1e-9;
inline constexpr double kPi = std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr bool operator==(const Vec2&) const = default;

  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

inline constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

// Rotates v counter-clockwise by angle radians.
inline Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr bool operator==(const Vec3&) const = default;
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  constexpr Vec2 xy() const { return {x, y}; }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Unit quaternion (w, x, y, z). Hamilton convention, active rotation.
struct Quat {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static Quat identity() { return {}; }
  static Quat from_axis_angle(const Vec3& axis, double angle);
  static Quat from_yaw(double yaw) { return from_axis_angle({0, 0, 1}, yaw); }
  // Rotation vector (axis * angle) to quaternion.
  static Quat exp(const Vec3& rotvec);

  Quat operator*(const Quat& o) const;
  constexpr bool operator==(const Quat&) const = default;
  Quat conjugate() const { return {w, -x, -y, -z}; }
  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
  Quat normalized() const;
  Vec3 rotate(const Vec3& v) const;
  // Principal rotation vector, angle in [0, pi]. At exactly pi the axis sign
  // is chosen so its first non-zero component is positive.
  Vec3 log() const;
  double angle() const;
  double yaw() const;
};

// Angle of the relative rotation between two orientations, in [0, pi].
double rotation_distance(const Quat& a, const Quat& b);

struct Pose3 {
  Vec3 position;
  Quat orientation;

  static Pose3 identity() { return {}; }
  static Pose3 from_xy_yaw(Vec2 xy, double z, double yaw) {
    return {{xy.x, xy.y, z}, Quat::from_yaw(yaw)};
  }

  Pose3 operator*(const Pose3& o) const {
    return {position + orientation.rotate(o.position), (orientation * o.orientation).normalized()};
  }
  Pose3 inverse() const {
    const Quat qi = orientation.conjugate();
    return {-qi.rotate(position), qi};
  }
  Vec3 transform(const Vec3& p) const { return position + orientation.rotate(p); }
  constexpr bool operator==(const Pose3&) const = default;
};

// Axis-aligned rectangle, used for store bounds and board surfaces.
struct Rect {
  Vec2 min;
  Vec2 max;

  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
  double area() const { return width() * height(); }
  Vec2 center() const { return (min + max) * 0.5; }
  bool contains(Vec2 p, double tol = kGeomEps) const {
    return p.x >= min.x - tol && p.x <= max.x + tol && p.y >= min.y - tol && p.y <= max.y + tol;
  }
  Rect shrunk(double margin) const {
    return {{min.x + margin, min.y + margin}, {max.x - margin, max.y - margin}};
  }
  constexpr bool operator==(const Rect&) const = default;
};

// Simple polygon with counter-clockwise winding. Construction validates the
// invariants and reverses clockwise input.
class Polygon {
 public:
  Polygon() = default;
  explicit Polygon(std::vector<Vec2> vertices);

  static Polygon rectangle(double width, double depth);
  static Polygon from_rect(const Rect& r);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  Vec2 operator[](std::size_t i) const { return vertices_[i]; }
  Vec2 edge_end(std::size_t i) const { return vertices_[(i + 1) % vertices_.size()]; }

  double perimeter() const;
  double signed_area() const;
  Rect bounds() const;
  // Distance from p to the polygon boundary.
  double boundary_distance(Vec2 p) const;

  bool operator==(const Polygon&) const = default;

 private:
  std::vector<Vec2> vertices_;
};

bool is_simple(std::span<const Vec2> vertices);

// Splits every edge longer than max_edge into equal pieces no longer than it.
Polygon resample_polygon(const Polygon& poly, double max_edge);

// Boundary counts as inside (within kGeomEps).
bool point_in_polygon(Vec2 p, const Polygon& poly);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
bool segments_intersect(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1);

// Oriented box in the plane. Local +x spans half_extents.x.
struct Obb2 {
  Vec2 center;
  Vec2 half_extents;
  double yaw = 0.0;

  std::array<Vec2, 4> corners() const;
  std::array<Vec2, 2> axes() const;
  Vec2 to_local(Vec2 p) const { return rotate(p - center, -yaw); }
  Vec2 to_world(Vec2 p) const { return center + rotate(p, yaw); }
  Obb2 inflated(double margin) const {
    return {center, {half_extents.x + margin, half_extents.y + margin}, yaw};
  }
  Polygon polygon() const;
  bool contains(Vec2 p, double tol = kGeomEps) const;
  // Signed distance: negative inside.
  double signed_distance(Vec2 p) const;
  bool operator==(const Obb2&) const = default;
};

// Separating-axis test over the four face normals. Touching boxes overlap.
bool obb_overlap(const Obb2& a, const Obb2& b);
// Minimum distance between two boxes, 0 when they overlap.
double obb_distance(const Obb2& a, const Obb2& b);
// Every corner inside poly and no polygon edge crosses the box.
bool obb_inside_polygon(const Obb2& box, const Polygon& poly);

// Oriented box extruded over [z_min, z_max].
struct Obb3 {
  Obb2 footprint;
  double z_min = 0.0;
  double z_max = 0.0;

  bool contains(const Vec3& p, double tol = kGeomEps) const {
    return p.z >= z_min - tol && p.z <= z_max + tol && footprint.contains(p.xy(), tol);
  }
  bool operator==(const Obb3&) const = default;
};

// Signed distance from a point to the box surface, negative inside.
double point_obb_signed_distance(const Vec3& p, const Obb3& box);
// Distance from the sphere surface to the box; negative on penetration.
double sphere_obb_clearance(const Vec3& center, double radius, const Obb3& box);

// Equivalent angle in (-pi, pi].
double wrap_angle(double a);
// Equivalent angle in [0, pi).
double wrap_half_turn(double a);
// Smallest absolute difference between two directions defined modulo pi.
double direction_difference(double a, double b);

}  // namespace darkstore
