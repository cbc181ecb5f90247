#include "darkstore/geometry.hpp"

#include <algorithm>
#include <limits>

#include "darkstore/error.hpp"

namespace darkstore {

// ---------------------------------------------------------------------------
// Quaternion

Quat Quat::from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (n < 1e-15) return identity();
  const double s = std::sin(angle * 0.5) / n;
  return {std::cos(angle * 0.5), axis.x * s, axis.y * s, axis.z * s};
}

Quat Quat::exp(const Vec3& rotvec) {
  const double angle = rotvec.norm();
  if (angle < 1e-15) return Quat{1.0, rotvec.x * 0.5, rotvec.y * 0.5, rotvec.z * 0.5}.normalized();
  return from_axis_angle(rotvec, angle);
}

Quat Quat::operator*(const Quat& o) const {
  return {w * o.w - x * o.x - y * o.y - z * o.z,
          w * o.x + x * o.w + y * o.z - z * o.y,
          w * o.y - x * o.z + y * o.w + z * o.x,
          w * o.z + x * o.y - y * o.x + z * o.w};
}

Quat Quat::normalized() const {
  const double n = norm();
  return {w / n, x / n, y / n, z / n};
}

Vec3 Quat::rotate(const Vec3& v) const {
  const Vec3 u{x, y, z};
  const Vec3 t = u.cross(v) * 2.0;
  return v + t * w + u.cross(t);
}

Vec3 Quat::log() const {
  Quat q = *this;
  if (q.w < 0.0) q = {-q.w, -q.x, -q.y, -q.z};
  const Vec3 v{q.x, q.y, q.z};
  const double s = v.norm();
  if (s < 1e-15) return v * 2.0;
  const double angle = 2.0 * std::atan2(s, q.w);
  Vec3 axis = v / s;
  if (q.w == 0.0) {
    const double lead = axis.x != 0.0 ? axis.x : (axis.y != 0.0 ? axis.y : axis.z);
    if (lead < 0.0) axis = -axis;
  }
  return axis * angle;
}

double Quat::angle() const { return log().norm(); }

double Quat::yaw() const {
  return std::atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z));
}

double rotation_distance(const Quat& a, const Quat& b) {
  return (a.conjugate() * b).normalized().angle();
}

// ---------------------------------------------------------------------------
// Angles

double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double wrap_half_turn(double a) {
  double r = std::fmod(a, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r -= kPi;
  return r;
}

double direction_difference(double a, double b) {
  const double d = wrap_half_turn(a - b);
  return std::min(d, kPi - d);
}

// ---------------------------------------------------------------------------
// Polygon

namespace {

double orient(Vec2 a, Vec2 b, Vec2 c) { return (b - a).cross(c - a); }

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) - kGeomEps <= p.x && p.x <= std::max(a.x, b.x) + kGeomEps &&
         std::min(a.y, b.y) - kGeomEps <= p.y && p.y <= std::max(a.y, b.y) + kGeomEps;
}

// Proper crossing only: shared endpoints and touching do not count.
bool segments_cross_strictly(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  const double d1 = orient(b0, b1, a0);
  const double d2 = orient(b0, b1, a1);
  const double d3 = orient(a0, a1, b0);
  const double d4 = orient(a0, a1, b1);
  return ((d1 > kGeomEps && d2 < -kGeomEps) || (d1 < -kGeomEps && d2 > kGeomEps)) &&
         ((d3 > kGeomEps && d4 < -kGeomEps) || (d3 < -kGeomEps && d4 > kGeomEps));
}

}  // namespace

bool segments_intersect(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  const double d1 = orient(b0, b1, a0);
  const double d2 = orient(b0, b1, a1);
  const double d3 = orient(a0, a1, b0);
  const double d4 = orient(a0, a1, b1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (std::abs(d1) <= kGeomEps && on_segment(b0, b1, a0)) return true;
  if (std::abs(d2) <= kGeomEps && on_segment(b0, b1, a1)) return true;
  if (std::abs(d3) <= kGeomEps && on_segment(a0, a1, b0)) return true;
  if (std::abs(d4) <= kGeomEps && on_segment(a0, a1, b1)) return true;
  return false;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

bool is_simple(std::span<const Vec2> v) {
  const std::size_t n = v.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a0 = v[i];
    const Vec2 a1 = v[(i + 1) % n];
    if ((a1 - a0).norm() <= kGeomEps) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      const Vec2 b0 = v[j];
      const Vec2 b1 = v[(j + 1) % n];
      if (adjacent) {
        // Adjacent edges may only share their common vertex; folding back is
        // a self-overlap.
        const Vec2 shared = (j == i + 1) ? a1 : a0;
        const Vec2 other_a = (j == i + 1) ? a0 : a1;
        const Vec2 other_b = (j == i + 1) ? b1 : b0;
        if (std::abs(orient(shared, other_a, other_b)) <= kGeomEps &&
            (other_a - shared).dot(other_b - shared) > 0.0) {
          return false;
        }
        continue;
      }
      if (segments_intersect(a0, a1, b0, b1)) return false;
    }
  }
  return true;
}

Polygon::Polygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) {
    throw Error(ErrorCode::invalid_parameter, "polygon needs at least 3 vertices");
  }
  for (const Vec2& v : vertices_) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      throw Error(ErrorCode::invalid_parameter, "polygon vertex is not finite");
    }
  }
  if (!is_simple(vertices_)) {
    throw Error(ErrorCode::invalid_parameter, "polygon is not simple");
  }
  if (signed_area() < 0.0) std::reverse(vertices_.begin(), vertices_.end());
}

Polygon Polygon::rectangle(double width, double depth) {
  return Polygon({{0, 0}, {width, 0}, {width, depth}, {0, depth}});
}

Polygon Polygon::from_rect(const Rect& r) {
  return Polygon({r.min, {r.max.x, r.min.y}, r.max, {r.min.x, r.max.y}});
}

double Polygon::perimeter() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < size(); ++i) sum += (edge_end(i) - vertices_[i]).norm();
  return sum;
}

double Polygon::signed_area() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < size(); ++i) sum += vertices_[i].cross(edge_end(i));
  return 0.5 * sum;
}

Rect Polygon::bounds() const {
  Rect r{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
         {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
  for (const Vec2& v : vertices_) {
    r.min.x = std::min(r.min.x, v.x);
    r.min.y = std::min(r.min.y, v.y);
    r.max.x = std::max(r.max.x, v.x);
    r.max.y = std::max(r.max.y, v.y);
  }
  return r;
}

double Polygon::boundary_distance(Vec2 p) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i) {
    best = std::min(best, point_segment_distance(p, vertices_[i], edge_end(i)));
  }
  return best;
}

Polygon resample_polygon(const Polygon& poly, double max_edge) {
  if (!(max_edge > 0.0) || !std::isfinite(max_edge)) {
    throw Error(ErrorCode::invalid_parameter, "resample_polygon: max edge length must be positive");
  }
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly.edge_end(i);
    const double len = (b - a).norm();
    auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(len / max_edge)));
    while (len / static_cast<double>(pieces) > max_edge) ++pieces;
    out.push_back(a);
    for (std::size_t k = 1; k < pieces; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(pieces);
      out.push_back(a + (b - a) * t);
    }
  }
  return Polygon(std::move(out));
}

bool point_in_polygon(Vec2 p, const Polygon& poly) {
  if (poly.boundary_distance(p) <= kGeomEps) return true;
  bool inside = false;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly.edge_end(i);
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

// ---------------------------------------------------------------------------
// Boxes

std::array<Vec2, 4> Obb2::corners() const {
  const auto [ax, ay] = axes();
  const Vec2 ex = ax * half_extents.x;
  const Vec2 ey = ay * half_extents.y;
  return {center - ex - ey, center + ex - ey, center + ex + ey, center - ex + ey};
}

std::array<Vec2, 2> Obb2::axes() const {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {Vec2{c, s}, Vec2{-s, c}};
}

Polygon Obb2::polygon() const {
  const auto c = corners();
  return Polygon({c[0], c[1], c[2], c[3]});
}

bool Obb2::contains(Vec2 p, double tol) const {
  const Vec2 l = to_local(p);
  return std::abs(l.x) <= half_extents.x + tol && std::abs(l.y) <= half_extents.y + tol;
}

double Obb2::signed_distance(Vec2 p) const {
  const Vec2 l = to_local(p);
  const double dx = std::abs(l.x) - half_extents.x;
  const double dy = std::abs(l.y) - half_extents.y;
  const double outside = std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
  const double inside = std::min(std::max(dx, dy), 0.0);
  return outside + inside;
}

bool obb_overlap(const Obb2& a, const Obb2& b) {
  const auto ca = a.corners();
  const auto cb = b.corners();
  const auto aa = a.axes();
  const auto ab = b.axes();
  const std::array<Vec2, 4> axes{aa[0], aa[1], ab[0], ab[1]};
  for (const Vec2& axis : axes) {
    double a_lo = std::numeric_limits<double>::infinity();
    double a_hi = -a_lo;
    double b_lo = a_lo;
    double b_hi = -a_lo;
    for (int i = 0; i < 4; ++i) {
      const double pa = ca[i].dot(axis);
      const double pb = cb[i].dot(axis);
      a_lo = std::min(a_lo, pa);
      a_hi = std::max(a_hi, pa);
      b_lo = std::min(b_lo, pb);
      b_hi = std::max(b_hi, pb);
    }
    if (a_hi < b_lo - kGeomEps || b_hi < a_lo - kGeomEps) return false;
  }
  return true;
}

double obb_distance(const Obb2& a, const Obb2& b) {
  if (obb_overlap(a, b)) return 0.0;
  const auto ca = a.corners();
  const auto cb = b.corners();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      best = std::min(best, point_segment_distance(ca[i], cb[j], cb[(j + 1) % 4]));
      best = std::min(best, point_segment_distance(cb[i], ca[j], ca[(j + 1) % 4]));
    }
  }
  return best;
}

bool obb_inside_polygon(const Obb2& box, const Polygon& poly) {
  const auto c = box.corners();
  for (const Vec2& p : c) {
    if (!point_in_polygon(p, poly)) return false;
  }
  for (std::size_t i = 0; i < poly.size(); ++i) {
    if (box.signed_distance(poly[i]) < -kGeomEps) return false;
    for (int j = 0; j < 4; ++j) {
      if (segments_cross_strictly(poly[i], poly.edge_end(i), c[j], c[(j + 1) % 4])) return false;
    }
  }
  return true;
}

double point_obb_signed_distance(const Vec3& p, const Obb3& box) {
  const Vec2 l = box.footprint.to_local(p.xy());
  const double zc = 0.5 * (box.z_min + box.z_max);
  const double hz = 0.5 * (box.z_max - box.z_min);
  const double dx = std::abs(l.x) - box.footprint.half_extents.x;
  const double dy = std::abs(l.y) - box.footprint.half_extents.y;
  const double dz = std::abs(p.z - zc) - hz;
  const Vec3 out{std::max(dx, 0.0), std::max(dy, 0.0), std::max(dz, 0.0)};
  return out.norm() + std::min(std::max({dx, dy, dz}), 0.0);
}

double sphere_obb_clearance(const Vec3& center, double radius, const Obb3& box) {
  return point_obb_signed_distance(center, box) - radius;
}

}  // namespace darkstore
