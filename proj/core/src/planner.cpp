#include "darkstore/planner.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "darkstore/error.hpp"

namespace darkstore {

ManipConfig manip_part(const Config& q) {
  ManipConfig m{};
  std::copy(q.begin() + kTorsoIndex, q.end(), m.begin());
  return m;
}

Config with_manip(const Config& q, const ManipConfig& m) {
  Config out = q;
  std::copy(m.begin(), m.end(), out.begin() + kTorsoIndex);
  return out;
}

// ---------------------------------------------------------------------------
// Robot model

double RobotModel::lower(std::size_t j) const { return j == 0 ? torso_lo : arm.at(j - 1).lo; }
double RobotModel::upper(std::size_t j) const { return j == 0 ? torso_hi : arm.at(j - 1).hi; }

bool RobotModel::within_limits(const Config& q, double tol) const {
  for (std::size_t j = 0; j < kManipDim; ++j) {
    const double v = q[kTorsoIndex + j];
    if (!(v >= lower(j) - tol && v <= upper(j) + tol)) return false;
  }
  return std::isfinite(q[0]) && std::isfinite(q[1]) && std::isfinite(q[2]);
}

Config RobotModel::clamp(const Config& q) const {
  Config out = q;
  for (std::size_t j = 0; j < kManipDim; ++j) {
    out[kTorsoIndex + j] = std::clamp(q[kTorsoIndex + j], lower(j), upper(j));
  }
  out[2] = wrap_angle(q[2]);
  return out;
}

void RobotModel::validate() const {
  if (arm.size() != 7) throw Error(ErrorCode::invalid_parameter, "robot arm must have 7 joints");
  if (!(torso_lo < torso_hi)) throw Error(ErrorCode::invalid_parameter, "torso limits must satisfy lo < hi");
  auto check_spheres = [](const std::vector<CollisionSphere>& s, const std::string& where) {
    for (const auto& sp : s) {
      if (!(sp.radius > 0.0)) throw Error(ErrorCode::invalid_parameter, where + ": sphere radius must be positive");
    }
  };
  check_spheres(base_spheres, "base");
  check_spheres(torso_spheres, "torso");
  for (const ArmJoint& j : arm) {
    if (!(j.lo < j.hi)) throw Error(ErrorCode::invalid_parameter, "joint " + j.name + ": limits must satisfy lo < hi");
    if (std::abs(j.axis.norm() - 1.0) > 1e-9) throw Error(ErrorCode::invalid_parameter, "joint " + j.name + ": axis must be unit");
    check_spheres(j.spheres, "joint " + j.name);
  }
  if (!(base_radius > 0.0)) throw Error(ErrorCode::invalid_parameter, "base_radius must be positive");
  for (std::size_t j = 0; j < kManipDim; ++j) {
    if (stow[j] < lower(j) || stow[j] > upper(j)) throw Error(ErrorCode::invalid_parameter, "stow config outside limits");
  }
}

std::size_t RobotModel::sphere_count() const {
  std::size_t n = base_spheres.size() + torso_spheres.size();
  for (const auto& j : arm) n += j.spheres.size();
  return n;
}

const RobotModel& default_robot_model() {
  static const RobotModel model = [] {
    RobotModel m;
    m.name = "fetch_like";
    m.base_radius = 0.3;
    m.base_spheres = {{{0.0, 0.0, 0.2}, 0.28}};
    m.torso_offset = {{-0.086, 0.0, 0.377}, Quat::identity()};
    m.torso_lo = 0.0;
    m.torso_hi = 0.386;
    m.torso_spheres = {{{0.0, 0.0, 0.05}, 0.14}, {{0.0, 0.0, 0.3}, 0.14}, {{0.0, 0.0, 0.55}, 0.14}};
    const Vec3 z{0, 0, 1};
    const Vec3 y{0, 1, 0};
    const Vec3 x{1, 0, 0};
    auto joint = [](std::string name, Vec3 off, Vec3 axis, double lo, double hi, std::vector<CollisionSphere> s) {
      return ArmJoint{std::move(name), {off, Quat::identity()}, axis, lo, hi, std::move(s)};
    };
    m.arm = {
        joint("shoulder_pan", {0.119525, 0.0, 0.34858}, z, -1.6056, 1.6056, {{{0.06, 0.0, 0.03}, 0.06}}),
        joint("shoulder_lift", {0.117, 0.0, 0.06}, y, -1.221, 1.518, {{{0.11, 0.0, 0.0}, 0.06}}),
        joint("upperarm_roll", {0.219, 0.0, 0.0}, x, -kPi, kPi, {{{0.07, 0.0, 0.0}, 0.055}}),
        joint("elbow_flex", {0.133, 0.0, 0.0}, y, -2.251, 2.251, {{{0.1, 0.0, 0.0}, 0.055}}),
        joint("forearm_roll", {0.197, 0.0, 0.0}, x, -kPi, kPi, {{{0.06, 0.0, 0.0}, 0.05}}),
        joint("wrist_flex", {0.1245, 0.0, 0.0}, y, -2.16, 2.16, {{{0.07, 0.0, 0.0}, 0.05}}),
        joint("wrist_roll", {0.1385, 0.0, 0.0}, x, -kPi, kPi, {{{0.07, 0.0, 0.0}, 0.045}}),
    };
    m.ee_offset = {{0.16645, 0.0, 0.0}, Quat::identity()};
    m.stow = {0.0, 1.32, 1.4, -0.2, 1.72, 0.0, 1.66, 0.0};
    m.validate();
    return m;
  }();
  return model;
}

// ---------------------------------------------------------------------------
// Kinematics

namespace {

FkResult fk_unchecked(const RobotModel& model, const Config& q, bool with_spheres) {
  FkResult r;
  r.base = Pose3::from_xy_yaw({q[0], q[1]}, 0.0, q[2]);
  r.torso = r.base * model.torso_offset * Pose3{{0.0, 0.0, q[kTorsoIndex]}, Quat::identity()};
  Pose3 t = r.torso;
  r.joints.reserve(model.arm.size());
  for (std::size_t k = 0; k < model.arm.size(); ++k) {
    const ArmJoint& j = model.arm[k];
    t = t * j.offset * Pose3{{}, Quat::from_axis_angle(j.axis, q[kArmIndex + k])};
    r.joints.push_back(t);
  }
  r.ee = t * model.ee_offset;
  if (with_spheres) {
    r.spheres.reserve(model.sphere_count());
    for (const auto& s : model.base_spheres) r.spheres.push_back({r.base.transform(s.center), s.radius});
    for (const auto& s : model.torso_spheres) r.spheres.push_back({r.torso.transform(s.center), s.radius});
    for (std::size_t k = 0; k < model.arm.size(); ++k) {
      for (const auto& s : model.arm[k].spheres) r.spheres.push_back({r.joints[k].transform(s.center), s.radius});
    }
  }
  return r;
}

Pose3 ee_unchecked(const RobotModel& model, const Config& q) { return fk_unchecked(model, q, false).ee; }

}  // namespace

FkResult fk(const RobotModel& model, const Config& q) {
  if (!model.within_limits(q)) throw Error(ErrorCode::limit_violation, "fk: configuration outside joint limits");
  return fk_unchecked(model, q, true);
}

Pose3 ee_pose(const RobotModel& model, const Config& q) {
  if (!model.within_limits(q)) throw Error(ErrorCode::limit_violation, "ee_pose: configuration outside joint limits");
  return ee_unchecked(model, q);
}

// ---------------------------------------------------------------------------
// Collision

CollisionScene::CollisionScene(SceneObstacles obstacles, double cell) : obstacles_(std::move(obstacles)), cell_(cell) {
  if (obstacles_.margin < 0.0) throw Error(ErrorCode::invalid_parameter, "scene margin must be >= 0");
  if (!(cell_ > 0.0)) throw Error(ErrorCode::invalid_parameter, "collision grid cell must be positive");
  const std::size_t n = obstacles_.static_boxes.size() + obstacles_.dynamic_boxes.size();
  if (n == 0) return;
  constexpr double inf = std::numeric_limits<double>::infinity();
  Vec2 lo{inf, inf};
  Vec2 hi{-inf, -inf};
  std::vector<Rect> extents(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto corners = box(i).footprint.corners();
    Rect r{{inf, inf}, {-inf, -inf}};
    for (Vec2 c : corners) {
      r.min = {std::min(r.min.x, c.x), std::min(r.min.y, c.y)};
      r.max = {std::max(r.max.x, c.x), std::max(r.max.y, c.y)};
    }
    extents[i] = r;
    lo = {std::min(lo.x, r.min.x), std::min(lo.y, r.min.y)};
    hi = {std::max(hi.x, r.max.x), std::max(hi.y, r.max.y)};
  }
  origin_ = lo;
  nx_ = std::max(1, static_cast<int>(std::ceil((hi.x - lo.x) / cell_)) + 1);
  ny_ = std::max(1, static_cast<int>(std::ceil((hi.y - lo.y) / cell_)) + 1);
  buckets_.assign(static_cast<std::size_t>(nx_ * ny_), {});
  for (std::size_t i = 0; i < n; ++i) {
    const int i0 = std::clamp(static_cast<int>(std::floor((extents[i].min.x - origin_.x) / cell_)), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>(std::floor((extents[i].max.x - origin_.x) / cell_)), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>(std::floor((extents[i].min.y - origin_.y) / cell_)), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>(std::floor((extents[i].max.y - origin_.y) / cell_)), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j) {
      for (int k = i0; k <= i1; ++k) buckets_[static_cast<std::size_t>(j * nx_ + k)].push_back(static_cast<std::uint32_t>(i));
    }
  }
}

const Obb3& CollisionScene::box(std::size_t i) const {
  const std::size_t ns = obstacles_.static_boxes.size();
  return i < ns ? obstacles_.static_boxes[i] : obstacles_.dynamic_boxes[i - ns];
}

template <class F>
void CollisionScene::for_nearby(const Vec3& c, double reach, F&& f) const {
  if (buckets_.empty()) return;
  const int i0 = static_cast<int>(std::floor((c.x - reach - origin_.x) / cell_));
  const int i1 = static_cast<int>(std::floor((c.x + reach - origin_.x) / cell_));
  const int j0 = static_cast<int>(std::floor((c.y - reach - origin_.y) / cell_));
  const int j1 = static_cast<int>(std::floor((c.y + reach - origin_.y) / cell_));
  if (i1 < 0 || j1 < 0 || i0 >= nx_ || j0 >= ny_) return;
  for (int j = std::max(j0, 0); j <= std::min(j1, ny_ - 1); ++j) {
    for (int i = std::max(i0, 0); i <= std::min(i1, nx_ - 1); ++i) {
      for (std::uint32_t b : buckets_[static_cast<std::size_t>(j * nx_ + i)]) {
        const Obb3& bx = box(b);
        if (c.z - reach > bx.z_max || c.z + reach < bx.z_min) continue;
        if (!f(bx)) return;
      }
    }
  }
}

double CollisionScene::sphere_clearance(const Vec3& c, double r, double cap) const {
  double best = cap;
  for_nearby(c, r + cap, [&](const Obb3& b) {
    best = std::min(best, sphere_obb_clearance(c, r, b));
    return true;
  });
  return best;
}

bool CollisionScene::sphere_hits(const Vec3& c, double r) const {
  bool hit = false;
  const double m = obstacles_.margin;
  for_nearby(c, r + m, [&](const Obb3& b) {
    hit = sphere_obb_clearance(c, r, b) < m;
    return !hit;
  });
  return hit;
}

namespace {

// Base containment expressed on the same scale as sphere clearances.
double base_containment(const RobotModel& model, const Config& q, const CollisionScene& scene) {
  const auto& floor = scene.obstacles().floor;
  if (!floor) return std::numeric_limits<double>::infinity();
  const Vec2 p{q[0], q[1]};
  const double d = floor->boundary_distance(p);
  const double signed_d = point_in_polygon(p, *floor) ? d : -d;
  return signed_d - model.base_radius + scene.margin();
}

}  // namespace

bool config_in_collision(const RobotModel& model, const Config& q, const CollisionScene& scene) {
  if (base_containment(model, q, scene) < scene.margin()) return true;
  const FkResult f = fk(model, q);
  for (const WorldSphere& s : f.spheres) {
    if (scene.sphere_hits(s.center, s.radius)) return true;
  }
  return false;
}

double config_clearance(const RobotModel& model, const Config& q, const CollisionScene& scene, double cap) {
  double best = std::min(cap, base_containment(model, q, scene));
  const FkResult f = fk_unchecked(model, q, true);
  for (const WorldSphere& s : f.spheres) best = std::min(best, scene.sphere_clearance(s.center, s.radius, cap));
  return best;
}

// ---------------------------------------------------------------------------
// SE(3)

namespace {

Eigen::Matrix3d hat(const Vec3& w) {
  Eigen::Matrix3d m;
  m << 0, -w.z, w.y, w.z, 0, -w.x, -w.y, w.x, 0;
  return m;
}

Eigen::Vector3d ev(const Vec3& v) { return {v.x, v.y, v.z}; }
Vec3 dv(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

}  // namespace

Twist se3_log(const Pose3& p) {
  const Vec3 w = p.orientation.log();
  const double th = w.norm();
  const Eigen::Matrix3d W = hat(w);
  double c;  // coefficient of W^2 in V^-1
  if (th < 1e-6) {
    c = 1.0 / 12.0 + th * th / 720.0;
  } else {
    c = (1.0 - th * std::sin(th) / (2.0 * (1.0 - std::cos(th)))) / (th * th);
  }
  const Eigen::Matrix3d Vinv = Eigen::Matrix3d::Identity() - 0.5 * W + c * W * W;
  return {dv(Vinv * ev(p.position)), w};
}

Pose3 se3_exp(const Twist& t) {
  const double th = t.w.norm();
  const Eigen::Matrix3d W = hat(t.w);
  double a;
  double b;
  if (th < 1e-6) {
    a = 0.5 - th * th / 24.0;
    b = 1.0 / 6.0 - th * th / 120.0;
  } else {
    a = (1.0 - std::cos(th)) / (th * th);
    b = (th - std::sin(th)) / (th * th * th);
  }
  const Eigen::Matrix3d V = Eigen::Matrix3d::Identity() + a * W + b * W * W;
  return {dv(V * ev(t.v)), Quat::exp(t.w)};
}

std::vector<Pose3> screw_interp(const Pose3& a, const Pose3& b, int n) {
  if (n < 2) throw Error(ErrorCode::invalid_parameter, "screw_interp: n must be >= 2");
  const Twist xi = se3_log(a.inverse() * b);
  std::vector<Pose3> out;
  out.reserve(static_cast<std::size_t>(n));
  out.push_back(a);
  for (int i = 1; i + 1 < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    out.push_back(a * se3_exp({xi.v * t, xi.w * t}));
  }
  out.push_back(b);
  return out;
}

// ---------------------------------------------------------------------------
// IK

std::array<double, 6> pose_error(const Pose3& current, const Pose3& target) {
  const Vec3 dp = target.position - current.position;
  const Vec3 dr = (target.orientation * current.orientation.conjugate()).normalized().log();
  return {dp.x, dp.y, dp.z, dr.x, dr.y, dr.z};
}

Jacobian manipulator_jacobian(const RobotModel& model, const Config& q, double h) {
  Jacobian J{};
  for (std::size_t j = 0; j < kManipDim; ++j) {
    Config qp = q;
    Config qm = q;
    qp[kTorsoIndex + j] += h;
    qm[kTorsoIndex + j] -= h;
    const Pose3 ep = ee_unchecked(model, qp);
    const Pose3 em = ee_unchecked(model, qm);
    const Vec3 dp = (ep.position - em.position) / (2.0 * h);
    const Vec3 dr = (ep.orientation * em.orientation.conjugate()).normalized().log() / (2.0 * h);
    J[0][j] = dp.x;
    J[1][j] = dp.y;
    J[2][j] = dp.z;
    J[3][j] = dr.x;
    J[4][j] = dr.y;
    J[5][j] = dr.z;
  }
  return J;
}

Config ik_step(const RobotModel& model, const Config& q, const Pose3& target, double damping) {
  const auto e = pose_error(ee_unchecked(model, q), target);
  if (std::all_of(e.begin(), e.end(), [](double v) { return v == 0.0; })) return q;
  const Jacobian Jarr = manipulator_jacobian(model, q);
  Eigen::Matrix<double, 6, 8> J;
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 8; ++c) J(r, c) = Jarr[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  Eigen::Matrix<double, 6, 1> err;
  for (int r = 0; r < 6; ++r) err(r) = e[static_cast<std::size_t>(r)];
  Eigen::Matrix<double, 8, 1> dq;
  // Joints resting on a limit and pushed outward get their column dropped and
  // the update is solved again, so clipping cannot stall the others.
  std::array<bool, kManipDim> locked{};
  for (std::size_t pass = 0; pass <= kManipDim; ++pass) {
    const Eigen::Matrix<double, 6, 6> A =
        J * J.transpose() + damping * damping * Eigen::Matrix<double, 6, 6>::Identity();
    dq = J.transpose() * A.ldlt().solve(err);
    bool changed = false;
    for (std::size_t j = 0; j < kManipDim; ++j) {
      const double v = q[kTorsoIndex + j], d = dq(static_cast<int>(j));
      const bool pushing = (v >= model.upper(j) - 1e-12 && d > 0.0) || (v <= model.lower(j) + 1e-12 && d < 0.0);
      if (pushing && !locked[j]) {
        locked[j] = true;
        J.col(static_cast<int>(j)).setZero();
        changed = true;
      }
    }
    if (!changed) break;
  }
  Config out = q;
  for (std::size_t j = 0; j < kManipDim; ++j) out[kTorsoIndex + j] += dq(static_cast<int>(j));
  return model.clamp(out);
}

// ---------------------------------------------------------------------------
// Paths

void PlannerParams::validate() const {
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0)) throw Error(ErrorCode::invalid_parameter, std::string(key) + " must be positive");
  };
  positive(dq_revolute, "dq_revolute");
  positive(dq_prismatic, "dq_prismatic");
  positive(rrt_eta, "rrt_eta");
  positive(damping, "damping");
  positive(screw_step_pos, "screw_step_pos");
  positive(screw_step_rot, "screw_step_rot");
  positive(ik_tol_pos, "ik_tol_pos");
  positive(ik_tol_rot, "ik_tol_rot");
  positive(clearance_cap, "clearance_cap");
  if (max_iters < 1) throw Error(ErrorCode::invalid_parameter, "max_iters must be >= 1");
  if (ik_iters < 1) throw Error(ErrorCode::invalid_parameter, "ik_iters must be >= 1");
  if (shortcut_attempts < 0) throw Error(ErrorCode::invalid_parameter, "shortcut_attempts must be >= 0");
}

std::string to_string(SegmentMethod m) {
  switch (m) {
    case SegmentMethod::screw: return "screw";
    case SegmentMethod::rrt_connect: return "rrt_connect";
    case SegmentMethod::base_heuristic: return "base_heuristic";
    case SegmentMethod::gripper: return "gripper";
  }
  return "screw";
}

SegmentMethod segment_method_from_string(const std::string& s) {
  if (s == "screw") return SegmentMethod::screw;
  if (s == "rrt_connect") return SegmentMethod::rrt_connect;
  if (s == "base_heuristic") return SegmentMethod::base_heuristic;
  if (s == "gripper") return SegmentMethod::gripper;
  throw Error(ErrorCode::parse_error, "unknown segment method '" + s + "'");
}

std::string to_string(FailureReason r) {
  switch (r) {
    case FailureReason::none: return "none";
    case FailureReason::ik_diverged: return "ik_diverged";
    case FailureReason::in_collision: return "in_collision";
    case FailureReason::timeout: return "timeout";
    case FailureReason::invalid_start: return "invalid_start";
  }
  return "none";
}

namespace {

double joint_step(std::size_t i, const PlannerParams& p) {
  // x, y and torso are prismatic; yaw and the arm are revolute.
  return (i == 0 || i == 1 || i == kTorsoIndex) ? p.dq_prismatic : p.dq_revolute;
}

Config delta(const Config& a, const Config& b) {
  Config d{};
  for (std::size_t i = 0; i < kConfigDim; ++i) d[i] = b[i] - a[i];
  d[2] = wrap_angle(b[2] - a[2]);
  return d;
}

Config lerp(const Config& a, const Config& d, double t) {
  Config out{};
  for (std::size_t i = 0; i < kConfigDim; ++i) out[i] = a[i] + t * d[i];
  out[2] = wrap_angle(a[2] + t * d[2]);
  return out;
}

// Largest joint move in units of the per-joint step.
double normalized_span(const Config& d, const PlannerParams& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < kConfigDim; ++i) s = std::max(s, std::abs(d[i]) / joint_step(i, p));
  return s;
}

// Per-joint bound on how far any sphere moves per unit joint motion.
struct ReachBounds {
  double base_yaw = 0.0;
  std::array<double, kManipDim> manip{};
};

ReachBounds reach_bounds(const RobotModel& m) {
  ReachBounds r;
  r.manip[0] = 1.0;
  // For arm joint k, the chain length to every downstream sphere.
  for (std::size_t k = 0; k < m.arm.size(); ++k) {
    double chain = 0.0;
    double best = 0.0;
    for (std::size_t l = k; l < m.arm.size(); ++l) {
      if (l > k) chain += m.arm[l].offset.position.norm();
      for (const auto& s : m.arm[l].spheres) best = std::max(best, chain + s.center.norm());
    }
    r.manip[k + 1] = best;
  }
  double yaw = 0.0;
  for (const auto& s : m.base_spheres) yaw = std::max(yaw, s.center.xy().norm());
  const double torso_reach = m.torso_offset.position.norm() + std::max(std::abs(m.torso_lo), std::abs(m.torso_hi));
  for (const auto& s : m.torso_spheres) yaw = std::max(yaw, torso_reach + s.center.norm());
  double chain = torso_reach;
  for (const auto& j : m.arm) {
    chain += j.offset.position.norm();
    for (const auto& s : j.spheres) yaw = std::max(yaw, chain + s.center.norm());
  }
  r.base_yaw = yaw;
  return r;
}

double displacement_bound(const ReachBounds& rb, const Config& d) {
  double L = std::hypot(d[0], d[1]) + std::abs(d[2]) * rb.base_yaw;
  for (std::size_t j = 0; j < kManipDim; ++j) L += std::abs(d[kTorsoIndex + j]) * rb.manip[j];
  return L;
}

struct Certifier {
  const RobotModel& model;
  const CollisionScene& scene;
  const PlannerParams& params;
  ReachBounds rb;

  double clearance(const Config& q) const { return config_clearance(model, q, scene, params.clearance_cap); }

  bool certify(const Config& a, double ca, const Config& b, double cb) const {
    const double m = scene.margin();
    if (ca < m || cb < m) return false;
    const Config d = delta(a, b);
    if ((ca + cb - displacement_bound(rb, d)) / 2.0 >= m) return true;
    if (normalized_span(d, params) < 1.0 / 64.0) return false;
    const Config mid = lerp(a, d, 0.5);
    const double cm = clearance(mid);
    return certify(a, ca, mid, cm) && certify(mid, cm, b, cb);
  }

  bool clear(const Config& a, const Config& b) const { return certify(a, clearance(a), b, clearance(b)); }
};

Trajectory single_segment(std::vector<Config> waypoints, SegmentMethod method, const PlannerParams& params) {
  Trajectory t;
  t.waypoints = std::move(waypoints);
  t.gripper_closed.assign(t.waypoints.size(), false);
  t.segments.push_back({0, method, "ok", 0, t.waypoints.size() - 1});
  (void)params;
  return t;
}

PlanResult failure(FailureReason r) {
  PlanResult out;
  out.failure.reason = r;
  return out;
}

PlanResult success(Trajectory t) {
  PlanResult out;
  out.trajectory = std::move(t);
  return out;
}

}  // namespace

std::vector<Config> densify(const std::vector<Config>& path, const PlannerParams& params) {
  std::vector<Config> out;
  if (path.empty()) return out;
  out.push_back(path.front());
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Config d = delta(path[i - 1], path[i]);
    const int steps = std::max(1, static_cast<int>(std::ceil(normalized_span(d, params) - 1e-12)));
    for (int s = 1; s < steps; ++s) out.push_back(lerp(path[i - 1], d, static_cast<double>(s) / steps));
    out.push_back(path[i]);
  }
  return out;
}

bool segment_clear(const RobotModel& model, const Config& a, const Config& b, const CollisionScene& scene,
                   const PlannerParams& params) {
  const Certifier c{model, scene, params, reach_bounds(model)};
  return c.clear(a, b);
}

PlanResult plan_screw(const RobotModel& model, const Config& q_start, const Pose3& ee_goal,
                      const CollisionScene& scene, const PlannerParams& params) {
  if (!model.within_limits(q_start) || config_in_collision(model, q_start, scene)) {
    return failure(FailureReason::invalid_start);
  }
  const Pose3 start = ee_unchecked(model, q_start);
  const double dist = (ee_goal.position - start.position).norm();
  const double ang = rotation_distance(start.orientation, ee_goal.orientation);
  const int steps = std::max(static_cast<int>(std::ceil(dist / params.screw_step_pos)),
                             static_cast<int>(std::ceil(ang / params.screw_step_rot)));
  if (steps == 0) return success(single_segment({q_start}, SegmentMethod::screw, params));

  const auto poses = screw_interp(start, ee_goal, steps + 1);
  std::vector<Config> path{q_start};
  Config q = q_start;
  for (std::size_t i = 1; i < poses.size(); ++i) {
    bool converged = false;
    for (int it = 0; it <= params.ik_iters; ++it) {
      const auto e = pose_error(ee_unchecked(model, q), poses[i]);
      if (std::hypot(e[0], e[1], e[2]) <= params.ik_tol_pos && std::hypot(e[3], e[4], e[5]) <= params.ik_tol_rot) {
        converged = true;
        break;
      }
      if (it == params.ik_iters) break;
      q = ik_step(model, q, poses[i], params.damping);
    }
    if (!converged) return failure(FailureReason::ik_diverged);
    path.push_back(q);
  }
  const Certifier cert{model, scene, params, reach_bounds(model)};
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (!cert.clear(path[i - 1], path[i])) return failure(FailureReason::in_collision);
  }
  return success(single_segment(densify(path, params), SegmentMethod::screw, params));
}

namespace {

struct Tree {
  std::vector<ManipConfig> nodes;
  std::vector<int> parent;

  int nearest(const ManipConfig& q, const std::array<double, kManipDim>& w) const {
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      double d = 0.0;
      for (std::size_t j = 0; j < kManipDim; ++j) {
        const double x = (nodes[i][j] - q[j]) * w[j];
        d += x * x;
      }
      if (d < bd) {
        bd = d;
        best = static_cast<int>(i);
      }
    }
    return best;
  }

  std::vector<ManipConfig> path_to_root(int i) const {
    std::vector<ManipConfig> out;
    for (; i >= 0; i = parent[static_cast<std::size_t>(i)]) out.push_back(nodes[static_cast<std::size_t>(i)]);
    return out;
  }
};

}  // namespace

PlanResult plan_rrt_connect(const RobotModel& model, const Config& q_start, const Config& q_goal,
                            const CollisionScene& scene, const PlannerParams& params, Rng& rng) {
  if (!model.within_limits(q_start) || config_in_collision(model, q_start, scene)) {
    return failure(FailureReason::invalid_start);
  }
  // The base is frozen: the goal keeps the start's base pose.
  const Config goal = with_manip(q_start, manip_part(q_goal));
  if (!model.within_limits(goal) || config_in_collision(model, goal, scene)) return failure(FailureReason::in_collision);
  if (goal == q_start) return success(single_segment({q_start}, SegmentMethod::rrt_connect, params));

  const Certifier cert{model, scene, params, reach_bounds(model)};
  auto full = [&](const ManipConfig& m) { return with_manip(q_start, m); };

  std::vector<ManipConfig> path;
  if (cert.clear(q_start, goal)) {
    path = {manip_part(q_start), manip_part(goal)};
  } else {
    std::array<double, kManipDim> w{};
    for (std::size_t j = 0; j < kManipDim; ++j) w[j] = 1.0 / joint_step(kTorsoIndex + j, params);
    const double eta = params.rrt_eta / params.dq_revolute;  // in normalized units

    auto steer = [&](const ManipConfig& from, const ManipConfig& to, bool& reached) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < kManipDim; ++j) d2 += std::pow((to[j] - from[j]) * w[j], 2);
      const double d = std::sqrt(d2);
      reached = d <= eta;
      if (reached) return to;
      ManipConfig out{};
      for (std::size_t j = 0; j < kManipDim; ++j) out[j] = from[j] + (to[j] - from[j]) * (eta / d);
      return out;
    };
    // Adds a step toward target; returns the new node index or -1.
    auto extend = [&](Tree& t, const ManipConfig& target, bool& reached) {
      const int near = t.nearest(target, w);
      const ManipConfig qn = steer(t.nodes[static_cast<std::size_t>(near)], target, reached);
      if (!cert.clear(full(t.nodes[static_cast<std::size_t>(near)]), full(qn))) {
        reached = false;
        return -1;
      }
      t.nodes.push_back(qn);
      t.parent.push_back(near);
      return static_cast<int>(t.nodes.size()) - 1;
    };

    Tree ta{{manip_part(q_start)}, {-1}};
    Tree tb{{manip_part(goal)}, {-1}};
    bool a_is_start = true;
    bool found = false;
    for (int it = 0; it < params.max_iters && !found; ++it) {
      ManipConfig sample{};
      for (std::size_t j = 0; j < kManipDim; ++j) sample[j] = rng.uniform(model.lower(j), model.upper(j));
      bool reached = false;
      const int na = extend(ta, sample, reached);
      if (na >= 0) {
        const ManipConfig target = ta.nodes[static_cast<std::size_t>(na)];
        int nb = -1;
        for (;;) {
          bool hit = false;
          const int n = extend(tb, target, hit);
          if (n < 0) break;
          nb = n;
          if (hit) {
            found = true;
            break;
          }
        }
        if (found) {
          auto pa = ta.path_to_root(na);
          auto pb = tb.path_to_root(nb);
          std::reverse(pa.begin(), pa.end());
          // pa ends and pb starts at the same configuration.
          pa.insert(pa.end(), pb.begin() + 1, pb.end());
          if (!a_is_start) std::reverse(pa.begin(), pa.end());
          path = std::move(pa);
        }
      }
      std::swap(ta, tb);
      a_is_start = !a_is_start;
    }
    if (!found) return failure(FailureReason::timeout);

    for (int s = 0; s < params.shortcut_attempts && path.size() > 2; ++s) {
      std::size_t i = rng.below(path.size());
      std::size_t j = rng.below(path.size());
      if (i > j) std::swap(i, j);
      if (j - i < 2) continue;
      if (cert.clear(full(path[i]), full(path[j]))) {
        path.erase(path.begin() + static_cast<std::ptrdiff_t>(i + 1), path.begin() + static_cast<std::ptrdiff_t>(j));
      }
    }
  }
  std::vector<Config> configs;
  configs.reserve(path.size());
  for (const auto& m : path) configs.push_back(full(m));
  configs.front() = q_start;
  return success(single_segment(densify(configs, params), SegmentMethod::rrt_connect, params));
}

PlanResult plan_base(const RobotModel& model, const Config& q_start, Vec2 goal_xy, double goal_yaw,
                     const CollisionScene& scene, const PlannerParams& params) {
  if (manip_part(q_start) != model.stow || config_in_collision(model, q_start, scene)) {
    return failure(FailureReason::invalid_start);
  }
  goal_yaw = wrap_angle(goal_yaw);
  std::vector<Config> keys{q_start};
  const Vec2 d = goal_xy - Vec2{q_start[0], q_start[1]};
  if (d.norm() > 1e-9) {
    const double heading = std::atan2(d.y, d.x);
    Config turn = q_start;
    turn[2] = heading;
    if (std::abs(wrap_angle(heading - q_start[2])) > 0.0) keys.push_back(turn);
    Config drive = turn;
    drive[0] = goal_xy.x;
    drive[1] = goal_xy.y;
    keys.push_back(drive);
  }
  Config last = keys.back();
  last[2] = goal_yaw;
  if (wrap_angle(goal_yaw - keys.back()[2]) != 0.0) keys.push_back(last);
  if (keys.size() == 1) return success(single_segment({q_start}, SegmentMethod::base_heuristic, params));

  const Certifier cert{model, scene, params, reach_bounds(model)};
  for (std::size_t i = 1; i < keys.size(); ++i) {
    if (!cert.clear(keys[i - 1], keys[i])) return failure(FailureReason::in_collision);
  }
  return success(single_segment(densify(keys, params), SegmentMethod::base_heuristic, params));
}

std::optional<Config> solve_ik(const RobotModel& model, const Config& seed, const Pose3& target,
                               const CollisionScene& scene, const PlannerParams& params, Rng& rng) {
  for (int attempt = 0; attempt < params.goal_ik_attempts; ++attempt) {
    Config q = seed;
    if (attempt > 0) {
      for (std::size_t j = 0; j < kManipDim; ++j) q[kTorsoIndex + j] = rng.uniform(model.lower(j), model.upper(j));
    }
    for (int it = 0; it < params.goal_ik_iters; ++it) {
      const auto e = pose_error(ee_unchecked(model, q), target);
      if (std::hypot(e[0], e[1], e[2]) <= params.ik_tol_pos && std::hypot(e[3], e[4], e[5]) <= params.ik_tol_rot) {
        if (!config_in_collision(model, q, scene)) return q;
        break;
      }
      q = ik_step(model, q, target, params.damping);
    }
  }
  return std::nullopt;
}

void AnchorNoise::validate() const {
  if (position < 0.0 || yaw < 0.0 || joint < 0.0) {
    throw Error(ErrorCode::invalid_parameter, "anchor noise must be non-negative");
  }
}

namespace {

AnchorPose randomize(const RobotModel& model, const AnchorPose& a, Rng& rng) {
  a.noise.validate();
  AnchorPose out = a;
  const AnchorNoise& n = a.noise;
  if (auto* b = std::get_if<BaseGoal>(&out.goal)) {
    if (n.position > 0.0) b->xy = b->xy + Vec2{rng.normal(0.0, n.position), rng.normal(0.0, n.position)};
    if (n.yaw > 0.0) b->yaw = wrap_angle(b->yaw + rng.normal(0.0, n.yaw));
  } else if (auto* e = std::get_if<EeGoal>(&out.goal)) {
    if (n.position > 0.0) {
      e->pose.position += Vec3{rng.normal(0.0, n.position), rng.normal(0.0, n.position), rng.normal(0.0, n.position)};
    }
    if (n.yaw > 0.0) e->pose.orientation = (Quat::from_yaw(rng.normal(0.0, n.yaw)) * e->pose.orientation).normalized();
  } else if (auto* c = std::get_if<ConfigGoal>(&out.goal)) {
    if (n.joint > 0.0) {
      for (std::size_t j = 0; j < kManipDim; ++j) {
        c->q[j] = std::clamp(c->q[j] + rng.normal(0.0, n.joint), model.lower(j), model.upper(j));
      }
    }
  }
  return out;
}

}  // namespace

PlanResult plan_anchors(const RobotModel& model, const Config& q_start, const std::vector<AnchorPose>& anchors,
                        const CollisionScene& scene, const PlannerParams& params, Rng& rng) {
  if (anchors.empty()) throw Error(ErrorCode::invalid_parameter, "plan_anchors: anchors must be non-empty");
  params.validate();
  Trajectory traj;
  traj.waypoints = {q_start};
  traj.gripper_closed = {false};
  bool gripper_on_last = false;

  auto append = [&](const Trajectory& sub, std::size_t anchor, SegmentMethod method) {
    const std::size_t begin = traj.waypoints.size() - 1;
    const bool g = traj.gripper_closed.back();
    for (std::size_t i = 1; i < sub.waypoints.size(); ++i) {
      traj.waypoints.push_back(sub.waypoints[i]);
      traj.gripper_closed.push_back(g);
    }
    if (sub.waypoints.size() > 1) gripper_on_last = false;
    traj.segments.push_back({anchor, method, "ok", begin, traj.waypoints.size() - 1});
  };
  auto fail = [](std::size_t idx, FailureReason screw, FailureReason rrt) {
    PlanResult r;
    r.failure.reason = rrt != FailureReason::none ? rrt : screw;
    r.failure.segment = idx;
    r.failure.screw_reason = screw;
    r.failure.rrt_reason = rrt;
    return r;
  };

  for (std::size_t idx = 0; idx < anchors.size(); ++idx) {
    Rng noise_rng = rng.substream("anchor/" + std::to_string(idx));
    Rng plan_rng = rng.substream("segment/" + std::to_string(idx));
    const AnchorPose anchor = randomize(model, anchors[idx], noise_rng);
    const Config current = traj.waypoints.back();

    if (const auto* g = std::get_if<GripperCommand>(&anchor.goal)) {
      if (gripper_on_last) {
        traj.waypoints.push_back(current);
        traj.gripper_closed.push_back(traj.gripper_closed.back());
      }
      traj.gripper_closed.back() = g->close;
      gripper_on_last = true;
      const std::size_t last = traj.waypoints.size() - 1;
      traj.segments.push_back({idx, SegmentMethod::gripper, "ok", last, last});
    } else if (const auto* b = std::get_if<BaseGoal>(&anchor.goal)) {
      Config from = current;
      if (manip_part(current) != model.stow) {
        auto tuck = plan_rrt_connect(model, current, with_manip(current, model.stow), scene, params, plan_rng);
        if (!tuck.ok()) return fail(idx, FailureReason::none, tuck.failure.reason);
        append(*tuck.trajectory, idx, SegmentMethod::rrt_connect);
        from = traj.waypoints.back();
      }
      auto r = plan_base(model, from, b->xy, b->yaw, scene, params);
      if (!r.ok()) return fail(idx, FailureReason::none, r.failure.reason);
      append(*r.trajectory, idx, SegmentMethod::base_heuristic);
    } else if (const auto* e = std::get_if<EeGoal>(&anchor.goal)) {
      auto s = plan_screw(model, current, e->pose, scene, params);
      if (s.ok()) {
        append(*s.trajectory, idx, SegmentMethod::screw);
        continue;
      }
      const auto goal = solve_ik(model, current, e->pose, scene, params, plan_rng);
      if (!goal) return fail(idx, s.failure.reason, FailureReason::ik_diverged);
      auto r = plan_rrt_connect(model, current, *goal, scene, params, plan_rng);
      if (!r.ok()) return fail(idx, s.failure.reason, r.failure.reason);
      append(*r.trajectory, idx, SegmentMethod::rrt_connect);
    } else if (const auto* c = std::get_if<ConfigGoal>(&anchor.goal)) {
      auto r = plan_rrt_connect(model, current, with_manip(current, c->q), scene, params, plan_rng);
      if (!r.ok()) return fail(idx, FailureReason::none, r.failure.reason);
      append(*r.trajectory, idx, SegmentMethod::rrt_connect);
    }
  }
  traj.dt = 0.1;
  return success(std::move(traj));
}

}  // namespace darkstore
