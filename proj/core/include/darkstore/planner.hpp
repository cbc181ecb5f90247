#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "darkstore/geometry.hpp"
#include "darkstore/rng.hpp"

namespace darkstore {

// 11 values: x, y, yaw, torso_z, arm_1..arm_7.
inline constexpr std::size_t kConfigDim = 11;
inline constexpr std::size_t kManipDim = 8;  // torso plus arm
inline constexpr std::size_t kTorsoIndex = 3;
inline constexpr std::size_t kArmIndex = 4;
using Config = std::array<double, kConfigDim>;
using ManipConfig = std::array<double, kManipDim>;

ManipConfig manip_part(const Config& q);
Config with_manip(const Config& q, const ManipConfig& m);

struct CollisionSphere {
  Vec3 center;  // in the owning link frame
  double radius = 0.0;
  bool operator==(const CollisionSphere&) const = default;
};

struct ArmJoint {
  std::string name;
  Pose3 offset;  // parent frame to joint frame, applied before the rotation
  Vec3 axis{0, 0, 1};
  double lo = 0.0;
  double hi = 0.0;
  std::vector<CollisionSphere> spheres;
  bool operator==(const ArmJoint&) const = default;
};

struct RobotModel {
  std::string name = "robot";
  // Base footprint radius used for store containment.
  double base_radius = 0.3;
  std::vector<CollisionSphere> base_spheres;
  Pose3 torso_offset;  // base frame to torso joint frame; the torso slides along its z
  double torso_lo = 0.0;
  double torso_hi = 0.0;
  std::vector<CollisionSphere> torso_spheres;
  std::vector<ArmJoint> arm;
  Pose3 ee_offset;
  ManipConfig stow{};

  double lower(std::size_t manip_index) const;
  double upper(std::size_t manip_index) const;
  bool within_limits(const Config& q, double tol = 1e-12) const;
  Config clamp(const Config& q) const;
  void validate() const;
  std::size_t sphere_count() const;
  bool operator==(const RobotModel&) const = default;
};

// Fetch-sized approximation; not a calibrated model.
const RobotModel& default_robot_model();

struct WorldSphere {
  Vec3 center;
  double radius = 0.0;
};

struct FkResult {
  Pose3 base;
  Pose3 torso;
  std::vector<Pose3> joints;  // joint frames after their rotation
  Pose3 ee;
  std::vector<WorldSphere> spheres;
};

FkResult fk(const RobotModel& model, const Config& q);
Pose3 ee_pose(const RobotModel& model, const Config& q);

struct SceneObstacles {
  std::vector<Obb3> static_boxes;   // fixtures, walls, boards
  std::vector<Obb3> dynamic_boxes;  // items
  double margin = 0.005;
  std::optional<Polygon> floor;     // base must stay inside when set
};

// Obstacles bucketed on a planar grid for fast sphere queries.
class CollisionScene {
 public:
  CollisionScene() = default;
  explicit CollisionScene(SceneObstacles obstacles, double cell = 0.5);

  const SceneObstacles& obstacles() const { return obstacles_; }
  double margin() const { return obstacles_.margin; }
  // Smallest sphere clearance over nearby boxes, capped at cap.
  double sphere_clearance(const Vec3& c, double r, double cap) const;
  bool sphere_hits(const Vec3& c, double r) const;

 private:
  template <class F>
  void for_nearby(const Vec3& c, double reach, F&& f) const;
  const Obb3& box(std::size_t i) const;

  SceneObstacles obstacles_;
  double cell_ = 0.5;
  Vec2 origin_{};
  int nx_ = 0;
  int ny_ = 0;
  std::vector<std::vector<std::uint32_t>> buckets_;
};

bool config_in_collision(const RobotModel& model, const Config& q, const CollisionScene& scene);
// Lower bound on the clearance of every sphere, capped at cap. Base
// containment counts as a clearance too.
double config_clearance(const RobotModel& model, const Config& q, const CollisionScene& scene, double cap = 0.3);

// Constant-twist interpolation; endpoints exact. n >= 2.
std::vector<Pose3> screw_interp(const Pose3& a, const Pose3& b, int n);
// SE(3) logarithm and exponential as (v, omega) twists.
struct Twist {
  Vec3 v;
  Vec3 w;
};
Twist se3_log(const Pose3& p);
Pose3 se3_exp(const Twist& t);

// Numerically differentiated 6x8 Jacobian of the ee pose (position rows,
// then world-frame rotation rows) in the torso and arm joints.
using Jacobian = std::array<std::array<double, kManipDim>, 6>;
Jacobian manipulator_jacobian(const RobotModel& model, const Config& q, double h = 1e-6);
// Position and rotation-vector error at a target, both in the world frame.
std::array<double, 6> pose_error(const Pose3& current, const Pose3& target);
Config ik_step(const RobotModel& model, const Config& q, const Pose3& target, double damping);

struct PlannerParams {
  double dq_revolute = 0.02;
  double dq_prismatic = 0.01;
  double rrt_eta = 0.15;
  int max_iters = 5000;
  double damping = 0.05;
  double screw_step_pos = 0.01;
  double screw_step_rot = 2.0 * kPi / 180.0;
  int ik_iters = 50;
  double ik_tol_pos = 1e-4;
  double ik_tol_rot = 0.5 * kPi / 180.0;
  int shortcut_attempts = 100;
  int goal_ik_attempts = 8;
  int goal_ik_iters = 300;
  double clearance_cap = 0.3;
  bool operator==(const PlannerParams&) const = default;

  void validate() const;
};

enum class SegmentMethod { screw, rrt_connect, base_heuristic, gripper };
enum class FailureReason { none, ik_diverged, in_collision, timeout, invalid_start };
std::string to_string(SegmentMethod m);
std::string to_string(FailureReason r);
SegmentMethod segment_method_from_string(const std::string& s);

struct Segment {
  std::size_t anchor_index = 0;
  SegmentMethod method = SegmentMethod::screw;
  std::string status = "ok";
  std::size_t begin = 0;  // first waypoint index
  std::size_t end = 0;    // last waypoint index, inclusive
  bool operator==(const Segment&) const = default;
};

struct Trajectory {
  std::vector<Config> waypoints;
  std::vector<bool> gripper_closed;  // gripper state commanded at each waypoint
  double dt = 0.1;
  std::vector<Segment> segments;

  std::size_t size() const { return waypoints.size(); }
  bool operator==(const Trajectory&) const = default;
};

struct PlanFailure {
  FailureReason reason = FailureReason::none;
  std::size_t segment = 0;
  FailureReason screw_reason = FailureReason::none;
  FailureReason rrt_reason = FailureReason::none;
};

// Either a trajectory or the reason there is none.
struct PlanResult {
  std::optional<Trajectory> trajectory;
  PlanFailure failure;

  bool ok() const { return trajectory.has_value(); }
};

// Linear joint interpolation of a path so each joint moves at most its step
// per waypoint.
std::vector<Config> densify(const std::vector<Config>& path, const PlannerParams& params);
// True when every configuration on the straight joint-space segment keeps
// the margin: uses a sphere-displacement bound and bisection.
bool segment_clear(const RobotModel& model, const Config& a, const Config& b, const CollisionScene& scene,
                   const PlannerParams& params);

PlanResult plan_screw(const RobotModel& model, const Config& q_start, const Pose3& ee_goal,
                      const CollisionScene& scene, const PlannerParams& params);
PlanResult plan_rrt_connect(const RobotModel& model, const Config& q_start, const Config& q_goal,
                            const CollisionScene& scene, const PlannerParams& params, Rng& rng);
// Rotate toward the goal, drive straight, rotate to the goal yaw. The arm
// stays at the model's stow configuration.
PlanResult plan_base(const RobotModel& model, const Config& q_start, Vec2 goal_xy, double goal_yaw,
                     const CollisionScene& scene, const PlannerParams& params);

// Solve IK from a seed; returns a collision-free in-limit config on success.
std::optional<Config> solve_ik(const RobotModel& model, const Config& seed, const Pose3& target,
                               const CollisionScene& scene, const PlannerParams& params, Rng& rng);

struct AnchorNoise {
  double position = 0.0;  // metres, per axis
  double yaw = 0.0;       // radians
  double joint = 0.0;     // radians or metres
  bool operator==(const AnchorNoise&) const = default;

  void validate() const;
};

struct BaseGoal {
  Vec2 xy;
  double yaw = 0.0;
};
struct EeGoal {
  Pose3 pose;
};
struct ConfigGoal {
  ManipConfig q{};
};
struct GripperCommand {
  bool close = false;
};

struct AnchorPose {
  std::variant<BaseGoal, EeGoal, ConfigGoal, GripperCommand> goal;
  AnchorNoise noise;
};

// Samples anchor noise, then plans every segment in order. Screw motion is
// tried first for ee goals and RRT-Connect after it.
PlanResult plan_anchors(const RobotModel& model, const Config& q_start, const std::vector<AnchorPose>& anchors,
                        const CollisionScene& scene, const PlannerParams& params, Rng& rng);

}  // namespace darkstore
