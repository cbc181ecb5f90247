#pragma once

#include <array>
#include <string>
#include <vector>

#include "darkstore/planner.hpp"
#include "darkstore/scene.hpp"

namespace darkstore {

struct RenderOptions {
  double pixels_per_metre = 40.0;
  bool glyphs = false;  // major directions of the layout field
  bool items = false;   // one dot per item
  double glyph_length = 0.2;  // metres
};

// Top-down drawing of the store. The y axis points up in the picture.
// Glyphs need the field, so they are drawn from layout_from_scene.
std::string render_svg(const SceneFile& scene, const RenderOptions& opts = {},
                       const LayoutParams& params = {});
// Same content as JSON: walls, fixture rectangles, glyphs and items.
std::string render_json(const SceneFile& scene, const RenderOptions& opts = {},
                        const LayoutParams& params = {});

// 7 arm targets, gripper, torso, base forward velocity, base yaw rate.
using ActionRecord = std::array<double, 11>;
inline constexpr std::size_t kActionArm = 0;
inline constexpr std::size_t kActionGripper = 7;
inline constexpr std::size_t kActionTorso = 8;
inline constexpr std::size_t kActionLinear = 9;
inline constexpr std::size_t kActionAngular = 10;

// One record per waypoint. Record i drives from waypoint i to i+1; the last
// record holds position with zero base velocity. Throws invalid_parameter
// when dt <= 0 or the gripper flags do not match the waypoints.
std::vector<ActionRecord> export_actions(const Trajectory& traj, double dt);

struct BasePose {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

// Unicycle integration: move along the current heading, then turn.
// Returns actions.size() poses, starting at start.
std::vector<BasePose> integrate_base(const BasePose& start, const std::vector<ActionRecord>& actions, double dt);

}  // namespace darkstore
