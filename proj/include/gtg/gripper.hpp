#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gtg/geom.hpp"
#include "gtg/point_cloud.hpp"

namespace gtg {

// Parallel-jaw hand. The gripper frame origin sits at the midpoint between
// the fingertips; axes are approach (x), closing (y), minor (z). Fingers
// extend back along -x to -finger_depth, the hand body behind them.
struct GripperGeometry {
  double max_aperture = 0.10;
  double finger_depth = 0.04;
  double finger_thickness = 0.01;
  double finger_height = 0.02;
  double base_depth = 0.02;

  void validate() const;
};

enum class GraspSource { gpg_raw, gpg_inpainted, heuristic4dof };

const char* to_string(GraspSource s);
GraspSource grasp_source_from_string(const std::string& s);

struct GraspPose {
  Vec3 position;       // gripper frame origin, world coordinates (m)
  Mat3 rotation;       // columns: approach, closing, minor
  double width = 0.0;  // candidate aperture (m)
  GraspSource source = GraspSource::gpg_raw;
  std::optional<double> score;

  Vec3 approach_axis() const { return rotation.col(0); }
  Vec3 closing_axis() const { return rotation.col(1); }
  Vec3 minor_axis() const { return rotation.col(2); }

  // Orthonormality within 1e-6, det +1, 0 < width <= max_aperture.
  void validate(const GripperGeometry& g) const;
};

struct RegionPair {
  PointCloud inside;   // gripper frame
  PointCloud outside;  // gripper frame
};

// p' = R^T (p - t); normals rotated by R^T. A rigid map, so pairwise
// distances are preserved.
PointCloud to_gripper_frame(const GraspPose& pose, const PointCloud& cloud);
Vec3 to_gripper_frame(const GraspPose& pose, const Vec3& p);

// Box between the fingers: [-finger_depth,0] x [-w/2,w/2] x [-h/2,h/2].
Aabb closing_volume(const GripperGeometry& g, double width);

// The three solid boxes of the hand (two fingers + base) for a given width.
std::array<Aabb, 3> hand_body_boxes(const GripperGeometry& g, double width);

// True iff any cloud point lies within `clearance` of the hand solid.
bool body_collides(const GripperGeometry& g, const GraspPose& pose,
                   const PointCloud& cloud, double clearance = 0.0);

// Inside = strict closing volume; outside = closing volume scaled by
// outside_scale about its center, plus the hand body boxes, minus inside.
RegionPair extract_regions(const GripperGeometry& g, const GraspPose& pose,
                           const PointCloud& cloud, double outside_scale);

// (translation distance, geodesic rotation angle in [0, pi]).
std::pair<double, double> pose_distance(const GraspPose& a, const GraspPose& b);

}  // namespace gtg
