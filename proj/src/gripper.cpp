#include "gtg/gripper.hpp"

#include <algorithm>
#include <cmath>

#include "gtg/error.hpp"

namespace gtg {

void GripperGeometry::validate() const {
  if (max_aperture < 1e-3) throw ConfigError("gripper max_aperture must be >= 1 mm");
  if (finger_depth <= 0.0 || finger_thickness <= 0.0 || finger_height <= 0.0 ||
      base_depth <= 0.0)
    throw ConfigError("gripper dimensions must be positive");
}

const char* to_string(GraspSource s) {
  switch (s) {
    case GraspSource::gpg_raw: return "gpg_raw";
    case GraspSource::gpg_inpainted: return "gpg_inpainted";
    case GraspSource::heuristic4dof: return "heuristic4dof";
  }
  return "gpg_raw";
}

GraspSource grasp_source_from_string(const std::string& s) {
  if (s == "gpg_raw") return GraspSource::gpg_raw;
  if (s == "gpg_inpainted") return GraspSource::gpg_inpainted;
  if (s == "heuristic4dof") return GraspSource::heuristic4dof;
  throw DataError("unknown grasp source '" + s + "'");
}

void GraspPose::validate(const GripperGeometry& g) const {
  if (!position.finite() || !rotation.finite())
    throw DataError("grasp pose has non-finite entries");
  const Mat3 rtr = rotation.transposed() * rotation;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double expected = i == j ? 1.0 : 0.0;
      if (std::abs(rtr(i, j) - expected) > 1e-6)
        throw DataError("grasp rotation is not orthonormal");
    }
  if (rotation.det() < 0.0) throw DataError("grasp rotation is left-handed");
  if (!(width > 0.0) || width > g.max_aperture + 1e-12)
    throw DataError("grasp width outside (0, max_aperture]");
}

PointCloud to_gripper_frame(const GraspPose& pose, const PointCloud& cloud) {
  const Mat3 rt = pose.rotation.transposed();
  PointCloud out;
  out.frame_id = "gripper";
  out.points.reserve(cloud.size());
  for (const Vec3& p : cloud.points) out.points.push_back(rt * (p - pose.position));
  if (cloud.has_normals()) {
    out.normals.reserve(cloud.size());
    for (const Vec3& n : cloud.normals) out.normals.push_back(rt * n);
  }
  return out;
}

Vec3 to_gripper_frame(const GraspPose& pose, const Vec3& p) {
  return pose.rotation.transposed() * (p - pose.position);
}

Aabb closing_volume(const GripperGeometry& g, double width) {
  if (width > g.max_aperture + 1e-12)
    throw ConfigError("closing width exceeds max_aperture");
  return {{-g.finger_depth, -width / 2.0, -g.finger_height / 2.0},
          {0.0, width / 2.0, g.finger_height / 2.0}};
}

std::array<Aabb, 3> hand_body_boxes(const GripperGeometry& g, double width) {
  const double hw = width / 2.0;
  const double hh = g.finger_height / 2.0;
  const Aabb finger_pos{{-g.finger_depth, hw, -hh},
                        {0.0, hw + g.finger_thickness, hh}};
  const Aabb finger_neg{{-g.finger_depth, -hw - g.finger_thickness, -hh},
                        {0.0, -hw, hh}};
  const Aabb base{{-g.finger_depth - g.base_depth, -hw - g.finger_thickness, -hh},
                  {-g.finger_depth, hw + g.finger_thickness, hh}};
  return {finger_pos, finger_neg, base};
}

bool body_collides(const GripperGeometry& g, const GraspPose& pose,
                   const PointCloud& cloud, double clearance) {
  const auto boxes = hand_body_boxes(g, pose.width);
  const Mat3 rt = pose.rotation.transposed();
  for (const Vec3& p : cloud.points) {
    const Vec3 q = rt * (p - pose.position);
    for (const Aabb& box : boxes)
      if (box.distance(q) <= clearance) return true;
  }
  return false;
}

RegionPair extract_regions(const GripperGeometry& g, const GraspPose& pose,
                           const PointCloud& cloud, double outside_scale) {
  if (!(outside_scale > 1.0)) throw ConfigError("outside_scale must be > 1");
  const Aabb inside_box = closing_volume(g, pose.width);
  const Aabb context_box = inside_box.scaled_about_center(outside_scale);
  const auto body = hand_body_boxes(g, pose.width);
  const Mat3 rt = pose.rotation.transposed();

  RegionPair out;
  out.inside.frame_id = "gripper";
  out.outside.frame_id = "gripper";
  for (const Vec3& p : cloud.points) {
    const Vec3 q = rt * (p - pose.position);
    if (inside_box.contains_open(q)) {
      out.inside.points.push_back(q);
    } else if (context_box.contains_open(q) || body[0].contains_open(q) ||
               body[1].contains_open(q) || body[2].contains_open(q)) {
      out.outside.points.push_back(q);
    }
  }
  return out;
}

std::pair<double, double> pose_distance(const GraspPose& a, const GraspPose& b) {
  const double translation = (a.position - b.position).norm();
  const Mat3 rel = a.rotation.transposed() * b.rotation;
  // Geodesic angle arccos((trace-1)/2), evaluated via atan2 so identical
  // rotations give exactly zero instead of acos roundoff noise.
  const Vec3 skew{rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0), rel(1, 0) - rel(0, 1)};
  const double s = skew.norm() / 2.0;
  const double c = (rel.trace() - 1.0) / 2.0;
  return {translation, std::atan2(s, c)};
}

}  // namespace gtg
