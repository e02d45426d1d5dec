#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gtg/geom.hpp"
#include "gtg/point_cloud.hpp"

namespace gtg {

enum class PrimitiveType { box, cylinder, sphere };

const char* to_string(PrimitiveType t);
PrimitiveType primitive_type_from_string(const std::string& s);

// Analytic solid. Local frames: box extents are full side lengths about the
// origin; cylinder axis is local z with radius/height; sphere is centered.
struct Primitive {
  PrimitiveType type = PrimitiveType::box;
  Vec3 extents;  // box: (lx, ly, lz); cylinder: (radius, -, height); sphere: (radius, -, -)
  RigidTransform pose;  // object-to-world
};

struct RayHit {
  double t = 0.0;  // travel along the unit direction
  Vec3 point;      // world
  Vec3 normal;     // outward unit normal, world
  int object_id = -1;  // -1 = support plane
};

// Known-geometry scene: primitives resting above a support plane. The
// analytic surface stands in for the benchmark's mesh models, so grasp
// labels come from exact geometry rather than the sensor cloud.
struct SceneModel {
  std::vector<Primitive> objects;
  double support_z = 0.0;

  // Nearest intersection of a ray with the objects (and optionally the
  // support plane, clipped to |x|,|y| <= plane_half_extent of the origin).
  std::optional<RayHit> raycast(const Vec3& origin, const Vec3& dir,
                                bool include_plane, double plane_half_extent) const;

  // Unsigned distance from p to the surface of object i.
  double distance_to_object(size_t i, const Vec3& p) const;

  // Deterministic dense sampling of every object surface at ~spacing.
  PointCloud sample_surfaces(double spacing) const;

  nlohmann::json to_json() const;
  static SceneModel from_json(const nlohmann::json& j);
};

}  // namespace gtg
