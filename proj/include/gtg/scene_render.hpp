#pragma once

#include <cstdint>
#include <string>

#include "gtg/depth_image.hpp"
#include "gtg/scene.hpp"

namespace gtg {

// Virtual pinhole camera: +z forward, +x right, +y down in the camera frame.
struct VirtualCamera {
  size_t width = 160, height = 120;
  CameraIntrinsics intrinsics{130.0, 130.0, 80.0, 60.0};
  RigidTransform pose;       // camera-to-world
  double noise_sigma = 0.0;  // Gaussian depth noise (m); 0 disables
  double plane_half_extent = 0.22;  // rendered support-plane half size (m)

  static VirtualCamera looking_at(const Vec3& eye, const Vec3& target);
};

// A scene plus the camera that observed it; the unit stored per scene file.
struct SceneRecord {
  int id = 0;
  SceneModel scene;
  VirtualCamera camera;

  nlohmann::json to_json() const;
  static SceneRecord from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static SceneRecord load(const std::string& path);
};

// Ray-cast depth render with exact hidden-surface removal; misses are holes.
// Depth noise, when enabled, is seeded deterministically.
DepthImage render_depth(const SceneModel& scene, const VirtualCamera& camera,
                        uint64_t noise_seed);

// Random tabletop clutter: 2-4 graspable primitives resting on the support
// plane, camera on an elevated ring looking at the workspace center.
SceneRecord synthesize_scene(int scene_id, uint64_t seed);

}  // namespace gtg
