#pragma once

#include <cstdint>
#include <vector>

#include "gtg/depth_image.hpp"
#include "gtg/gpg.hpp"
#include "gtg/inpaint.hpp"
#include "gtg/nms.hpp"

namespace gtg {

struct DualCloudConfig {
  GpgConfig gpg;
  double nms_d_pos = 0.005;          // duplicate-candidate suppression (m)
  double nms_d_ang = M_PI / 180.0;   // 1 degree
  size_t inpaint_max_iters = 2000;
  double inpaint_tol = 1e-6;
  double normal_radius = 0.01;       // inpainted-branch normal estimation
  double voxel = 0.002;              // inpainted-branch downsampling; 0 = off
};

// Candidates from the raw cloud plus, when a depth image is provided,
// candidates from the inpainted-depth back-projected cloud (transformed by
// camera_to_world and given fresh normals). The merged set is deduplicated
// with NMS at (nms_d_pos, nms_d_ang); `source` records each pose's origin.
std::vector<GraspPose> dual_cloud_generate(const PointCloud& cloud,
                                           const DepthImage* depth,
                                           const RigidTransform& camera_to_world,
                                           const GripperGeometry& gripper,
                                           const DualCloudConfig& cfg,
                                           uint64_t rng_seed, int workers = 0);

}  // namespace gtg
