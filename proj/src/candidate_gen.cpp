#include "gtg/candidate_gen.hpp"

#include "gtg/cloud_ops.hpp"
#include "gtg/rng.hpp"

namespace gtg {

std::vector<GraspPose> dual_cloud_generate(const PointCloud& cloud,
                                           const DepthImage* depth,
                                           const RigidTransform& camera_to_world,
                                           const GripperGeometry& gripper,
                                           const DualCloudConfig& cfg,
                                           uint64_t rng_seed, int workers) {
  std::vector<GraspPose> merged;
  if (!cloud.empty())
    merged = gpg_generate(cloud, gripper, cfg.gpg, Rng::mix(rng_seed, 1), workers,
                          GraspSource::gpg_raw);

  if (depth != nullptr) {
    const DepthImage filled =
        inpaint_depth(*depth, cfg.inpaint_max_iters, cfg.inpaint_tol);
    PointCloud inpainted = depth_to_cloud(filled);
    for (Vec3& p : inpainted.points) p = camera_to_world.apply(p);
    if (cfg.voxel > 0.0) inpainted = voxel_downsample(inpainted, cfg.voxel);
    if (!inpainted.empty()) {
      inpainted = estimate_normals(inpainted, cfg.normal_radius,
                                   camera_to_world.translation);
      auto extra = gpg_generate(inpainted, gripper, cfg.gpg, Rng::mix(rng_seed, 2),
                                workers, GraspSource::gpg_inpainted);
      merged.insert(merged.end(), extra.begin(), extra.end());
    }
  }

  return nms_poses(merged, cfg.nms_d_pos, cfg.nms_d_ang);
}

}  // namespace gtg
