#pragma once

#include <vector>

#include "gtg/gripper.hpp"
#include "gtg/point_cloud.hpp"

namespace gtg {

// Grid generator for top-down hands: snap points to an (xy_step, z_step)
// grid, replicate each occupied cell down to z_min (occlusion gaps), and emit
// one -z approach pose per yaw in [0, pi) per marked cell. Inside-point
// filtering runs against the original, un-replicated cloud.
struct Heuristic4DofConfig {
  double xy_step = 0.01;
  double z_step = 0.01;
  double z_min = 0.0;
  double yaw_step = M_PI / 6.0;  // 30 degrees
  double fixed_width = 0.10;
  size_t min_inside_points = 5;

  void validate() const;
};

std::vector<GraspPose> heuristic_4dof_generate(const PointCloud& cloud,
                                               const GripperGeometry& gripper,
                                               const Heuristic4DofConfig& cfg);

}  // namespace gtg
