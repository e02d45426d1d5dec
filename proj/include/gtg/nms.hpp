#pragma once

#include <vector>

#include "gtg/gripper.hpp"

namespace gtg {

// Greedy pose non-maximum suppression: repeatedly keep the best remaining
// pose (score descending; unscored poses rank below scored ones in their
// generation order) and drop every pose within BOTH d_pos and d_ang of it.
// Output sorted by the same ranking. Idempotent.
std::vector<GraspPose> nms_poses(const std::vector<GraspPose>& poses, double d_pos,
                                 double d_ang);

}  // namespace gtg
