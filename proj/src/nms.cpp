#include "gtg/nms.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace gtg {

std::vector<GraspPose> nms_poses(const std::vector<GraspPose>& poses, double d_pos,
                                 double d_ang) {
  std::vector<size_t> order(poses.size());
  std::iota(order.begin(), order.end(), size_t(0));
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const double sa = poses[a].score.value_or(-std::numeric_limits<double>::infinity());
    const double sb = poses[b].score.value_or(-std::numeric_limits<double>::infinity());
    return sa > sb;
  });

  std::vector<GraspPose> kept;
  std::vector<char> suppressed(poses.size(), 0);
  for (size_t oi = 0; oi < order.size(); ++oi) {
    const size_t i = order[oi];
    if (suppressed[i]) continue;
    kept.push_back(poses[i]);
    for (size_t oj = oi + 1; oj < order.size(); ++oj) {
      const size_t j = order[oj];
      if (suppressed[j]) continue;
      const auto [dt, da] = pose_distance(poses[i], poses[j]);
      if (dt <= d_pos && da <= d_ang) suppressed[j] = 1;
    }
  }
  return kept;
}

}  // namespace gtg
