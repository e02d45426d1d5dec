#include "gtg/heuristic4dof.hpp"

#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "gtg/error.hpp"
#include "gtg/spatial_index.hpp"

namespace gtg {

void Heuristic4DofConfig::validate() const {
  if (xy_step <= 0.0 || z_step <= 0.0 || yaw_step <= 0.0)
    throw ConfigError("heuristic4dof steps must be positive");
  if (fixed_width <= 0.0) throw ConfigError("heuristic4dof fixed_width must be positive");
}

std::vector<GraspPose> heuristic_4dof_generate(const PointCloud& cloud,
                                               const GripperGeometry& gripper,
                                               const Heuristic4DofConfig& cfg) {
  cfg.validate();
  gripper.validate();
  if (cloud.empty()) throw DataError("heuristic_4dof_generate: empty cloud");
  if (cfg.fixed_width > gripper.max_aperture + 1e-12)
    throw ConfigError("heuristic4dof fixed_width exceeds gripper max_aperture");

  using Key = std::tuple<int64_t, int64_t, int64_t>;
  std::set<Key> cells;
  const int64_t k_min = int64_t(std::ceil(cfg.z_min / cfg.z_step - 1e-9));
  for (const Vec3& p : cloud.points) {
    const int64_t ix = int64_t(std::llround(p.x / cfg.xy_step));
    const int64_t iy = int64_t(std::llround(p.y / cfg.xy_step));
    const int64_t iz = int64_t(std::llround(p.z / cfg.z_step));
    // Replicate straight down: every level between z_min and the point.
    for (int64_t k = iz; k >= k_min; --k) cells.insert({ix, iy, k});
  }

  const Vec3 approach{0.0, 0.0, -1.0};
  std::vector<Mat3> yaw_frames;
  for (double yaw = 0.0; yaw < M_PI - 1e-12; yaw += cfg.yaw_step) {
    const Vec3 closing{std::cos(yaw), std::sin(yaw), 0.0};
    yaw_frames.push_back(Mat3::from_columns(approach, closing, approach.cross(closing)));
  }

  const SpatialIndex index(cloud);
  const Aabb inside_box = closing_volume(gripper, cfg.fixed_width);
  const double reach = std::sqrt(std::pow(gripper.finger_depth, 2) +
                                 std::pow(cfg.fixed_width / 2.0, 2) +
                                 std::pow(gripper.finger_height / 2.0, 2));

  std::vector<GraspPose> out;
  for (const auto& [ix, iy, iz] : cells) {
    const Vec3 position{double(ix) * cfg.xy_step, double(iy) * cfg.xy_step,
                        double(iz) * cfg.z_step};
    const auto local = index.radius_search(position, reach + 1e-9);
    for (const Mat3& rotation : yaw_frames) {
      const Mat3 rt = rotation.transposed();
      size_t inside = 0;
      for (uint32_t id : local)
        if (inside_box.contains_open(rt * (cloud.points[id] - position))) ++inside;
      if (inside < cfg.min_inside_points) continue;

      GraspPose pose;
      pose.position = position;
      pose.rotation = rotation;
      pose.width = cfg.fixed_width;
      pose.source = GraspSource::heuristic4dof;
      out.push_back(pose);
    }
  }
  return out;
}

}  // namespace gtg
