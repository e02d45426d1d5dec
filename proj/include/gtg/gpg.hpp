#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gtg/gripper.hpp"
#include "gtg/point_cloud.hpp"
#include "gtg/spatial_index.hpp"

namespace gtg {

struct GpgConfig {
  size_t n_samples = 200;          // surface seed points
  double frame_radius = 0.01;      // Darboux neighborhood (m)
  size_t n_rotations = 8;          // orientations per seed
  double advance_step = 0.0025;    // m
  double rotation_axis_span = M_PI;
  size_t min_inside_points = 5;

  void validate() const;
};

// Local surface frame at a seed point: columns are (approach = -normal,
// curvature direction, their cross product). Returns nullopt when fewer than
// 3 valid-normal neighbors exist or the curvature direction degenerates.
// A near-isotropic normal spread (eigenvalue gap < 1e-9) falls back to the
// projection of global +x (or +y when +x is parallel to the approach).
std::optional<Mat3> darboux_frame(const PointCloud& cloud, const SpatialIndex& index,
                                  uint32_t seed_id, double radius);

// GPG-style 7-DoF candidate sweep: sample seeds, build Darboux frames, yaw
// the hand about the approach axis, advance until just before body collision,
// keep poses that enclose at least min_inside_points points. Deterministic
// for a fixed rng seed; seeds are processed in parallel but merged in seed
// order, so results are independent of worker count.
std::vector<GraspPose> gpg_generate(const PointCloud& cloud,
                                    const GripperGeometry& gripper,
                                    const GpgConfig& cfg, uint64_t rng_seed,
                                    int workers = 0,
                                    GraspSource source = GraspSource::gpg_raw);

}  // namespace gtg
