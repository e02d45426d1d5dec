#include "gtg/gpg.hpp"

#include <algorithm>
#include <cmath>

#include "gtg/error.hpp"
#include "gtg/parallel.hpp"
#include "gtg/rng.hpp"

namespace gtg {

void GpgConfig::validate() const {
  if (n_samples < 1) throw ConfigError("gpg.n_samples must be >= 1");
  if (n_rotations < 1) throw ConfigError("gpg.n_rotations must be >= 1");
  if (advance_step <= 0.0) throw ConfigError("gpg.advance_step must be positive");
  if (frame_radius <= 0.0) throw ConfigError("gpg.frame_radius must be positive");
}

std::optional<Mat3> darboux_frame(const PointCloud& cloud, const SpatialIndex& index,
                                  uint32_t seed_id, double radius) {
  if (!cloud.normal_valid(seed_id)) return std::nullopt;

  const auto neighbor_ids = index.radius_search(cloud.points[seed_id], radius);
  Mat3 m;
  m.m.fill(0.0);
  size_t valid = 0;
  for (uint32_t id : neighbor_ids) {
    if (!cloud.normal_valid(id)) continue;
    const Vec3& n = cloud.normals[id];
    m(0, 0) += n.x * n.x;
    m(0, 1) += n.x * n.y;
    m(0, 2) += n.x * n.z;
    m(1, 1) += n.y * n.y;
    m(1, 2) += n.y * n.z;
    m(2, 2) += n.z * n.z;
    ++valid;
  }
  if (valid < 3) return std::nullopt;
  m(1, 0) = m(0, 1);
  m(2, 0) = m(0, 2);
  m(2, 1) = m(1, 2);

  const Vec3 approach = -cloud.normals[seed_id];
  const SymmetricEigen3 eig = symmetric_eigen3(m);

  // Direction of least normal variation = minimum curvature direction. On
  // planar patches both small eigenvalues vanish; resolve with a fixed axis.
  Vec3 curvature = eig.vectors[0];
  if (eig.values[1] - eig.values[0] < 1e-9) {
    curvature = Vec3{1.0, 0.0, 0.0};
    if (std::abs(curvature.dot(approach)) > 1.0 - 1e-6) curvature = {0.0, 1.0, 0.0};
  }

  Vec3 closing = curvature - approach * curvature.dot(approach);
  const double norm = closing.norm();
  if (norm < 1e-6) return std::nullopt;
  closing = closing / norm;
  const Vec3 minor = approach.cross(closing);
  return Mat3::from_columns(approach, closing, minor);
}

namespace {

// Per-seed sweep state: points near the full swept volume, pre-rotated into
// the yawed gripper frame relative to the seed. Advancing the hand by j
// steps just shifts local x, so each step's collision test is a cheap
// point-vs-box pass over the local subset.
struct LocalPoints {
  std::vector<Vec3> pts;
};

std::vector<GraspPose> sweep_seed(const PointCloud& cloud, const SpatialIndex& index,
                                  const GripperGeometry& g, const GpgConfig& cfg,
                                  uint32_t seed_id) {
  std::vector<GraspPose> out;
  const auto frame = darboux_frame(cloud, index, seed_id, cfg.frame_radius);
  if (!frame) return out;

  const Vec3 seed_point = cloud.points[seed_id];
  const double start_standoff = g.finger_depth + 0.01;
  // Cap travel half a step short of the full standoff so a budget-exhausted
  // sweep never parks the fingertip plane bit-exactly on the seed surface.
  const size_t max_steps =
      size_t(std::floor((start_standoff - cfg.advance_step / 2.0) / cfg.advance_step));

  // Everything the hand could touch during the sweep lies within this radius
  // of the seed point.
  const double hand_reach =
      std::sqrt(std::pow(g.finger_depth + g.base_depth, 2) +
                std::pow(g.max_aperture / 2.0 + g.finger_thickness, 2) +
                std::pow(g.finger_height / 2.0, 2));
  const double sweep_radius = hand_reach + start_standoff + cfg.advance_step;
  const auto local_ids = index.radius_search(seed_point, sweep_radius);

  const double width = g.max_aperture;
  const auto body = hand_body_boxes(g, width);
  const Aabb inside_box = closing_volume(g, width);

  for (size_t r = 0; r < cfg.n_rotations; ++r) {
    const double yaw =
        cfg.rotation_axis_span * double(r) / double(cfg.n_rotations);
    const Mat3 yaw_rot = Mat3::axis_angle({1.0, 0.0, 0.0}, yaw);
    const Mat3 rotation = (*frame) * yaw_rot;
    const Mat3 rt = rotation.transposed();
    const Vec3 approach = rotation.col(0);

    // Local coordinates relative to the start pose origin.
    const Vec3 origin0 = seed_point - approach * start_standoff;
    LocalPoints local;
    local.pts.reserve(local_ids.size());
    for (uint32_t id : local_ids) local.pts.push_back(rt * (cloud.points[id] - origin0));

    auto collides_at = [&](double travel) {
      for (const Vec3& p : local.pts) {
        const Vec3 q{p.x - travel, p.y, p.z};
        if (body[0].distance(q) <= 0.0 || body[1].distance(q) <= 0.0 ||
            body[2].distance(q) <= 0.0)
          return true;
      }
      return false;
    };

    if (collides_at(0.0)) continue;  // even the standoff pose collides
    size_t steps = 0;
    while (steps < max_steps &&
           !collides_at(double(steps + 1) * cfg.advance_step))
      ++steps;

    const double travel = double(steps) * cfg.advance_step;
    const double standoff = start_standoff - travel;
    if (standoff > g.finger_depth) continue;  // never reached the surface

    GraspPose pose;
    pose.position = origin0 + approach * travel;
    pose.rotation = rotation;
    pose.width = width;

    // Final acceptance uses the same arithmetic as downstream re-validation
    // (extract_regions / body_collides), so boundary-grazing points cannot
    // flip between generation and independent checks.
    size_t inside = 0;
    bool collides = false;
    for (uint32_t id : local_ids) {
      const Vec3 q = rt * (cloud.points[id] - pose.position);
      if (inside_box.contains_open(q)) ++inside;
      if (body[0].distance(q) <= 0.0 || body[1].distance(q) <= 0.0 ||
          body[2].distance(q) <= 0.0)
        collides = true;
    }
    if (collides || inside < cfg.min_inside_points) continue;
    out.push_back(pose);
  }
  return out;
}

}  // namespace

std::vector<GraspPose> gpg_generate(const PointCloud& cloud,
                                    const GripperGeometry& gripper,
                                    const GpgConfig& cfg, uint64_t rng_seed,
                                    int workers, GraspSource source) {
  cfg.validate();
  gripper.validate();
  if (cloud.empty()) return {};
  if (!cloud.has_normals())
    throw ConfigError("gpg_generate requires a cloud with normals");

  Rng rng(rng_seed);
  std::vector<uint32_t> seeds(cfg.n_samples);
  for (size_t i = 0; i < cfg.n_samples; ++i)
    seeds[i] = uint32_t(rng.next_below(cloud.size()));

  const SpatialIndex index(cloud);
  std::vector<std::vector<GraspPose>> per_seed(seeds.size());
  parallel_for(seeds.size(), workers, [&](size_t i) {
    per_seed[i] = sweep_seed(cloud, index, gripper, cfg, seeds[i]);
  });

  std::vector<GraspPose> out;
  for (auto& batch : per_seed)
    for (GraspPose& pose : batch) {
      pose.source = source;
      out.push_back(pose);
    }
  return out;
}

}  // namespace gtg
