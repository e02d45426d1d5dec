#include "gtg/scene_render.hpp"

#include <cmath>
#include <fstream>

#include "gtg/error.hpp"
#include "gtg/rng.hpp"

namespace gtg {

VirtualCamera VirtualCamera::looking_at(const Vec3& eye, const Vec3& target) {
  VirtualCamera cam;
  const Vec3 forward = (target - eye).normalized();
  Vec3 up{0, 0, 1};
  Vec3 right = forward.cross(up);
  if (right.norm() < 1e-9) right = Vec3{1, 0, 0};  // looking straight down
  right = right.normalized();
  const Vec3 down = forward.cross(right).normalized();
  cam.pose.rotation = Mat3::from_columns(right, down, forward);
  cam.pose.translation = eye;
  return cam;
}

nlohmann::json SceneRecord::to_json() const {
  nlohmann::json j = scene.to_json();
  j["id"] = id;
  nlohmann::json c;
  c["width"] = camera.width;
  c["height"] = camera.height;
  c["fx"] = camera.intrinsics.fx;
  c["fy"] = camera.intrinsics.fy;
  c["cx"] = camera.intrinsics.cx;
  c["cy"] = camera.intrinsics.cy;
  c["position"] = {camera.pose.translation.x, camera.pose.translation.y,
                   camera.pose.translation.z};
  c["rotation"] = camera.pose.rotation.m;
  c["noise_sigma"] = camera.noise_sigma;
  c["plane_half_extent"] = camera.plane_half_extent;
  j["camera"] = c;
  return j;
}

SceneRecord SceneRecord::from_json(const nlohmann::json& j) {
  SceneRecord rec;
  rec.scene = SceneModel::from_json(j);
  rec.id = j.at("id").get<int>();
  const auto& c = j.at("camera");
  rec.camera.width = c.at("width").get<size_t>();
  rec.camera.height = c.at("height").get<size_t>();
  rec.camera.intrinsics = {c.at("fx").get<double>(), c.at("fy").get<double>(),
                           c.at("cx").get<double>(), c.at("cy").get<double>()};
  const auto& p = c.at("position");
  rec.camera.pose.translation = {p[0].get<double>(), p[1].get<double>(),
                                 p[2].get<double>()};
  const auto& r = c.at("rotation");
  for (size_t i = 0; i < 9; ++i) rec.camera.pose.rotation.m[i] = r[i].get<double>();
  rec.camera.noise_sigma = c.at("noise_sigma").get<double>();
  rec.camera.plane_half_extent = c.at("plane_half_extent").get<double>();
  return rec;
}

void SceneRecord::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << to_json().dump(2) << "\n";
  if (!out) throw DataError("write failed for '" + path + "'");
}

SceneRecord SceneRecord::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw DataError(path + ": invalid JSON");
  return from_json(j);
}

DepthImage render_depth(const SceneModel& scene, const VirtualCamera& camera,
                        uint64_t noise_seed) {
  DepthImage img;
  img.width = camera.width;
  img.height = camera.height;
  img.intrinsics = camera.intrinsics;
  img.depths.assign(camera.width * camera.height, 0.0f);

  Rng noise(noise_seed);
  const Mat3& r = camera.pose.rotation;
  for (size_t v = 0; v < camera.height; ++v) {
    for (size_t u = 0; u < camera.width; ++u) {
      const Vec3 dir_cam{(double(u) - camera.intrinsics.cx) / camera.intrinsics.fx,
                         (double(v) - camera.intrinsics.cy) / camera.intrinsics.fy,
                         1.0};
      const Vec3 dir = r * dir_cam;
      const auto hit = scene.raycast(camera.pose.translation, dir, true,
                                     camera.plane_half_extent);
      // Noise is drawn per pixel regardless of hit so the stream layout is
      // stable under scene edits.
      const double n = camera.noise_sigma > 0.0 ? noise.normal(0.0, camera.noise_sigma)
                                                : 0.0;
      if (!hit) continue;
      const Vec3 cam_point =
          camera.pose.rotation.transposed() * (hit->point - camera.pose.translation);
      const double depth = cam_point.z + n;
      if (depth > 0.0) img.at(u, v) = float(depth);
    }
  }
  return img;
}

SceneRecord synthesize_scene(int scene_id, uint64_t seed) {
  Rng rng(seed);
  SceneRecord rec;
  rec.id = scene_id;
  rec.scene.support_z = 0.0;

  const size_t n_objects = 2 + rng.next_below(3);  // 2..4
  std::vector<Vec3> placed_centers;
  std::vector<double> placed_radii;
  for (size_t i = 0; i < n_objects; ++i) {
    Primitive obj;
    const uint64_t kind = rng.next_below(3);
    double footprint = 0.0;
    if (kind == 0) {
      obj.type = PrimitiveType::box;
      obj.extents = {rng.uniform(0.025, 0.06), rng.uniform(0.025, 0.06),
                     rng.uniform(0.03, 0.09)};
      footprint = std::hypot(obj.extents.x, obj.extents.y) / 2.0;
      obj.pose.translation.z = obj.extents.z / 2.0;
    } else if (kind == 1) {
      obj.type = PrimitiveType::cylinder;
      obj.extents = {rng.uniform(0.012, 0.035), 0.0, rng.uniform(0.04, 0.10)};
      footprint = obj.extents.x;
      obj.pose.translation.z = obj.extents.z / 2.0;
    } else {
      obj.type = PrimitiveType::sphere;
      obj.extents = {rng.uniform(0.015, 0.032), 0.0, 0.0};
      footprint = obj.extents.x;
      obj.pose.translation.z = obj.extents.x;
    }
    obj.pose.rotation = Mat3::axis_angle({0, 0, 1}, rng.uniform(0.0, 2.0 * M_PI));

    // Rejection placement inside the workspace disc, clear of prior objects.
    bool placed = false;
    for (int attempt = 0; attempt < 60 && !placed; ++attempt) {
      const double ang = rng.uniform(0.0, 2.0 * M_PI);
      const double rad = rng.uniform(0.0, 0.11);
      const Vec3 center{rad * std::cos(ang), rad * std::sin(ang),
                        obj.pose.translation.z};
      bool clear = true;
      for (size_t k = 0; k < placed_centers.size(); ++k) {
        const double dx = center.x - placed_centers[k].x;
        const double dy = center.y - placed_centers[k].y;
        if (std::hypot(dx, dy) < footprint + placed_radii[k] + 0.02) clear = false;
      }
      if (clear) {
        obj.pose.translation.x = center.x;
        obj.pose.translation.y = center.y;
        placed_centers.push_back(center);
        placed_radii.push_back(footprint);
        placed = true;
      }
    }
    if (placed) rec.scene.objects.push_back(obj);
  }

  const double azimuth = rng.uniform(0.0, 2.0 * M_PI);
  const double elevation = rng.uniform(0.85, 1.25);  // rad above horizon
  const double range = rng.uniform(0.45, 0.60);
  const Vec3 eye{range * std::cos(azimuth) * std::cos(elevation),
                 range * std::sin(azimuth) * std::cos(elevation),
                 range * std::sin(elevation)};
  rec.camera = VirtualCamera::looking_at(eye, {0, 0, 0.02});
  rec.camera.noise_sigma = 0.0005;
  return rec;
}

}  // namespace gtg
