#include "gtg/quality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gtg/error.hpp"

namespace gtg {

double min_friction(const Vec3& c1, const Vec3& n1, const Vec3& c2, const Vec3& n2) {
  const Vec3 diff = c2 - c1;
  const double len = diff.norm();
  if (len < 1e-12) throw DataError("min_friction: coincident contacts");
  const Vec3 u = diff / len;

  auto tan_angle = [](const Vec3& normal, const Vec3& toward) {
    const Vec3 n = normal.normalized();
    const double cos_a = n.dot(toward);
    if (cos_a <= 0.0) return std::numeric_limits<double>::infinity();
    const double sin_a = n.cross(toward).norm();
    return sin_a / cos_a;
  };
  return std::max(tan_angle(n1, -u), tan_angle(n2, u));
}

bool evaluate_at_mu(const GraspLabel& label, double mu) {
  return !label.collision && label.mu_required && *label.mu_required <= mu;
}

QualityOracle::QualityOracle(SceneModel scene, GripperGeometry gripper,
                             LabelConfig cfg)
    : scene_(std::move(scene)), gripper_(gripper), cfg_(cfg) {
  gripper_.validate();
  sampling_ = scene_.sample_surfaces(cfg_.surface_spacing);
  index_ = std::make_unique<SpatialIndex>(sampling_);
  body_reach_ = std::sqrt(
      std::pow(gripper_.finger_depth + gripper_.base_depth, 2) +
      std::pow(gripper_.max_aperture / 2.0 + gripper_.finger_thickness, 2) +
      std::pow(gripper_.finger_height / 2.0, 2));
}

std::optional<std::pair<Contact, Contact>> QualityOracle::find_contacts(
    const GraspPose& pose) const {
  // Sweep each finger's inner face along the closing axis and keep the first
  // surface hit. Rays start on the face rectangle (x in [-finger_depth, 0],
  // z in [-h/2, h/2]) and may travel the full aperture.
  const double fd = gripper_.finger_depth;
  const double fh = gripper_.finger_height;
  const double w = pose.width;
  const size_t nx = std::max<size_t>(2, size_t(std::ceil(fd / cfg_.contact_grid)) + 1);
  const size_t nz = std::max<size_t>(2, size_t(std::ceil(fh / cfg_.contact_grid)) + 1);

  auto sweep = [&](double face_y, double dir_sign) -> std::optional<Contact> {
    const Vec3 dir_world = pose.rotation * Vec3{0.0, dir_sign, 0.0};
    std::optional<RayHit> first;
    for (size_t ix = 0; ix < nx; ++ix) {
      const double x = -fd + fd * double(ix) / double(nx - 1);
      for (size_t iz = 0; iz < nz; ++iz) {
        const double z = -fh / 2.0 + fh * double(iz) / double(nz - 1);
        const Vec3 origin = pose.rotation * Vec3{x, face_y, z} + pose.position;
        const auto hit = scene_.raycast(origin, dir_world, false, 0.0);
        if (!hit || hit->t > w) continue;
        if (!first || hit->t < first->t) first = hit;
      }
    }
    if (!first) return std::nullopt;
    return Contact{first->point, first->normal};
  };

  const auto c1 = sweep(w / 2.0, -1.0);
  const auto c2 = sweep(-w / 2.0, 1.0);
  if (!c1 || !c2) return std::nullopt;
  return std::make_pair(*c1, *c2);
}

bool QualityOracle::collides(const GraspPose& pose) const {
  const auto boxes = hand_body_boxes(gripper_, pose.width);
  const Mat3 rt = pose.rotation.transposed();

  // Hand center in world: the body boxes straddle the origin along x.
  const Vec3 body_center =
      pose.rotation * Vec3{-(gripper_.finger_depth + gripper_.base_depth) / 2.0, 0, 0} +
      pose.position;
  for (uint32_t id : index_->radius_search(body_center, body_reach_ + 1e-6)) {
    const Vec3 q = rt * (sampling_.points[id] - pose.position);
    for (const Aabb& box : boxes)
      if (box.distance(q) <= 0.0) return true;
  }

  // Support-plane intersection: any body-box corner strictly below the plane.
  for (const Aabb& box : boxes) {
    for (int corner = 0; corner < 8; ++corner) {
      const Vec3 local{corner & 1 ? box.max.x : box.min.x,
                       corner & 2 ? box.max.y : box.min.y,
                       corner & 4 ? box.max.z : box.min.z};
      if ((pose.rotation * local + pose.position).z < scene_.support_z) return true;
    }
  }
  return false;
}

GraspLabel QualityOracle::label(const GraspPose& pose) const {
  GraspLabel out;
  if (collides(pose)) {
    out.collision = true;
    out.score = -1.0;
    return out;
  }

  out.contacts = find_contacts(pose);
  if (out.contacts) {
    const auto& [c1, c2] = *out.contacts;
    out.mu_required = min_friction(c1.point, c1.normal, c2.point, c2.normal);
  }

  if (!out.mu_required || *out.mu_required > cfg_.mu_threshold) {
    out.score = -0.5;
    return out;
  }

  // Quantize UP to the mu grid {0.1, 0.2, ..., threshold}; the linear map
  // anchors 1.0 at mu = 0.1 and 0.0 at mu = threshold.
  const double q = cfg_.mu_quantum;
  double mu_q = std::max(q, std::ceil(*out.mu_required / q - 1e-9) * q);
  mu_q = std::min(mu_q, cfg_.mu_threshold);
  out.score = (cfg_.mu_threshold - mu_q) / (cfg_.mu_threshold - q);
  return out;
}

int QualityOracle::nearest_object(const Vec3& p) const {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < scene_.objects.size(); ++i) {
    const double d = scene_.distance_to_object(i, p);
    if (d < best_d) {
      best_d = d;
      best = int(i);
    }
  }
  return best;
}

}  // namespace gtg
