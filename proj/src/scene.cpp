#include "gtg/scene.hpp"

#include <algorithm>
#include <cmath>

#include "gtg/error.hpp"

namespace gtg {

const char* to_string(PrimitiveType t) {
  switch (t) {
    case PrimitiveType::box: return "box";
    case PrimitiveType::cylinder: return "cylinder";
    case PrimitiveType::sphere: return "sphere";
  }
  return "box";
}

PrimitiveType primitive_type_from_string(const std::string& s) {
  if (s == "box") return PrimitiveType::box;
  if (s == "cylinder") return PrimitiveType::cylinder;
  if (s == "sphere") return PrimitiveType::sphere;
  throw DataError("unknown primitive type '" + s + "'");
}

namespace {

struct LocalHit {
  double t;
  Vec3 normal;  // local frame
};

std::optional<LocalHit> ray_sphere(const Vec3& o, const Vec3& d, double r) {
  const double b = o.dot(d);
  const double c = o.squared_norm() - r * r;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  double t = -b - s;
  if (t < 1e-12) t = -b + s;
  if (t < 1e-12) return std::nullopt;
  const Vec3 p = o + d * t;
  return LocalHit{t, p.normalized()};
}

std::optional<LocalHit> ray_box(const Vec3& o, const Vec3& d, const Vec3& half) {
  double t_enter = -1e300, t_exit = 1e300;
  int enter_axis = -1;
  double enter_sign = 1.0;
  for (int a = 0; a < 3; ++a) {
    if (std::abs(d[a]) < 1e-15) {
      if (std::abs(o[a]) > half[a]) return std::nullopt;
      continue;
    }
    double t0 = (-half[a] - o[a]) / d[a];
    double t1 = (half[a] - o[a]) / d[a];
    double sign = -1.0;
    if (t0 > t1) {
      std::swap(t0, t1);
      sign = 1.0;
    }
    if (t0 > t_enter) {
      t_enter = t0;
      enter_axis = a;
      enter_sign = sign;
    }
    t_exit = std::min(t_exit, t1);
    if (t_enter > t_exit) return std::nullopt;
  }
  if (enter_axis < 0 || t_enter < 1e-12) return std::nullopt;  // origin inside
  Vec3 n{};
  n[enter_axis] = enter_sign;
  return LocalHit{t_enter, n};
}

std::optional<LocalHit> ray_cylinder(const Vec3& o, const Vec3& d, double r,
                                     double h) {
  const double hh = h / 2.0;
  std::optional<LocalHit> best;
  auto consider = [&](double t, const Vec3& n) {
    if (t < 1e-12) return;
    if (!best || t < best->t) best = LocalHit{t, n};
  };

  // Side surface.
  const double a = d.x * d.x + d.y * d.y;
  if (a > 1e-15) {
    const double b = o.x * d.x + o.y * d.y;
    const double c = o.x * o.x + o.y * o.y - r * r;
    const double disc = b * b - a * c;
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      for (double t : {(-b - s) / a, (-b + s) / a}) {
        const Vec3 p = o + d * t;
        if (std::abs(p.z) <= hh)
          consider(t, Vec3{p.x, p.y, 0.0}.normalized());
      }
    }
  }
  // Caps.
  if (std::abs(d.z) > 1e-15) {
    for (double cap : {hh, -hh}) {
      const double t = (cap - o.z) / d.z;
      const Vec3 p = o + d * t;
      if (p.x * p.x + p.y * p.y <= r * r)
        consider(t, Vec3{0.0, 0.0, cap > 0 ? 1.0 : -1.0});
    }
  }
  return best;
}

double sdf_box(const Vec3& p, const Vec3& half) {
  const Vec3 q{std::abs(p.x) - half.x, std::abs(p.y) - half.y, std::abs(p.z) - half.z};
  const Vec3 outside{std::max(q.x, 0.0), std::max(q.y, 0.0), std::max(q.z, 0.0)};
  return outside.norm() + std::min(std::max({q.x, q.y, q.z}), 0.0);
}

double sdf_cylinder(const Vec3& p, double r, double h) {
  const double dr = std::sqrt(p.x * p.x + p.y * p.y) - r;
  const double dz = std::abs(p.z) - h / 2.0;
  const double ox = std::max(dr, 0.0), oz = std::max(dz, 0.0);
  return std::sqrt(ox * ox + oz * oz) + std::min(std::max(dr, dz), 0.0);
}

}  // namespace

std::optional<RayHit> SceneModel::raycast(const Vec3& origin, const Vec3& dir,
                                          bool include_plane,
                                          double plane_half_extent) const {
  const Vec3 d = dir.normalized();
  std::optional<RayHit> best;
  auto consider = [&](double t, const Vec3& point, const Vec3& normal, int id) {
    if (!best || t < best->t) best = RayHit{t, point, normal, id};
  };

  for (size_t i = 0; i < objects.size(); ++i) {
    const Primitive& obj = objects[i];
    const RigidTransform inv = obj.pose.inverse();
    const Vec3 lo = inv.apply(origin);
    const Vec3 ld = inv.apply_rotation(d);
    std::optional<LocalHit> hit;
    switch (obj.type) {
      case PrimitiveType::box:
        hit = ray_box(lo, ld, obj.extents * 0.5);
        break;
      case PrimitiveType::cylinder:
        hit = ray_cylinder(lo, ld, obj.extents.x, obj.extents.z);
        break;
      case PrimitiveType::sphere:
        hit = ray_sphere(lo, ld, obj.extents.x);
        break;
    }
    if (hit)
      consider(hit->t, origin + d * hit->t, obj.pose.apply_rotation(hit->normal),
               int(i));
  }

  if (include_plane && std::abs(d.z) > 1e-15) {
    const double t = (support_z - origin.z) / d.z;
    if (t > 1e-12) {
      const Vec3 p = origin + d * t;
      if (std::abs(p.x - origin.x) <= plane_half_extent &&
          std::abs(p.y - origin.y) <= plane_half_extent)
        consider(t, p, Vec3{0, 0, 1}, -1);
    }
  }
  return best;
}

double SceneModel::distance_to_object(size_t i, const Vec3& p) const {
  const Primitive& obj = objects.at(i);
  const Vec3 lp = obj.pose.inverse().apply(p);
  switch (obj.type) {
    case PrimitiveType::box: return std::abs(sdf_box(lp, obj.extents * 0.5));
    case PrimitiveType::cylinder:
      return std::abs(sdf_cylinder(lp, obj.extents.x, obj.extents.z));
    case PrimitiveType::sphere: return std::abs(lp.norm() - obj.extents.x);
  }
  return 0.0;
}

namespace {

void sample_box(const Primitive& obj, double s, PointCloud& out) {
  const Vec3 half = obj.extents * 0.5;
  auto face = [&](int fixed_axis, double sign) {
    const int a1 = (fixed_axis + 1) % 3, a2 = (fixed_axis + 2) % 3;
    const size_t n1 = size_t(std::ceil(obj.extents[a1] / s)) + 1;
    const size_t n2 = size_t(std::ceil(obj.extents[a2] / s)) + 1;
    for (size_t i = 0; i < n1; ++i)
      for (size_t j = 0; j < n2; ++j) {
        Vec3 p;
        p[fixed_axis] = sign * half[fixed_axis];
        p[a1] = -half[a1] + obj.extents[a1] * double(i) / double(n1 - 1);
        p[a2] = -half[a2] + obj.extents[a2] * double(j) / double(n2 - 1);
        out.points.push_back(obj.pose.apply(p));
      }
  };
  for (int a = 0; a < 3; ++a) {
    face(a, 1.0);
    face(a, -1.0);
  }
}

void sample_cylinder(const Primitive& obj, double s, PointCloud& out) {
  const double r = obj.extents.x, h = obj.extents.z;
  const size_t n_ang = std::max<size_t>(8, size_t(std::ceil(2.0 * M_PI * r / s)));
  const size_t n_z = size_t(std::ceil(h / s)) + 1;
  for (size_t iz = 0; iz < n_z; ++iz) {
    const double z = -h / 2.0 + h * double(iz) / double(n_z - 1);
    for (size_t ia = 0; ia < n_ang; ++ia) {
      const double ang = 2.0 * M_PI * double(ia) / double(n_ang);
      out.points.push_back(
          obj.pose.apply({r * std::cos(ang), r * std::sin(ang), z}));
    }
  }
  for (double cap : {h / 2.0, -h / 2.0}) {
    for (double rho = 0.0; rho < r; rho += s) {
      const size_t n = std::max<size_t>(1, size_t(std::ceil(2.0 * M_PI * rho / s)));
      for (size_t ia = 0; ia < n; ++ia) {
        const double ang = 2.0 * M_PI * double(ia) / double(n);
        out.points.push_back(
            obj.pose.apply({rho * std::cos(ang), rho * std::sin(ang), cap}));
      }
    }
  }
}

void sample_sphere(const Primitive& obj, double s, PointCloud& out) {
  const double r = obj.extents.x;
  const size_t n_lat = std::max<size_t>(4, size_t(std::ceil(M_PI * r / s)) + 1);
  for (size_t il = 0; il < n_lat; ++il) {
    const double theta = M_PI * double(il) / double(n_lat - 1);
    const double ring_r = r * std::sin(theta);
    const size_t n = std::max<size_t>(1, size_t(std::ceil(2.0 * M_PI * ring_r / s)));
    for (size_t ia = 0; ia < n; ++ia) {
      const double ang = 2.0 * M_PI * double(ia) / double(n);
      out.points.push_back(obj.pose.apply(
          {ring_r * std::cos(ang), ring_r * std::sin(ang), r * std::cos(theta)}));
    }
  }
}

}  // namespace

PointCloud SceneModel::sample_surfaces(double spacing) const {
  if (spacing <= 0.0) throw ConfigError("surface sampling spacing must be positive");
  PointCloud out;
  out.frame_id = "world";
  for (const Primitive& obj : objects) {
    switch (obj.type) {
      case PrimitiveType::box: sample_box(obj, spacing, out); break;
      case PrimitiveType::cylinder: sample_cylinder(obj, spacing, out); break;
      case PrimitiveType::sphere: sample_sphere(obj, spacing, out); break;
    }
  }
  return out;
}

nlohmann::json SceneModel::to_json() const {
  nlohmann::json j;
  j["support_z"] = support_z;
  j["objects"] = nlohmann::json::array();
  for (const Primitive& obj : objects) {
    nlohmann::json o;
    o["type"] = to_string(obj.type);
    o["extents"] = {obj.extents.x, obj.extents.y, obj.extents.z};
    o["position"] = {obj.pose.translation.x, obj.pose.translation.y,
                     obj.pose.translation.z};
    o["rotation"] = obj.pose.rotation.m;
    j["objects"].push_back(o);
  }
  return j;
}

SceneModel SceneModel::from_json(const nlohmann::json& j) {
  SceneModel scene;
  scene.support_z = j.at("support_z").get<double>();
  for (const auto& o : j.at("objects")) {
    Primitive obj;
    obj.type = primitive_type_from_string(o.at("type").get<std::string>());
    const auto& e = o.at("extents");
    obj.extents = {e[0].get<double>(), e[1].get<double>(), e[2].get<double>()};
    const auto& p = o.at("position");
    obj.pose.translation = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
    const auto& r = o.at("rotation");
    if (r.size() != 9) throw DataError("object rotation must have 9 entries");
    for (size_t i = 0; i < 9; ++i) obj.pose.rotation.m[i] = r[i].get<double>();
    scene.objects.push_back(obj);
  }
  return scene;
}

}  // namespace gtg
