#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gtg/error.hpp"
#include "gtg/gripper.hpp"
#include "gtg/rng.hpp"

using namespace gtg;

namespace {

Mat3 random_rotation(Rng& rng) {
  const Vec3 axis = Vec3{rng.normal(), rng.normal(), rng.normal()}.normalized();
  return Mat3::axis_angle(axis, rng.uniform(0.0, M_PI));
}

GraspPose random_pose(Rng& rng, const GripperGeometry& g) {
  GraspPose p;
  p.position = {rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
  p.rotation = random_rotation(rng);
  p.width = rng.uniform(0.02, g.max_aperture);
  return p;
}

PointCloud random_cloud(Rng& rng, size_t n, double scale) {
  PointCloud c;
  for (size_t i = 0; i < n; ++i)
    c.points.push_back({rng.uniform(-scale, scale), rng.uniform(-scale, scale),
                        rng.uniform(-scale, scale)});
  return c;
}

// Quaternion from rotation matrix, for the rotation-distance oracle.
std::array<double, 4> mat_to_quat(const Mat3& r) {
  std::array<double, 4> q{};  // w x y z
  const double tr = r.trace();
  if (tr > 0) {
    double s = std::sqrt(tr + 1.0) * 2;
    q = {0.25 * s, (r(2, 1) - r(1, 2)) / s, (r(0, 2) - r(2, 0)) / s,
         (r(1, 0) - r(0, 1)) / s};
  } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
    double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2;
    q = {(r(2, 1) - r(1, 2)) / s, 0.25 * s, (r(0, 1) + r(1, 0)) / s,
         (r(0, 2) + r(2, 0)) / s};
  } else if (r(1, 1) > r(2, 2)) {
    double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2;
    q = {(r(0, 2) - r(2, 0)) / s, (r(0, 1) + r(1, 0)) / s, 0.25 * s,
         (r(1, 2) + r(2, 1)) / s};
  } else {
    double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2;
    q = {(r(1, 0) - r(0, 1)) / s, (r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s,
         0.25 * s};
  }
  return q;
}

}  // namespace

TEST_CASE("identity pose leaves the cloud unchanged") {
  Rng rng(1);
  const PointCloud c = random_cloud(rng, 20, 0.2);
  GraspPose pose;
  pose.width = 0.05;
  const PointCloud out = to_gripper_frame(pose, c);
  for (size_t i = 0; i < c.size(); ++i)
    CHECK((out.points[i] - c.points[i]).norm() < 1e-15);
}

TEST_CASE("pure translation maps t to the origin") {
  GraspPose pose;
  pose.position = {0.1, -0.2, 0.3};
  pose.width = 0.05;
  PointCloud c;
  c.points = {pose.position};
  const PointCloud out = to_gripper_frame(pose, c);
  CHECK(out.points[0].norm() < 1e-15);
}

TEST_CASE("gripper-frame round trip and isometry") {
  Rng rng(2);
  GripperGeometry g;
  for (int trial = 0; trial < 20; ++trial) {
    const GraspPose pose = random_pose(rng, g);
    const PointCloud c = random_cloud(rng, 30, 0.3);
    const PointCloud local = to_gripper_frame(pose, c);

    for (size_t i = 0; i < c.size(); ++i) {
      const Vec3 back = pose.rotation * local.points[i] + pose.position;
      CHECK((back - c.points[i]).norm() < 1e-9);
    }
    for (size_t i = 0; i + 1 < c.size(); ++i) {
      const double d_world = (c.points[i] - c.points[i + 1]).norm();
      const double d_local = (local.points[i] - local.points[i + 1]).norm();
      CHECK(std::abs(d_world - d_local) < 1e-9);
    }
  }
}

TEST_CASE("closing volume extents follow the geometry") {
  GripperGeometry g;
  const Aabb box = closing_volume(g, 0.10);
  const Vec3 ext = box.extents();
  CHECK(ext.x == doctest::Approx(0.04));
  CHECK(ext.y == doctest::Approx(0.10));
  CHECK(ext.z == doctest::Approx(0.02));
  CHECK(box.contains_open(box.center()));
  // 1 um outside a face is outside
  Vec3 outside = box.center();
  outside.x = box.max.x + 1e-6;
  CHECK_FALSE(box.contains_open(outside));
  // boundary points are outside (open box)
  Vec3 boundary = box.center();
  boundary.x = box.max.x;
  CHECK_FALSE(box.contains_open(boundary));
}

TEST_CASE("body_collides basics") {
  GripperGeometry g;
  GraspPose pose;
  pose.width = g.max_aperture;

  CHECK_FALSE(body_collides(g, pose, PointCloud{}, 0.0));

  const auto boxes = hand_body_boxes(g, pose.width);
  PointCloud inside_finger;
  inside_finger.points = {boxes[0].center()};
  CHECK(body_collides(g, pose, inside_finger, 0.0));
}

TEST_CASE("body_collides matches the per-point box oracle on random points") {
  Rng rng(3);
  GripperGeometry g;
  for (int trial = 0; trial < 10; ++trial) {
    const GraspPose pose = random_pose(rng, g);
    const auto boxes = hand_body_boxes(g, pose.width);
    const PointCloud c = random_cloud(rng, 1000, 0.12);
    const double clearance = rng.uniform(0.0, 0.01);

    bool expected = false;
    for (const Vec3& p : c.points) {
      const Vec3 q = to_gripper_frame(pose, p);
      for (const auto& b : boxes)
        if (b.distance(q) <= clearance) expected = true;
    }
    CHECK(body_collides(g, pose, c, clearance) == expected);
  }
}

TEST_CASE("body_collides is monotone in clearance") {
  Rng rng(4);
  GripperGeometry g;
  for (int trial = 0; trial < 50; ++trial) {
    const GraspPose pose = random_pose(rng, g);
    const PointCloud c = random_cloud(rng, 50, 0.15);
    const double c1 = rng.uniform(0.0, 0.02);
    const double c2 = c1 + rng.uniform(0.0, 0.02);
    if (body_collides(g, pose, c, c1)) CHECK(body_collides(g, pose, c, c2));
  }
}

TEST_CASE("extract_regions splits points like the per-point oracle") {
  Rng rng(5);
  GripperGeometry g;
  for (int trial = 0; trial < 10; ++trial) {
    const GraspPose pose = random_pose(rng, g);
    const PointCloud c = random_cloud(rng, 800, 0.15);
    const double scale = 2.0;
    const RegionPair regions = extract_regions(g, pose, c, scale);

    const Aabb inner = closing_volume(g, pose.width);
    const Aabb outer = inner.scaled_about_center(scale);
    const auto body = hand_body_boxes(g, pose.width);
    size_t n_inside = 0, n_outside = 0;
    for (const Vec3& p : c.points) {
      const Vec3 q = to_gripper_frame(pose, p);
      if (inner.contains_open(q)) {
        ++n_inside;
      } else if (outer.contains_open(q) || body[0].contains_open(q) ||
                 body[1].contains_open(q) || body[2].contains_open(q)) {
        ++n_outside;
      }
    }
    CHECK(regions.inside.size() == n_inside);
    CHECK(regions.outside.size() == n_outside);

    for (const Vec3& q : regions.inside.points) CHECK(inner.contains_open(q));
    for (const Vec3& q : regions.outside.points) CHECK_FALSE(inner.contains_open(q));
  }
}

TEST_CASE("extract_regions: all points beyond the context box leave both empty") {
  GripperGeometry g;
  GraspPose pose;
  pose.width = 0.08;
  PointCloud far;
  far.points = {{1, 1, 1}, {-2, 0, 0}};
  const RegionPair regions = extract_regions(g, pose, far, 2.0);
  CHECK(regions.inside.empty());
  CHECK(regions.outside.empty());
}

TEST_CASE("extract_regions: single point between fingertips is inside") {
  GripperGeometry g;
  GraspPose pose;
  pose.width = 0.08;
  PointCloud c;
  c.points = {{-0.01, 0.0, 0.0}};  // within the closing box
  const RegionPair regions = extract_regions(g, pose, c, 2.0);
  CHECK(regions.inside.size() == 1);
  CHECK(regions.outside.empty());
}

TEST_CASE("pose_distance basics and axis-angle identity") {
  GripperGeometry g;
  Rng rng(6);
  const GraspPose a = random_pose(rng, g);
  auto [dt, da] = pose_distance(a, a);
  CHECK(dt == 0.0);
  CHECK(da == doctest::Approx(0.0).epsilon(1e-9));

  GraspPose b = a;
  b.rotation = a.rotation * Mat3::axis_angle({0, 1, 0}, M_PI / 6.0);
  auto [dt2, da2] = pose_distance(a, b);
  CHECK(dt2 == 0.0);
  CHECK(da2 == doctest::Approx(M_PI / 6.0).epsilon(1e-9));
}

TEST_CASE("pose_distance angle matches the quaternion-dot oracle") {
  Rng rng(7);
  GripperGeometry g;
  for (int trial = 0; trial < 100; ++trial) {
    const GraspPose a = random_pose(rng, g);
    const GraspPose b = random_pose(rng, g);
    const auto [dt, da] = pose_distance(a, b);

    const auto qa = mat_to_quat(a.rotation);
    const auto qb = mat_to_quat(b.rotation);
    double dot = 0.0;
    for (int i = 0; i < 4; ++i) dot += qa[i] * qb[i];
    const double expected = 2.0 * std::acos(std::min(1.0, std::abs(dot)));
    CHECK(da == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("pose_distance is symmetric and satisfies the angle triangle inequality") {
  Rng rng(8);
  GripperGeometry g;
  for (int trial = 0; trial < 100; ++trial) {
    const GraspPose a = random_pose(rng, g);
    const GraspPose b = random_pose(rng, g);
    const GraspPose c = random_pose(rng, g);
    const auto [tab, aab] = pose_distance(a, b);
    const auto [tba, aba] = pose_distance(b, a);
    CHECK(tab == doctest::Approx(tba).epsilon(1e-12));
    CHECK(aab == doctest::Approx(aba).epsilon(1e-9));
    const auto [tac, aac] = pose_distance(a, c);
    const auto [tcb, acb] = pose_distance(c, b);
    CHECK(aab <= aac + acb + 1e-9);
  }
}

TEST_CASE("pose validation rejects broken rotations and widths") {
  GripperGeometry g;
  GraspPose pose;
  pose.width = 0.05;
  CHECK_NOTHROW(pose.validate(g));
  pose.width = 0.2;
  CHECK_THROWS_AS(pose.validate(g), DataError);
  pose.width = 0.05;
  pose.rotation.m[0] = 2.0;
  CHECK_THROWS_AS(pose.validate(g), DataError);
}
