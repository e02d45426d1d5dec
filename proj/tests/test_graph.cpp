#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "gtg/error.hpp"
#include "gtg/grasp_graph.hpp"
#include "gtg/rng.hpp"

using namespace gtg;

namespace {

PointCloud random_region(Rng& rng, size_t n, double scale = 0.03) {
  PointCloud c;
  for (size_t i = 0; i < n; ++i)
    c.points.push_back({rng.uniform(-scale, scale), rng.uniform(-scale, scale),
                        rng.uniform(-scale, scale)});
  return c;
}

GraspGraph random_graph(Rng& rng) {
  const size_t n_in = 1 + rng.next_below(90);
  const size_t n_out = rng.next_below(90);
  GraphBuildConfig cfg;
  return build_graph_from_regions(random_region(rng, n_in),
                                  random_region(rng, n_out), cfg, 0);
}

// Brute-force k-NN edge oracle over the node coordinates.
std::set<std::pair<uint32_t, uint32_t>> knn_edge_oracle(const GraspGraph& g,
                                                        uint32_t k) {
  const uint32_t n = g.n_nodes();
  std::set<std::pair<uint32_t, uint32_t>> edges;
  for (uint32_t a = 0; a < n; ++a) {
    std::vector<std::pair<double, uint32_t>> d;
    for (uint32_t b = 0; b < n; ++b) {
      if (a == b) continue;
      double s = 0;
      for (int j = 0; j < 3; ++j) {
        const double diff = double(g.node_features[a * 5 + size_t(j)]) -
                            double(g.node_features[b * 5 + size_t(j)]);
        s += diff * diff;
      }
      d.push_back({s, b});
    }
    std::sort(d.begin(), d.end());
    for (uint32_t j = 0; j < std::min<uint32_t>(k, uint32_t(d.size())); ++j)
      edges.insert({a, d[j].second});
  }
  return edges;
}

}  // namespace

TEST_CASE("three inside nodes yield a complete directed graph") {
  PointCloud inside;
  inside.points = {{0, 0, 0}, {0.01, 0, 0}, {0, 0.01, 0}};
  GraphBuildConfig cfg;
  const GraspGraph g = build_graph_from_regions(inside, PointCloud{}, cfg, 0);
  g.validate();
  CHECK(g.n_inside == 3);
  CHECK(g.n_outside == 0);
  CHECK(g.n_edges() == 6);  // out-degree min(5, |V|-1) = 2
}

TEST_CASE("oversized regions are capped at 70 nodes each") {
  Rng rng(1);
  GraphBuildConfig cfg;
  const GraspGraph g = build_graph_from_regions(random_region(rng, 200),
                                                random_region(rng, 200), cfg, 0);
  g.validate();
  CHECK(g.n_inside == 70);
  CHECK(g.n_outside == 70);
  CHECK(g.n_nodes() == 140);
}

TEST_CASE("edges match the brute-force k-NN oracle") {
  Rng rng(2);
  for (int trial = 0; trial < 25; ++trial) {
    const GraspGraph g = random_graph(rng);
    g.validate();
    std::set<std::pair<uint32_t, uint32_t>> got;
    for (size_t e = 0; e < g.n_edges(); ++e) got.insert({g.edge_src[e], g.edge_dst[e]});
    CHECK(got == knn_edge_oracle(g, 5));
    const uint32_t expected_degree = std::min<uint32_t>(5, g.n_nodes() - 1);
    CHECK(g.n_edges() == size_t(expected_degree) * g.n_nodes());
  }
}

TEST_CASE("empty inside region is a contract violation") {
  GraphBuildConfig cfg;
  CHECK_THROWS_AS(build_graph_from_regions(PointCloud{}, PointCloud{}, cfg, 0),
                  DataError);
}

TEST_CASE("graph build is invariant under rigid transforms of scene and pose") {
  Rng rng(3);
  GripperGeometry gripper;
  GraphBuildConfig cfg;

  PointCloud cloud = random_region(rng, 400, 0.06);
  GraspPose pose;
  pose.position = {0.01, -0.005, 0.002};
  pose.rotation = Mat3::axis_angle(Vec3{1, 2, 3}.normalized(), 0.8);
  pose.width = 0.08;

  const GraspGraph base = build_graph(pose, cloud, gripper, cfg, 0);

  const Mat3 t_rot = Mat3::axis_angle(Vec3{-2, 1, 0.5}.normalized(), 1.9);
  const Vec3 t_shift{0.3, -0.2, 0.15};
  PointCloud moved = cloud;
  for (auto& p : moved.points) p = t_rot * p + t_shift;
  GraspPose moved_pose = pose;
  moved_pose.position = t_rot * pose.position + t_shift;
  moved_pose.rotation = t_rot * pose.rotation;

  const GraspGraph transformed = build_graph(moved_pose, moved, gripper, cfg, 0);
  REQUIRE(transformed.n_nodes() == base.n_nodes());
  CHECK(transformed.edge_src == base.edge_src);
  CHECK(transformed.edge_dst == base.edge_dst);
  for (size_t i = 0; i < base.node_features.size(); ++i)
    CHECK(std::abs(transformed.node_features[i] - base.node_features[i]) < 1e-6f);
}

TEST_CASE("one-hot labels are exclusive and edges ignore labels") {
  Rng rng(4);
  const PointCloud a = random_region(rng, 60);
  const PointCloud b = random_region(rng, 40);
  GraphBuildConfig cfg;
  const GraspGraph g1 = build_graph_from_regions(a, b, cfg, 0);
  g1.validate();
  size_t inside_sum = 0, outside_sum = 0;
  for (uint32_t i = 0; i < g1.n_nodes(); ++i) {
    inside_sum += size_t(g1.node_features[i * 5 + 3]);
    outside_sum += size_t(g1.node_features[i * 5 + 4]);
    CHECK(g1.node_features[i * 5 + 3] + g1.node_features[i * 5 + 4] == 1.0f);
  }
  CHECK(inside_sum == g1.n_inside);
  CHECK(outside_sum == g1.n_outside);

  // Swapping the region roles relabels nodes but the edge geometry is built
  // from the same coordinates. Compare edge multisets on coordinates.
  const GraspGraph g2 = build_graph_from_regions(b, a, cfg, 0);
  CHECK(g2.n_inside == uint32_t(b.size()));
  CHECK(g1.n_edges() == g2.n_edges());
}

TEST_CASE("serialize/parse round trip") {
  Rng rng(5);
  // empty-edge graph (single node)
  PointCloud single;
  single.points = {{0.001, 0.002, 0.003}};
  GraphBuildConfig cfg;
  const GraspGraph tiny = build_graph_from_regions(single, PointCloud{}, cfg, 0);
  CHECK(tiny.n_edges() == 0);
  const auto blob = serialize_graph(tiny);
  const GraspGraph back = parse_graph(blob.data(), blob.size());
  CHECK(back.node_features == tiny.node_features);
  CHECK(back.edge_src == tiny.edge_src);

  // max-size graph
  const GraspGraph big = build_graph_from_regions(random_region(rng, 300),
                                                  random_region(rng, 300), cfg, 0);
  CHECK(big.n_nodes() == 140);
  const auto blob2 = serialize_graph(big);
  const GraspGraph back2 = parse_graph(blob2.data(), blob2.size());
  CHECK(back2.node_features == big.node_features);
  CHECK(back2.edge_src == big.edge_src);
  CHECK(back2.edge_dst == big.edge_dst);

  // corrupted blob
  auto corrupt = blob2;
  corrupt.resize(corrupt.size() - 3);
  CHECK_THROWS_AS(parse_graph(corrupt.data(), corrupt.size()), DataError);
}

TEST_CASE("re-serialization is byte-stable over many random graphs") {
  Rng rng(6);
  for (int trial = 0; trial < 1000; ++trial) {
    const GraspGraph g = random_graph(rng);
    const auto blob = serialize_graph(g);
    const GraspGraph back = parse_graph(blob.data(), blob.size());
    CHECK(serialize_graph(back) == blob);
  }
}

TEST_CASE("graph file container round trip") {
  Rng rng(7);
  std::vector<GraspGraph> graphs;
  for (int i = 0; i < 12; ++i) graphs.push_back(random_graph(rng));
  const std::string path = "/tmp/gtg_graphs_test.bin";
  save_graph_file(graphs, path);
  const auto back = load_graph_file(path);
  REQUIRE(back.size() == graphs.size());
  for (size_t i = 0; i < graphs.size(); ++i)
    CHECK(back[i].node_features == graphs[i].node_features);
}
