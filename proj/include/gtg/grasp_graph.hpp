#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gtg/gripper.hpp"

namespace gtg {

// Per-candidate graph fed to the scorer. Nodes are gripper-frame points with
// a 5-wide feature row (x, y, z, inside-one-hot, outside-one-hot); inside
// nodes come first. Edges are directed src->dst with dst aggregating over
// incoming sources; every node has out-degree min(k, |V|-1).
struct GraspGraph {
  uint32_t n_inside = 0;
  uint32_t n_outside = 0;
  std::vector<float> node_features;  // |V| x 5 row-major
  std::vector<uint32_t> edge_src;
  std::vector<uint32_t> edge_dst;

  uint32_t n_nodes() const { return n_inside + n_outside; }
  size_t n_edges() const { return edge_src.size(); }

  void validate() const;
};

struct GraphBuildConfig {
  uint32_t max_points_per_region = 70;
  uint32_t knn_k = 5;
  double outside_scale = 2.0;
};

// Region extraction -> per-region FPS -> k-NN over the union. Throws
// DataError when the pose encloses no points (an upstream contract break).
GraspGraph build_graph(const GraspPose& pose, const PointCloud& cloud,
                       const GripperGeometry& gripper, const GraphBuildConfig& cfg,
                       uint64_t rng_seed);

// As build_graph but from pre-extracted gripper-frame regions.
GraspGraph build_graph_from_regions(const PointCloud& inside,
                                    const PointCloud& outside,
                                    const GraphBuildConfig& cfg, uint64_t rng_seed);

// Versioned binary blob: float32 features, uint32 edges. Lossless.
std::vector<uint8_t> serialize_graph(const GraspGraph& graph);
GraspGraph parse_graph(const uint8_t* data, size_t size);

// Dataset container: each graph preceded by a uint32 byte length.
void save_graph_file(const std::vector<GraspGraph>& graphs, const std::string& path);
std::vector<GraspGraph> load_graph_file(const std::string& path);

}  // namespace gtg
