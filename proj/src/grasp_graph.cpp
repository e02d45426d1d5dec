#include "gtg/grasp_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "gtg/cloud_ops.hpp"
#include "gtg/error.hpp"

namespace gtg {

void GraspGraph::validate() const {
  const uint32_t n = n_nodes();
  if (n == 0) throw DataError("graph has no nodes");
  if (node_features.size() != size_t(n) * 5)
    throw DataError("node feature matrix is not |V| x 5");
  if (edge_src.size() != edge_dst.size()) throw DataError("edge list mismatch");
  for (size_t e = 0; e < edge_src.size(); ++e) {
    if (edge_src[e] >= n || edge_dst[e] >= n) throw DataError("edge references invalid node");
    if (edge_src[e] == edge_dst[e]) throw DataError("self-loop edge");
  }
  for (uint32_t i = 0; i < n; ++i) {
    const float in_flag = node_features[size_t(i) * 5 + 3];
    const float out_flag = node_features[size_t(i) * 5 + 4];
    const bool inside = i < n_inside;
    if (in_flag != (inside ? 1.0f : 0.0f) || out_flag != (inside ? 0.0f : 1.0f))
      throw DataError("node one-hot labels inconsistent with region counts");
  }
}

GraspGraph build_graph_from_regions(const PointCloud& inside,
                                    const PointCloud& outside,
                                    const GraphBuildConfig& cfg, uint64_t rng_seed) {
  if (inside.empty())
    throw DataError("build_graph: empty inside region (upstream contract violation)");

  const auto inside_ids =
      farthest_point_sample(inside, cfg.max_points_per_region, rng_seed);
  const auto outside_ids =
      outside.empty() ? std::vector<uint32_t>{}
                      : farthest_point_sample(outside, cfg.max_points_per_region,
                                              rng_seed);

  GraspGraph graph;
  graph.n_inside = uint32_t(inside_ids.size());
  graph.n_outside = uint32_t(outside_ids.size());
  const uint32_t n = graph.n_nodes();

  std::vector<Vec3> coords;
  coords.reserve(n);
  graph.node_features.reserve(size_t(n) * 5);
  for (uint32_t id : inside_ids) {
    const Vec3& p = inside.points[id];
    coords.push_back(p);
    graph.node_features.insert(graph.node_features.end(),
                               {float(p.x), float(p.y), float(p.z), 1.0f, 0.0f});
  }
  for (uint32_t id : outside_ids) {
    const Vec3& p = outside.points[id];
    coords.push_back(p);
    graph.node_features.insert(graph.node_features.end(),
                               {float(p.x), float(p.y), float(p.z), 0.0f, 1.0f});
  }

  // k-NN by Euclidean distance over the union, labels ignored; distance ties
  // break toward the smaller node id. |V| <= 140, so the direct scan is fine.
  const uint32_t k = std::min(cfg.knn_k, n > 0 ? n - 1 : 0);
  std::vector<std::pair<double, uint32_t>> dists(n);
  for (uint32_t a = 0; a < n; ++a) {
    size_t m = 0;
    for (uint32_t b = 0; b < n; ++b) {
      if (b == a) continue;
      dists[m++] = {(coords[a] - coords[b]).squared_norm(), b};
    }
    std::partial_sort(dists.begin(), dists.begin() + k, dists.begin() + ptrdiff_t(m));
    for (uint32_t j = 0; j < k; ++j) {
      graph.edge_src.push_back(a);
      graph.edge_dst.push_back(dists[j].second);
    }
  }
  return graph;
}

GraspGraph build_graph(const GraspPose& pose, const PointCloud& cloud,
                       const GripperGeometry& gripper, const GraphBuildConfig& cfg,
                       uint64_t rng_seed) {
  const RegionPair regions = extract_regions(gripper, pose, cloud, cfg.outside_scale);
  return build_graph_from_regions(regions.inside, regions.outside, cfg, rng_seed);
}

namespace {
constexpr uint32_t kGraphMagic = 0x47474752;  // "RGGG" little-endian
constexpr uint32_t kGraphVersion = 1;

template <class T>
void put(std::vector<uint8_t>& buf, const T& v) {
  const size_t at = buf.size();
  buf.resize(at + sizeof(T));
  std::memcpy(buf.data() + at, &v, sizeof(T));
}

template <class T>
T take(const uint8_t* data, size_t size, size_t& at) {
  if (at + sizeof(T) > size) throw DataError("graph blob truncated");
  T v;
  std::memcpy(&v, data + at, sizeof(T));
  at += sizeof(T);
  return v;
}
}  // namespace

std::vector<uint8_t> serialize_graph(const GraspGraph& graph) {
  std::vector<uint8_t> buf;
  put(buf, kGraphMagic);
  put(buf, kGraphVersion);
  put(buf, graph.n_inside);
  put(buf, graph.n_outside);
  put(buf, uint32_t(graph.edge_src.size()));
  const size_t feat_bytes = graph.node_features.size() * sizeof(float);
  const size_t at = buf.size();
  buf.resize(at + feat_bytes);
  std::memcpy(buf.data() + at, graph.node_features.data(), feat_bytes);
  for (uint32_t v : graph.edge_src) put(buf, v);
  for (uint32_t v : graph.edge_dst) put(buf, v);
  return buf;
}

GraspGraph parse_graph(const uint8_t* data, size_t size) {
  size_t at = 0;
  if (take<uint32_t>(data, size, at) != kGraphMagic)
    throw DataError("graph blob: bad magic");
  const uint32_t version = take<uint32_t>(data, size, at);
  if (version != kGraphVersion)
    throw DataError("graph blob: unsupported version " + std::to_string(version));

  GraspGraph graph;
  graph.n_inside = take<uint32_t>(data, size, at);
  graph.n_outside = take<uint32_t>(data, size, at);
  const uint32_t n_edges = take<uint32_t>(data, size, at);
  const size_t n_feats = size_t(graph.n_nodes()) * 5;
  if (at + n_feats * sizeof(float) > size) throw DataError("graph blob truncated");
  graph.node_features.resize(n_feats);
  std::memcpy(graph.node_features.data(), data + at, n_feats * sizeof(float));
  at += n_feats * sizeof(float);
  graph.edge_src.resize(n_edges);
  graph.edge_dst.resize(n_edges);
  for (uint32_t e = 0; e < n_edges; ++e)
    graph.edge_src[e] = take<uint32_t>(data, size, at);
  for (uint32_t e = 0; e < n_edges; ++e)
    graph.edge_dst[e] = take<uint32_t>(data, size, at);
  if (at != size) throw DataError("graph blob has trailing bytes");
  return graph;
}

void save_graph_file(const std::vector<GraspGraph>& graphs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  for (const auto& graph : graphs) {
    const auto blob = serialize_graph(graph);
    const uint32_t len = uint32_t(blob.size());
    out.write(reinterpret_cast<const char*>(&len), 4);
    out.write(reinterpret_cast<const char*>(blob.data()), std::streamsize(blob.size()));
  }
  if (!out) throw DataError("write failed for '" + path + "'");
}

std::vector<GraspGraph> load_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::vector<GraspGraph> graphs;
  for (;;) {
    uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), 4);
    if (in.gcount() == 0) break;
    if (in.gcount() != 4) throw DataError(path + ": truncated length prefix");
    std::vector<uint8_t> blob(len);
    in.read(reinterpret_cast<char*>(blob.data()), std::streamsize(len));
    if (size_t(in.gcount()) != len) throw DataError(path + ": truncated graph blob");
    graphs.push_back(parse_graph(blob.data(), blob.size()));
  }
  return graphs;
}

}  // namespace gtg
