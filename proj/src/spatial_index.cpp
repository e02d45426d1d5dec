#include "gtg/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace gtg {

namespace {
constexpr uint32_t kLeafSize = 16;

double squared_distance(const Vec3& a, const Vec3& b) {
  return (a - b).squared_norm();
}
}  // namespace

SpatialIndex::SpatialIndex(const PointCloud& cloud) : points_(cloud.points) {
  ids_.resize(points_.size());
  std::iota(ids_.begin(), ids_.end(), 0u);
  if (!ids_.empty()) root_ = build(0, uint32_t(ids_.size()));
}

int32_t SpatialIndex::build(uint32_t begin, uint32_t end) {
  Node node;
  node.begin = begin;
  node.end = end;
  const int32_t index = int32_t(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) return index;

  Vec3 lo = points_[ids_[begin]], hi = lo;
  for (uint32_t i = begin + 1; i < end; ++i) {
    const Vec3& p = points_[ids_[i]];
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  const Vec3 span = hi - lo;
  int axis = 0;
  if (span.y > span[axis]) axis = 1;
  if (span.z > span[axis]) axis = 2;
  if (span[axis] <= 0.0) return index;  // all points coincide: keep as leaf

  const uint32_t mid = (begin + end) / 2;
  std::nth_element(ids_.begin() + begin, ids_.begin() + mid, ids_.begin() + end,
                   [&](uint32_t a, uint32_t b) {
                     const double pa = points_[a][axis], pb = points_[b][axis];
                     return pa < pb || (pa == pb && a < b);
                   });

  nodes_[size_t(index)].axis = uint8_t(axis);
  nodes_[size_t(index)].split = points_[ids_[mid]][axis];
  const int32_t left = build(begin, mid);
  const int32_t right = build(mid, end);
  nodes_[size_t(index)].left = left;
  nodes_[size_t(index)].right = right;
  return index;
}

std::vector<std::pair<uint32_t, double>> SpatialIndex::knn(const Vec3& query,
                                                           size_t k) const {
  std::vector<std::pair<uint32_t, double>> out;
  if (k == 0 || points_.empty()) return out;
  k = std::min(k, points_.size());

  // Max-heap of (squared distance, id); worst candidate on top. The id is
  // part of the ordering so distance ties resolve to smaller ids.
  using Entry = std::pair<double, uint32_t>;
  std::priority_queue<Entry> heap;

  auto visit = [&](auto&& self, int32_t ni) -> void {
    const Node& node = nodes_[size_t(ni)];
    if (node.left < 0) {
      for (uint32_t i = node.begin; i < node.end; ++i) {
        const uint32_t id = ids_[i];
        const double d2 = squared_distance(points_[id], query);
        if (heap.size() < k) {
          heap.emplace(d2, id);
        } else if (Entry(d2, id) < heap.top()) {
          heap.pop();
          heap.emplace(d2, id);
        }
      }
      return;
    }
    const double delta = query[node.axis] - node.split;
    const int32_t near = delta < 0.0 ? node.left : node.right;
    const int32_t far = delta < 0.0 ? node.right : node.left;
    self(self, near);
    if (heap.size() < k || delta * delta <= heap.top().first) self(self, far);
  };
  visit(visit, root_);

  out.reserve(heap.size());
  while (!heap.empty()) {
    out.emplace_back(heap.top().second, std::sqrt(heap.top().first));
    heap.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<uint32_t> SpatialIndex::radius_search(const Vec3& query,
                                                  double radius) const {
  std::vector<uint32_t> out;
  if (points_.empty() || radius < 0.0) return out;
  const double r2 = radius * radius;

  auto visit = [&](auto&& self, int32_t ni) -> void {
    const Node& node = nodes_[size_t(ni)];
    if (node.left < 0) {
      for (uint32_t i = node.begin; i < node.end; ++i) {
        const uint32_t id = ids_[i];
        if (squared_distance(points_[id], query) <= r2) out.push_back(id);
      }
      return;
    }
    const double delta = query[node.axis] - node.split;
    if (delta <= radius) self(self, node.left);
    if (-delta <= radius) self(self, node.right);
  };
  if (root_ >= 0) visit(visit, root_);

  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gtg
