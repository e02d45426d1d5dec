#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gtg/point_cloud.hpp"

namespace gtg {

// Balanced 3-d tree over a snapshot of point positions. Query results match a
// brute-force scan exactly; k-NN ties on distance resolve to the smaller
// point id. Immutable after construction and safe to share across threads.
class SpatialIndex {
 public:
  explicit SpatialIndex(const PointCloud& cloud);

  // min(k, size) hits sorted by (distance, id) ascending.
  std::vector<std::pair<uint32_t, double>> knn(const Vec3& query, size_t k) const;

  // Ids with distance <= radius, sorted ascending by id.
  std::vector<uint32_t> radius_search(const Vec3& query, double radius) const;

  size_t size() const { return points_.size(); }

 private:
  struct Node {
    int32_t left = -1, right = -1;
    uint32_t begin = 0, end = 0;  // leaf range into ids_
    uint8_t axis = 0;
    double split = 0.0;
  };

  int32_t build(uint32_t begin, uint32_t end);

  std::vector<Vec3> points_;
  std::vector<uint32_t> ids_;
  std::vector<Node> nodes_;
  int32_t root_ = -1;
};

}  // namespace gtg
