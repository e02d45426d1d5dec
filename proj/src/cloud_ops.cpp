#include "gtg/cloud_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "gtg/error.hpp"
#include "gtg/rng.hpp"

namespace gtg {

PointCloud voxel_downsample(const PointCloud& cloud, double voxel) {
  if (voxel <= 0.0) throw ConfigError("voxel size must be positive");

  struct Cell {
    Vec3 sum{};
    Vec3 normal_sum{};
    size_t count = 0;
  };
  using Key = std::tuple<int64_t, int64_t, int64_t>;
  std::map<Key, Cell> cells;  // ordered keys give input-order independence

  for (size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    const Key key{int64_t(std::floor(p.x / voxel)), int64_t(std::floor(p.y / voxel)),
                  int64_t(std::floor(p.z / voxel))};
    Cell& c = cells[key];
    c.sum += p;
    if (cloud.has_normals()) c.normal_sum += cloud.normals[i];
    ++c.count;
  }

  PointCloud out;
  out.frame_id = cloud.frame_id;
  out.points.reserve(cells.size());
  if (cloud.has_normals()) out.normals.reserve(cells.size());
  for (const auto& [key, c] : cells) {
    out.points.push_back(c.sum / double(c.count));
    if (cloud.has_normals()) out.normals.push_back(c.normal_sum.normalized());
  }
  return out;
}

PointCloud weighted_knn_denoise(const PointCloud& cloud, size_t k) {
  if (cloud.size() <= k)
    throw DataError("denoise requires more points than neighbors (|cloud| > k)");
  if (k == 0) return cloud;

  const SpatialIndex index(cloud);
  PointCloud out = cloud;
  for (size_t i = 0; i < cloud.size(); ++i) {
    // k+1 hits, then drop the query point itself (not merely distance 0:
    // exact duplicates of other points must stay in the neighbor set).
    auto hits = index.knn(cloud.points[i], k + 1);
    Vec3 weighted_sum{};
    double weight_total = 0.0;
    size_t used = 0;
    for (const auto& [id, dist] : hits) {
      if (id == i) continue;
      if (used == k) break;
      const double w = 1.0 / std::max(dist, 1e-9);
      weighted_sum += cloud.points[id] * w;
      weight_total += w;
      ++used;
    }
    out.points[i] = weighted_sum / weight_total;
  }
  return out;
}

PointCloud estimate_normals(const PointCloud& cloud, double radius,
                            const Vec3& viewpoint) {
  if (radius <= 0.0) throw ConfigError("normal estimation radius must be positive");

  const SpatialIndex index(cloud);
  PointCloud out = cloud;
  out.normals.assign(cloud.size(), Vec3{});

  for (size_t i = 0; i < cloud.size(); ++i) {
    const auto ids = index.radius_search(cloud.points[i], radius);
    if (ids.size() < 3) continue;  // zero normal = invalid marker

    Vec3 mean{};
    for (uint32_t id : ids) mean += cloud.points[id];
    mean = mean / double(ids.size());

    Mat3 cov;
    cov.m.fill(0.0);
    for (uint32_t id : ids) {
      const Vec3 d = cloud.points[id] - mean;
      cov(0, 0) += d.x * d.x;
      cov(0, 1) += d.x * d.y;
      cov(0, 2) += d.x * d.z;
      cov(1, 1) += d.y * d.y;
      cov(1, 2) += d.y * d.z;
      cov(2, 2) += d.z * d.z;
    }
    cov(1, 0) = cov(0, 1);
    cov(2, 0) = cov(0, 2);
    cov(2, 1) = cov(1, 2);

    Vec3 normal = symmetric_eigen3(cov).vectors[0];
    if (normal.squared_norm() < 0.5) continue;
    if (normal.dot(viewpoint - cloud.points[i]) < 0.0) normal = -normal;
    out.normals[i] = normal;
  }
  return out;
}

std::vector<uint32_t> farthest_point_sample(const PointCloud& cloud,
                                            size_t max_points, uint64_t seed) {
  if (max_points == 0) throw ConfigError("max_points must be >= 1");
  const size_t n = cloud.size();
  std::vector<uint32_t> selected;
  if (n == 0) return selected;
  if (n <= max_points) {
    selected.resize(n);
    for (size_t i = 0; i < n; ++i) selected[i] = uint32_t(i);
    return selected;
  }

  size_t start = 0;
  if (seed == 0) {
    for (size_t i = 1; i < n; ++i) {
      const Vec3 &a = cloud.points[i], &b = cloud.points[start];
      if (std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z)) start = i;
    }
  } else {
    start = size_t(Rng(seed).next_below(n));
  }

  std::vector<double> best_d2(n, std::numeric_limits<double>::infinity());
  std::vector<char> taken(n, 0);
  selected.reserve(max_points);
  selected.push_back(uint32_t(start));
  taken[start] = 1;
  size_t last = start;
  while (selected.size() < max_points) {
    size_t farthest = n;
    double farthest_d2 = -1.0;
    for (size_t i = 0; i < n; ++i) {
      const double d2 = (cloud.points[i] - cloud.points[last]).squared_norm();
      if (d2 < best_d2[i]) best_d2[i] = d2;
      if (!taken[i] && best_d2[i] > farthest_d2) {
        farthest_d2 = best_d2[i];
        farthest = i;
      }
    }
    selected.push_back(uint32_t(farthest));
    taken[farthest] = 1;
    last = farthest;
  }
  return selected;
}

}  // namespace gtg
