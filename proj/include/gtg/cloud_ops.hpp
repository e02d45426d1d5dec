#pragma once

#include <cstdint>
#include <vector>

#include "gtg/point_cloud.hpp"
#include "gtg/spatial_index.hpp"

namespace gtg {

// One output point per occupied voxel: the centroid of its members. Normals
// are averaged then renormalized (zero average stays zero = invalid). Output
// ordered by ascending voxel key, so the result is independent of input order.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel);

// Replaces each point by the inverse-distance-weighted mean of its k nearest
// neighbors (self excluded). Duplicate neighbors get weight 1/max(d, 1e-9).
// Requires |cloud| > k. Normals and frame tag pass through untouched.
PointCloud weighted_knn_denoise(const PointCloud& cloud, size_t k);

// Normal = smallest-eigenvalue eigenvector of the neighborhood covariance,
// oriented so dot(normal, viewpoint - p) >= 0. Points with fewer than 3
// neighbors inside `radius` get the zero normal (invalid marker).
PointCloud estimate_normals(const PointCloud& cloud, double radius,
                            const Vec3& viewpoint);

// Greedy farthest point sampling. seed == 0 starts from the point with the
// lexicographically smallest (x,y,z); any other seed picks a pseudo-random
// start index derived from it. Returns all ids when |cloud| <= max_points.
std::vector<uint32_t> farthest_point_sample(const PointCloud& cloud,
                                            size_t max_points, uint64_t seed);

}  // namespace gtg
