#pragma once

#include <string>
#include <vector>

#include "gtg/geom.hpp"

namespace gtg {

// Positions in meters. Normals, when present, are parallel to `points` and
// unit length; a zero normal marks a point whose normal estimation failed.
// Immutable by convention once built: pipeline stages return new clouds.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::string frame_id;

  size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_normals() const { return !normals.empty(); }

  bool normal_valid(size_t i) const {
    return has_normals() && normals[i].squared_norm() > 0.25;
  }

  // Checks the type invariants: finite coordinates, normals (if present)
  // matching in count and unit length (or zero = invalid marker).
  void validate() const;
};

}  // namespace gtg
