#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gtg/point_cloud.hpp"

namespace gtg {

struct CameraIntrinsics {
  double fx = 0.0, fy = 0.0, cx = 0.0, cy = 0.0;  // pixels
};

// Row-major depth raster in meters; 0 or NaN marks a hole. Finite nonzero
// depths must be positive.
struct DepthImage {
  size_t width = 0, height = 0;
  std::vector<float> depths;
  CameraIntrinsics intrinsics;

  float at(size_t u, size_t v) const { return depths[v * width + u]; }
  float& at(size_t u, size_t v) { return depths[v * width + u]; }

  static bool is_hole(float d) { return !(d > 0.0f); }

  void validate() const;
};

// On-disk format: PFM-style header ("Pf", width height, scale -1.0 for
// little-endian) followed by row-major float32 rows, top row first, plus a
// JSON sidecar `<path>.json` holding fx/fy/cx/cy.
void save_depth(const DepthImage& img, const std::string& path);
DepthImage load_depth(const std::string& path);

// Pinhole back-projection of valid pixels: x=(u-cx)z/fx, y=(v-cy)z/fy.
PointCloud depth_to_cloud(const DepthImage& img);

}  // namespace gtg
