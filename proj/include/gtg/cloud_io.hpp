#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gtg/point_cloud.hpp"

namespace gtg {

enum class CloudFormat { ply_ascii, ply_binary_le, xyz_text };

// Loads x/y/z (+ optional nx/ny/nz) vertex properties. PLY coverage is
// deliberately narrow: ASCII and binary_little_endian, float/double scalars,
// optional uchar red/green/blue (skipped on load). Parse failures throw
// DataError naming the line (ASCII/XYZ) or byte offset (binary).
PointCloud load_cloud(const std::string& path, CloudFormat format);

// Positions and normals are written as float64, so a binary round-trip is
// bit-exact. Colors, when provided, are uchar RGB per point.
void save_cloud(const PointCloud& cloud, const std::string& path, CloudFormat format,
                const std::vector<std::array<uint8_t, 3>>* colors = nullptr);

// Blue (low) -> red (high) ramp used by the viz outputs.
std::array<uint8_t, 3> score_color(double t);

}  // namespace gtg
