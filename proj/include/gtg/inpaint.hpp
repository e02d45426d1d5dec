#pragma once

#include <cstddef>

#include "gtg/depth_image.hpp"

namespace gtg {

// Fills depth holes (0/NaN pixels) by Jacobi iteration of the 4-neighbor
// Laplace average until the largest update drops below tol or max_iters is
// reached. Valid pixels pass through bit-exactly; filled values obey the
// discrete maximum principle (they stay within [min, max] of valid depths).
DepthImage inpaint_depth(const DepthImage& img, size_t max_iters, double tol);

}  // namespace gtg
