#include "gtg/inpaint.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtg/error.hpp"

namespace gtg {

DepthImage inpaint_depth(const DepthImage& img, size_t max_iters, double tol) {
  img.validate();
  const size_t w = img.width, h = img.height;

  std::vector<size_t> holes;
  double valid_sum = 0.0;
  size_t valid_count = 0;
  for (size_t i = 0; i < img.depths.size(); ++i) {
    if (DepthImage::is_hole(img.depths[i])) {
      holes.push_back(i);
    } else {
      valid_sum += double(img.depths[i]);
      ++valid_count;
    }
  }
  if (valid_count == 0) throw DataError("inpaint_depth: image has no valid pixels");
  if (holes.empty()) return img;

  // Field in double during the iteration; the hole initialization (mean of
  // valid pixels) keeps all iterates inside the valid range.
  std::vector<double> field(img.depths.size());
  const double init = valid_sum / double(valid_count);
  for (size_t i = 0; i < field.size(); ++i)
    field[i] = DepthImage::is_hole(img.depths[i]) ? init : double(img.depths[i]);

  std::vector<double> next(holes.size());
  for (size_t iter = 0; iter < max_iters; ++iter) {
    double max_update = 0.0;
    for (size_t hi = 0; hi < holes.size(); ++hi) {
      const size_t i = holes[hi];
      const size_t u = i % w, v = i / w;
      double sum = 0.0;
      int count = 0;
      if (u > 0) { sum += field[i - 1]; ++count; }
      if (u + 1 < w) { sum += field[i + 1]; ++count; }
      if (v > 0) { sum += field[i - w]; ++count; }
      if (v + 1 < h) { sum += field[i + w]; ++count; }
      next[hi] = count > 0 ? sum / double(count) : field[i];
      max_update = std::max(max_update, std::abs(next[hi] - field[i]));
    }
    for (size_t hi = 0; hi < holes.size(); ++hi) field[holes[hi]] = next[hi];
    if (max_update < tol) break;
  }

  DepthImage out = img;  // valid pixels keep their original bits
  for (size_t i : holes) out.depths[i] = float(field[i]);
  return out;
}

}  // namespace gtg
