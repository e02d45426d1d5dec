#include "gtg/depth_image.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gtg/error.hpp"

namespace gtg {

void DepthImage::validate() const {
  if (width * height != depths.size())
    throw DataError("depth raster size " + std::to_string(depths.size()) +
                    " != width*height " + std::to_string(width * height));
  for (size_t i = 0; i < depths.size(); ++i) {
    const float d = depths[i];
    if (std::isfinite(d) && d < 0.0f)
      throw DataError("negative depth at pixel " + std::to_string(i));
  }
  if (intrinsics.fx <= 0.0 || intrinsics.fy <= 0.0)
    throw DataError("invalid intrinsics: fx/fy must be positive");
}

void save_depth(const DepthImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "Pf\n" << img.width << " " << img.height << "\n-1.0\n";
  out.write(reinterpret_cast<const char*>(img.depths.data()),
            std::streamsize(img.depths.size() * sizeof(float)));
  if (!out) throw DataError("write failed for '" + path + "'");

  nlohmann::json j;
  j["fx"] = img.intrinsics.fx;
  j["fy"] = img.intrinsics.fy;
  j["cx"] = img.intrinsics.cx;
  j["cy"] = img.intrinsics.cy;
  std::ofstream side(path + ".json");
  if (!side) throw DataError("cannot write '" + path + ".json'");
  side << j.dump(2) << "\n";
}

DepthImage load_depth(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string magic, scale;
  DepthImage img;
  in >> magic >> img.width >> img.height >> scale;
  if (magic != "Pf") throw DataError(path + ": bad magic '" + magic + "'");
  in.get();  // newline after the scale token
  img.depths.resize(img.width * img.height);
  in.read(reinterpret_cast<char*>(img.depths.data()),
          std::streamsize(img.depths.size() * sizeof(float)));
  if (!in) throw DataError(path + ": truncated raster payload");

  std::ifstream side(path + ".json");
  if (!side) throw DataError("missing intrinsics sidecar '" + path + ".json'");
  nlohmann::json j = nlohmann::json::parse(side, nullptr, true);
  img.intrinsics.fx = j.at("fx").get<double>();
  img.intrinsics.fy = j.at("fy").get<double>();
  img.intrinsics.cx = j.at("cx").get<double>();
  img.intrinsics.cy = j.at("cy").get<double>();
  img.validate();
  return img;
}

PointCloud depth_to_cloud(const DepthImage& img) {
  if (img.intrinsics.fx <= 0.0 || img.intrinsics.fy <= 0.0)
    throw ConfigError("depth_to_cloud requires valid intrinsics");
  PointCloud cloud;
  for (size_t v = 0; v < img.height; ++v) {
    for (size_t u = 0; u < img.width; ++u) {
      const float d = img.at(u, v);
      if (DepthImage::is_hole(d)) continue;
      const double z = double(d);
      cloud.points.push_back({(double(u) - img.intrinsics.cx) * z / img.intrinsics.fx,
                              (double(v) - img.intrinsics.cy) * z / img.intrinsics.fy,
                              z});
    }
  }
  return cloud;
}

}  // namespace gtg
