#include "gtg/cloud_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gtg/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "PLY binary path assumes a little-endian host");

namespace gtg {

void PointCloud::validate() const {
  for (size_t i = 0; i < points.size(); ++i)
    if (!points[i].finite())
      throw DataError("point " + std::to_string(i) + " has non-finite coordinates");
  if (!normals.empty()) {
    if (normals.size() != points.size())
      throw DataError("normal count " + std::to_string(normals.size()) +
                      " != point count " + std::to_string(points.size()));
    for (size_t i = 0; i < normals.size(); ++i) {
      if (!normals[i].finite())
        throw DataError("normal " + std::to_string(i) + " is non-finite");
      const double n = normals[i].norm();
      if (n != 0.0 && std::abs(n - 1.0) > 1e-6)
        throw DataError("normal " + std::to_string(i) + " has norm " +
                        std::to_string(n));
    }
  }
}

namespace {

struct PlyProperty {
  std::string name;
  std::string type;  // float, double, uchar
};

struct PlyHeader {
  bool binary = false;
  size_t vertex_count = 0;
  std::vector<PlyProperty> properties;
  size_t header_lines = 0;
};

size_t scalar_size(const std::string& type) {
  if (type == "float" || type == "float32") return 4;
  if (type == "double" || type == "float64") return 8;
  if (type == "uchar" || type == "uint8") return 1;
  return 0;
}

PlyHeader parse_ply_header(std::istream& in, const std::string& path) {
  PlyHeader h;
  std::string line;
  size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw DataError(path + ":" + std::to_string(line_no) + ": " + what);
  };

  if (!std::getline(in, line)) fail("empty file");
  ++line_no;
  if (line.rfind("ply", 0) != 0) fail("missing 'ply' magic");

  bool in_vertex_element = false;
  bool saw_format = false;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
      line.pop_back();
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "comment" || tok.empty()) continue;
    if (tok == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt == "ascii")
        h.binary = false;
      else if (fmt == "binary_little_endian")
        h.binary = true;
      else
        fail("unsupported format '" + fmt + "'");
      saw_format = true;
    } else if (tok == "element") {
      std::string name;
      size_t count = 0;
      ls >> name >> count;
      if (name == "vertex") {
        h.vertex_count = count;
        in_vertex_element = true;
      } else {
        if (count != 0) fail("unsupported element '" + name + "'");
        in_vertex_element = false;
      }
    } else if (tok == "property") {
      if (!in_vertex_element) fail("property outside vertex element");
      PlyProperty p;
      ls >> p.type >> p.name;
      if (p.type == "list") fail("list properties not supported");
      if (scalar_size(p.type) == 0) fail("unsupported property type '" + p.type + "'");
      h.properties.push_back(p);
    } else if (tok == "end_header") {
      h.header_lines = line_no;
      if (!saw_format) fail("no format declaration before end_header");
      return h;
    } else {
      fail("unrecognized header token '" + tok + "'");
    }
  }
  fail("end_header not found");
  return h;  // unreachable
}

double read_scalar_le(const uint8_t* bytes, const std::string& type) {
  if (type == "float" || type == "float32") {
    float f;
    std::memcpy(&f, bytes, 4);
    return double(f);
  }
  if (type == "double" || type == "float64") {
    double d;
    std::memcpy(&d, bytes, 8);
    return d;
  }
  return double(bytes[0]);  // uchar
}

PointCloud load_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  PlyHeader h = parse_ply_header(in, path);

  int ix = -1, iy = -1, iz = -1, inx = -1, iny = -1, inz = -1;
  size_t record_size = 0;
  std::vector<size_t> offsets;
  for (size_t p = 0; p < h.properties.size(); ++p) {
    const auto& prop = h.properties[p];
    offsets.push_back(record_size);
    record_size += scalar_size(prop.type);
    if (prop.name == "x") ix = int(p);
    else if (prop.name == "y") iy = int(p);
    else if (prop.name == "z") iz = int(p);
    else if (prop.name == "nx") inx = int(p);
    else if (prop.name == "ny") iny = int(p);
    else if (prop.name == "nz") inz = int(p);
    else if (prop.name != "red" && prop.name != "green" && prop.name != "blue")
      throw DataError(path + ": unsupported vertex property '" + prop.name + "'");
  }
  if (ix < 0 || iy < 0 || iz < 0)
    throw DataError(path + ": vertex element lacks x/y/z properties");
  const bool with_normals = inx >= 0 && iny >= 0 && inz >= 0;

  PointCloud cloud;
  cloud.points.reserve(h.vertex_count);
  if (with_normals) cloud.normals.reserve(h.vertex_count);

  if (h.binary) {
    std::vector<uint8_t> record(record_size);
    const std::streamoff payload_start = in.tellg();
    for (size_t v = 0; v < h.vertex_count; ++v) {
      in.read(reinterpret_cast<char*>(record.data()), std::streamsize(record_size));
      if (!in)
        throw DataError(path + ": truncated payload at byte offset " +
                        std::to_string(payload_start +
                                       std::streamoff(v * record_size)) +
                        " (vertex " + std::to_string(v) + ")");
      auto get = [&](int p) { return read_scalar_le(record.data() + offsets[size_t(p)],
                                                    h.properties[size_t(p)].type); };
      Vec3 pt{get(ix), get(iy), get(iz)};
      if (!pt.finite())
        throw DataError(path + ": non-finite coordinate at vertex " + std::to_string(v));
      cloud.points.push_back(pt);
      if (with_normals) cloud.normals.push_back({get(inx), get(iny), get(inz)});
    }
  } else {
    std::string line;
    size_t line_no = h.header_lines;
    for (size_t v = 0; v < h.vertex_count; ++v) {
      if (!std::getline(in, line))
        throw DataError(path + ":" + std::to_string(line_no + 1) +
                        ": truncated payload (vertex " + std::to_string(v) + ")");
      ++line_no;
      std::istringstream ls(line);
      std::vector<double> vals(h.properties.size());
      for (size_t p = 0; p < h.properties.size(); ++p)
        if (!(ls >> vals[p]))
          throw DataError(path + ":" + std::to_string(line_no) +
                          ": short vertex line");
      Vec3 pt{vals[size_t(ix)], vals[size_t(iy)], vals[size_t(iz)]};
      if (!pt.finite())
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": non-finite coordinate");
      cloud.points.push_back(pt);
      if (with_normals)
        cloud.normals.push_back(
            {vals[size_t(inx)], vals[size_t(iny)], vals[size_t(inz)]});
    }
  }
  return cloud;
}

PointCloud load_xyz(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  PointCloud cloud;
  std::string line;
  size_t line_no = 0;
  int columns = 0;  // 3 or 6, fixed by the first data line
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<double> vals;
    double v;
    while (ls >> v) vals.push_back(v);
    if (vals.empty()) continue;
    if (columns == 0) {
      if (vals.size() != 3 && vals.size() != 6)
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": expected 3 or 6 columns, got " +
                        std::to_string(vals.size()));
      columns = int(vals.size());
    }
    if (int(vals.size()) != columns)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": inconsistent column count");
    Vec3 pt{vals[0], vals[1], vals[2]};
    if (!pt.finite())
      throw DataError(path + ":" + std::to_string(line_no) + ": non-finite coordinate");
    cloud.points.push_back(pt);
    if (columns == 6) cloud.normals.push_back({vals[3], vals[4], vals[5]});
  }
  return cloud;
}

void write_double_le(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), 8);
}

}  // namespace

PointCloud load_cloud(const std::string& path, CloudFormat format) {
  switch (format) {
    case CloudFormat::ply_ascii:
    case CloudFormat::ply_binary_le:
      return load_ply(path);
    case CloudFormat::xyz_text:
      return load_xyz(path);
  }
  throw DataError("unknown cloud format");
}

void save_cloud(const PointCloud& cloud, const std::string& path, CloudFormat format,
                const std::vector<std::array<uint8_t, 3>>* colors) {
  if (colors && colors->size() != cloud.size())
    throw DataError("color count does not match point count");
  if (format == CloudFormat::xyz_text && colors)
    throw DataError("xyz_text format does not support colors");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");

  if (format == CloudFormat::xyz_text) {
    out.precision(17);
    for (size_t i = 0; i < cloud.size(); ++i) {
      out << cloud.points[i].x << ' ' << cloud.points[i].y << ' ' << cloud.points[i].z;
      if (cloud.has_normals())
        out << ' ' << cloud.normals[i].x << ' ' << cloud.normals[i].y << ' '
            << cloud.normals[i].z;
      out << '\n';
    }
    return;
  }

  const bool binary = format == CloudFormat::ply_binary_le;
  out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n";
  out << "element vertex " << cloud.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  if (cloud.has_normals())
    out << "property double nx\nproperty double ny\nproperty double nz\n";
  if (colors)
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "end_header\n";

  if (binary) {
    for (size_t i = 0; i < cloud.size(); ++i) {
      write_double_le(out, cloud.points[i].x);
      write_double_le(out, cloud.points[i].y);
      write_double_le(out, cloud.points[i].z);
      if (cloud.has_normals()) {
        write_double_le(out, cloud.normals[i].x);
        write_double_le(out, cloud.normals[i].y);
        write_double_le(out, cloud.normals[i].z);
      }
      if (colors)
        out.write(reinterpret_cast<const char*>((*colors)[i].data()), 3);
    }
  } else {
    out.precision(17);
    for (size_t i = 0; i < cloud.size(); ++i) {
      out << cloud.points[i].x << ' ' << cloud.points[i].y << ' ' << cloud.points[i].z;
      if (cloud.has_normals())
        out << ' ' << cloud.normals[i].x << ' ' << cloud.normals[i].y << ' '
            << cloud.normals[i].z;
      if (colors)
        out << ' ' << int((*colors)[i][0]) << ' ' << int((*colors)[i][1]) << ' '
            << int((*colors)[i][2]);
      out << '\n';
    }
  }
  if (!out) throw DataError("write failed for '" + path + "'");
}

std::array<uint8_t, 3> score_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  // Hue sweep 240 (pure blue) -> 0 (pure red) at full saturation.
  const double h = (1.0 - t) * 240.0 / 60.0;
  const int sector = std::min(3, int(h));
  const double f = h - sector;
  double r = 0, g = 0, b = 0;
  switch (sector) {
    case 0: r = 1; g = f; break;          // red -> yellow
    case 1: r = 1 - f; g = 1; break;      // yellow -> green
    case 2: g = 1; b = f; break;          // green -> cyan
    default: g = 1 - f; b = 1; break;     // cyan -> blue
  }
  return {uint8_t(std::lround(r * 255.0)), uint8_t(std::lround(g * 255.0)),
          uint8_t(std::lround(b * 255.0))};
}

}  // namespace gtg
