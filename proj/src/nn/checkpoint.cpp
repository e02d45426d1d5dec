#include "gtg/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <vector>

#include "gtg/error.hpp"

namespace gtg::nn {
namespace {

constexpr uint32_t kModelMagic = 0x4E475447;     // "GTGN"
constexpr uint32_t kEnsembleMagic = 0x45475447;  // "GTGE"
constexpr uint32_t kVersion = 1;

template <class T>
void put(std::vector<uint8_t>& buf, const T& v) {
  const size_t at = buf.size();
  buf.resize(at + sizeof(T));
  std::memcpy(buf.data() + at, &v, sizeof(T));
}

template <class T>
T take(const uint8_t* data, size_t size, size_t& at, const std::string& what) {
  if (at + sizeof(T) > size) throw DataError("checkpoint truncated reading " + what);
  T v;
  std::memcpy(&v, data + at, sizeof(T));
  at += sizeof(T);
  return v;
}

std::vector<uint8_t> serialize_params(const NetworkParams& params) {
  std::vector<uint8_t> buf;
  put(buf, kModelMagic);
  put(buf, kVersion);
  uint32_t count = 0;
  params.visit_all([&](const std::string&, const Tensor&) { ++count; });
  put(buf, count);
  params.visit_all([&](const std::string& name, const Tensor& t) {
    put(buf, uint32_t(name.size()));
    buf.insert(buf.end(), name.begin(), name.end());
    put(buf, uint32_t(t.shape.size()));
    for (size_t d : t.shape) put(buf, uint64_t(d));
    const size_t at = buf.size();
    buf.resize(at + t.size() * sizeof(float));
    std::memcpy(buf.data() + at, t.ptr(), t.size() * sizeof(float));
  });
  return buf;
}

NetworkParams parse_params(const uint8_t* data, size_t size) {
  size_t at = 0;
  if (take<uint32_t>(data, size, at, "magic") != kModelMagic)
    throw DataError("checkpoint: bad magic");
  const uint32_t version = take<uint32_t>(data, size, at, "version");
  if (version != kVersion)
    throw DataError("checkpoint: unsupported version " + std::to_string(version));
  const uint32_t count = take<uint32_t>(data, size, at, "tensor count");

  std::map<std::string, std::pair<std::vector<size_t>, std::vector<float>>> loaded;
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t name_len = take<uint32_t>(data, size, at, "name length");
    if (at + name_len > size) throw DataError("checkpoint truncated reading name");
    std::string name(reinterpret_cast<const char*>(data + at), name_len);
    at += name_len;
    const uint32_t rank = take<uint32_t>(data, size, at, name + " rank");
    std::vector<size_t> dims(rank);
    size_t total = 1;
    for (uint32_t d = 0; d < rank; ++d) {
      dims[d] = size_t(take<uint64_t>(data, size, at, name + " dims"));
      total *= dims[d];
    }
    if (at + total * sizeof(float) > size)
      throw DataError("checkpoint truncated reading tensor '" + name + "'");
    std::vector<float> payload(total);
    std::memcpy(payload.data(), data + at, total * sizeof(float));
    at += total * sizeof(float);
    loaded.emplace(std::move(name), std::make_pair(std::move(dims), std::move(payload)));
  }

  NetworkParams params = NetworkParams::zeros();
  params.visit_all([&](const std::string& name, Tensor& t) {
    auto it = loaded.find(name);
    if (it == loaded.end())
      throw DataError("checkpoint: missing tensor '" + name + "'");
    if (it->second.first != t.shape)
      throw DataError("checkpoint: shape mismatch for tensor '" + name + "'");
    t.data = std::move(it->second.second);
    loaded.erase(it);
  });
  if (!loaded.empty())
    throw DataError("checkpoint: unexpected tensor '" + loaded.begin()->first + "'");
  return params;
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  in.seekg(0, std::ios::end);
  std::vector<uint8_t> buf(size_t(in.tellg()));
  in.seekg(0);
  in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size()));
  if (!in) throw DataError("read failed for '" + path + "'");
  return buf;
}

void write_file(const std::string& path, const std::vector<uint8_t>& buf) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
  if (!out) throw DataError("write failed for '" + path + "'");
}

}  // namespace

void save_checkpoint(const NetworkParams& params, const std::string& path) {
  write_file(path, serialize_params(params));
}

NetworkParams load_checkpoint(const std::string& path) {
  const auto buf = read_file(path);
  return parse_params(buf.data(), buf.size());
}

void save_ensemble(const Ensemble& ensemble, const std::string& path) {
  std::vector<uint8_t> buf;
  put(buf, kEnsembleMagic);
  put(buf, kVersion);
  put(buf, uint32_t(kEnsembleSize));
  for (uint64_t s : ensemble.seeds) put(buf, s);
  for (const auto& member : ensemble.members) {
    const auto blob = serialize_params(member);
    put(buf, uint64_t(blob.size()));
    buf.insert(buf.end(), blob.begin(), blob.end());
  }
  write_file(path, buf);
}

Ensemble load_ensemble(const std::string& path) {
  const auto buf = read_file(path);
  size_t at = 0;
  if (take<uint32_t>(buf.data(), buf.size(), at, "magic") != kEnsembleMagic)
    throw DataError("ensemble file: bad magic");
  const uint32_t version = take<uint32_t>(buf.data(), buf.size(), at, "version");
  if (version != kVersion)
    throw DataError("ensemble file: unsupported version " + std::to_string(version));
  const uint32_t count = take<uint32_t>(buf.data(), buf.size(), at, "member count");
  if (count != kEnsembleSize)
    throw DataError("ensemble file: expected " + std::to_string(kEnsembleSize) +
                    " members, found " + std::to_string(count));

  Ensemble ensemble;
  for (auto& s : ensemble.seeds)
    s = take<uint64_t>(buf.data(), buf.size(), at, "seed");
  for (auto& member : ensemble.members) {
    const uint64_t len = take<uint64_t>(buf.data(), buf.size(), at, "member length");
    if (at + len > buf.size()) throw DataError("ensemble file truncated");
    member = parse_params(buf.data() + at, size_t(len));
    at += len;
  }
  return ensemble;
}

double ensemble_score(Ensemble& ensemble, const GraspGraph& graph) {
  double sum = 0.0;
  for (auto& member : ensemble.members)
    sum += double(forward_single(member, graph, Mode::eval));
  return sum / double(kEnsembleSize);
}

std::vector<double> ensemble_score_batch(Ensemble& ensemble,
                                         const std::vector<const GraspGraph*>& graphs) {
  std::vector<double> scores(graphs.size(), 0.0);
  if (graphs.empty()) return scores;
  const GraphBatch batch = GraphBatch::from_graphs(graphs);
  for (auto& member : ensemble.members) {
    const auto s = forward_batch(member, batch, Mode::eval);
    for (size_t i = 0; i < scores.size(); ++i) scores[i] += double(s[i]);
  }
  for (double& s : scores) s /= double(kEnsembleSize);
  return scores;
}

}  // namespace gtg::nn
