#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "gtg/nn/network.hpp"

namespace gtg::nn {

// Single-model container: magic, version, tensor count, then per tensor
// (name, rank, dims, float32 little-endian payload). Loading validates every
// expected name and shape; round-trips are bit-exact.
void save_checkpoint(const NetworkParams& params, const std::string& path);
NetworkParams load_checkpoint(const std::string& path);

constexpr size_t kEnsembleSize = 5;

struct Ensemble {
  std::array<NetworkParams, kEnsembleSize> members;
  std::array<uint64_t, kEnsembleSize> seeds{};
};

// Ensemble file: header with the seed list, then five member sections.
void save_ensemble(const Ensemble& ensemble, const std::string& path);
Ensemble load_ensemble(const std::string& path);

// Arithmetic mean of the five eval-mode member scores.
double ensemble_score(Ensemble& ensemble, const GraspGraph& graph);

// Batched variant (one disjoint-union forward per member).
std::vector<double> ensemble_score_batch(Ensemble& ensemble,
                                         const std::vector<const GraspGraph*>& graphs);

}  // namespace gtg::nn
