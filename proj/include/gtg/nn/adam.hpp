#pragma once

#include <cstdint>

#include "gtg/nn/network.hpp"

namespace gtg::nn {

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment estimates mirror the learnable tensors of the params.
struct AdamState {
  NetworkParams m, v;
  uint64_t t = 0;

  static AdamState like(const NetworkParams& params);
};

// Standard bias-corrected Adam over every learnable tensor.
void adam_step(NetworkParams& params, const NetworkParams& grads, AdamState& state,
               const AdamConfig& cfg);

}  // namespace gtg::nn
