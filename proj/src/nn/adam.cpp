#include "gtg/nn/adam.hpp"

#include <cmath>
#include <vector>

#include "gtg/error.hpp"
#include "gtg/kern/kernels.hpp"

namespace gtg::nn {

AdamState AdamState::like(const NetworkParams& params) {
  (void)params;
  AdamState s;
  s.m = NetworkParams::zeros();
  s.v = NetworkParams::zeros();
  s.m.visit_learnable([](const std::string&, Tensor& t) { t.fill(0.0f); });
  s.v.visit_learnable([](const std::string&, Tensor& t) { t.fill(0.0f); });
  return s;
}

void adam_step(NetworkParams& params, const NetworkParams& grads, AdamState& state,
               const AdamConfig& cfg) {
  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, double(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, double(state.t));
  const float lr_t = float(cfg.lr * std::sqrt(bc2) / bc1);

  std::vector<Tensor*> ps, ms, vs;
  std::vector<const Tensor*> gs;
  params.visit_learnable([&](const std::string&, Tensor& t) { ps.push_back(&t); });
  grads.visit_learnable([&](const std::string&, const Tensor& t) { gs.push_back(&t); });
  state.m.visit_learnable([&](const std::string&, Tensor& t) { ms.push_back(&t); });
  state.v.visit_learnable([&](const std::string&, Tensor& t) { vs.push_back(&t); });

  for (size_t i = 0; i < ps.size(); ++i) {
    if (ps[i]->size() != gs[i]->size())
      throw DataError("adam_step: gradient shape mismatch");
    kern::adam_update(ps[i]->ptr(), ms[i]->ptr(), vs[i]->ptr(), gs[i]->ptr(),
                      ps[i]->size(), lr_t, float(cfg.beta1), float(cfg.beta2),
                      float(cfg.eps));
  }
}

}  // namespace gtg::nn
