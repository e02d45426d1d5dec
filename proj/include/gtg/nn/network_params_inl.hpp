#pragma once

// Template bodies for NetworkParamsT. Included at the end of network.hpp.

#include "gtg/rng.hpp"

namespace gtg::nn {

namespace detail {

// One canonical enumeration drives init, Adam, checkpoints and the census.
template <class Self, class F>
void visit_params(Self& self, F&& f, bool include_stats) {
  auto bn = [&](const std::string& prefix, auto& layer) {
    f(prefix + ".gamma", layer.gamma);
    f(prefix + ".beta", layer.beta);
    if (include_stats) {
      f(prefix + ".running_mean", layer.running_mean);
      f(prefix + ".running_var", layer.running_var);
    }
  };
  f("enc.w1", self.enc_w1);
  bn("enc.bn1", self.enc_bn1);
  f("enc.w2", self.enc_w2);
  bn("enc.bn2", self.enc_bn2);
  f("enc.w3", self.enc_w3);
  bn("enc.bn3", self.enc_bn3);
  for (size_t l = 0; l < 3; ++l) {
    const std::string p = "sage" + std::to_string(l + 1);
    f(p + ".w_self", self.sage[l].w_self);
    f(p + ".w_neigh", self.sage[l].w_neigh);
    f(p + ".bias", self.sage[l].bias);
  }
  f("elem.wa", self.elem_wa);
  f("elem.ba", self.elem_ba);
  f("elem.wb", self.elem_wb);
  f("elem.bb", self.elem_bb);
  f("pred.w1", self.pred_w1);
  bn("pred.bn1", self.pred_bn1);
  f("pred.w2", self.pred_w2);
  bn("pred.bn2", self.pred_bn2);
  f("pred.w3", self.pred_w3);
}

}  // namespace detail

template <class T>
template <class F>
void NetworkParamsT<T>::visit_learnable(F&& f) {
  detail::visit_params(*this, std::forward<F>(f), false);
}

template <class T>
template <class F>
void NetworkParamsT<T>::visit_learnable(F&& f) const {
  detail::visit_params(*this, std::forward<F>(f), false);
}

template <class T>
template <class F>
void NetworkParamsT<T>::visit_all(F&& f) {
  detail::visit_params(*this, std::forward<F>(f), true);
}

template <class T>
template <class F>
void NetworkParamsT<T>::visit_all(F&& f) const {
  detail::visit_params(*this, std::forward<F>(f), true);
}

template <class T>
NetworkParamsT<T> NetworkParamsT<T>::zeros() {
  NetworkParamsT p;
  const size_t h = kHidden;
  p.enc_w1 = TensorT<T>::zeros({h, kInputDim});
  p.enc_w2 = TensorT<T>::zeros({2 * h, h});
  p.enc_w3 = TensorT<T>::zeros({h, 2 * h});
  p.enc_bn1 = BatchNormT<T>::init(h);
  p.enc_bn2 = BatchNormT<T>::init(2 * h);
  p.enc_bn3 = BatchNormT<T>::init(h);
  for (auto& layer : p.sage) {
    layer.w_self = TensorT<T>::zeros({h, h});
    layer.w_neigh = TensorT<T>::zeros({h, h});
    layer.bias = TensorT<T>::zeros({h});
  }
  p.elem_wa = TensorT<T>::zeros({h, h});
  p.elem_ba = TensorT<T>::zeros({h});
  p.elem_wb = TensorT<T>::zeros({h, h});
  p.elem_bb = TensorT<T>::zeros({h});
  p.pred_w1 = TensorT<T>::zeros({256, h});
  p.pred_w2 = TensorT<T>::zeros({128, 256});
  p.pred_w3 = TensorT<T>::zeros({1, 128});
  p.pred_bn1 = BatchNormT<T>::init(256);
  p.pred_bn2 = BatchNormT<T>::init(128);
  return p;
}

template <class T>
NetworkParamsT<T> NetworkParamsT<T>::init(uint64_t seed) {
  NetworkParamsT p = zeros();
  Rng rng(seed);
  auto fill_uniform = [&](TensorT<T>& t, size_t fan_in) {
    const double bound = 1.0 / std::sqrt(double(fan_in));
    for (auto& v : t.data) v = T(rng.uniform(-bound, bound));
  };
  fill_uniform(p.enc_w1, kInputDim);
  fill_uniform(p.enc_w2, kHidden);
  fill_uniform(p.enc_w3, 2 * kHidden);
  for (auto& layer : p.sage) {
    fill_uniform(layer.w_self, kHidden);
    fill_uniform(layer.w_neigh, kHidden);
    fill_uniform(layer.bias, kHidden);
  }
  fill_uniform(p.elem_wa, kHidden);
  fill_uniform(p.elem_ba, kHidden);
  fill_uniform(p.elem_wb, kHidden);
  fill_uniform(p.elem_bb, kHidden);
  fill_uniform(p.pred_w1, kHidden);
  fill_uniform(p.pred_w2, 256);
  fill_uniform(p.pred_w3, 128);
  return p;
}

template <class T>
size_t NetworkParamsT<T>::parameter_count() const {
  size_t total = 0;
  visit_learnable([&](const std::string&, const TensorT<T>& t) { total += t.size(); });
  return total;
}

}  // namespace gtg::nn
