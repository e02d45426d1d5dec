#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gtg/grasp_graph.hpp"
#include "gtg/nn/tensor.hpp"

namespace gtg::nn {

// Hidden width. Chosen so the scorer lands at ~0.1M learnable parameters
// (100,352 with the layer stack below).
constexpr size_t kHidden = 64;
constexpr size_t kInputDim = 5;

template <class T>
struct BatchNormT {
  TensorT<T> gamma, beta, running_mean, running_var;

  static BatchNormT init(size_t dim) {
    BatchNormT bn;
    bn.gamma = TensorT<T>::zeros({dim});
    bn.gamma.fill(T(1));
    bn.beta = TensorT<T>::zeros({dim});
    bn.running_mean = TensorT<T>::zeros({dim});
    bn.running_var = TensorT<T>::zeros({dim});
    bn.running_var.fill(T(1));
    return bn;
  }
};

template <class T>
struct SageLayerT {
  TensorT<T> w_self, w_neigh, bias;  // (64x64), (64x64), (64)
};

// Scorer parameters. Encoder 5->64->128->64 (BN after each linear, ReLU on
// the first two); three SAGE convolutions with element-wise max aggregation
// (ReLU after the first two); a per-node affine refinement a(h)*h + b(h);
// global max pooling; predictor 64->256->128->1 (BN+ReLU on hidden layers,
// bias-free output).
template <class T>
struct NetworkParamsT {
  TensorT<T> enc_w1, enc_w2, enc_w3;
  BatchNormT<T> enc_bn1, enc_bn2, enc_bn3;
  std::array<SageLayerT<T>, 3> sage;
  TensorT<T> elem_wa, elem_ba, elem_wb, elem_bb;
  TensorT<T> pred_w1, pred_w2, pred_w3;
  BatchNormT<T> pred_bn1, pred_bn2;

  static NetworkParamsT zeros();
  // uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights drawn from `seed`;
  // BN at gamma=1, beta=0, running stats (0, 1).
  static NetworkParamsT init(uint64_t seed);

  size_t parameter_count() const;  // learnable tensors only

  // Fixed enumeration order; also the checkpoint layout.
  template <class F>
  void visit_learnable(F&& f);
  template <class F>
  void visit_learnable(F&& f) const;
  template <class F>
  void visit_all(F&& f);  // learnable + BN running stats
  template <class F>
  void visit_all(F&& f) const;
};

using NetworkParams = NetworkParamsT<float>;

enum class Mode { train, eval };

// Disjoint union of graphs: nodes concatenated (graph g owns the contiguous
// range [graph_begin[g], graph_begin[g+1])), with a CSR view of incoming
// edges per destination node, sources ascending.
template <class T>
struct GraphBatchT {
  size_t n_nodes = 0;
  size_t n_graphs = 0;
  std::vector<T> features;  // n_nodes x 5
  std::vector<int32_t> graph_begin;
  std::vector<int32_t> in_offsets;
  std::vector<int32_t> in_sources;

  static GraphBatchT from_graphs(const std::vector<const GraspGraph*>& graphs);
};

using GraphBatch = GraphBatchT<float>;

template <class T>
struct BnTraceT {
  std::vector<T> mean, inv_std;  // batch stats (train) or running view (eval)
};

// Activations recorded by forward for the backward pass.
template <class T>
struct ForwardTraceT {
  Mode mode = Mode::eval;
  std::vector<T> enc_lin1, enc_act1, enc_lin2, enc_act2, enc_lin3, enc_out;
  BnTraceT<T> bn1, bn2, bn3;
  std::array<std::vector<T>, 3> sage_in;   // layer inputs
  std::array<std::vector<T>, 3> sage_agg;  // max-aggregated neighbor features
  std::array<std::vector<int32_t>, 3> sage_argmax;
  std::array<std::vector<T>, 3> sage_out;  // post-activation
  std::vector<T> elem_a, elem_b, elem_out;
  std::vector<T> pooled;  // n_graphs x 64
  std::vector<int32_t> pool_argmax;
  std::vector<T> pred_lin1, pred_act1, pred_lin2, pred_act2;
  BnTraceT<T> pbn1, pbn2;
  std::vector<T> scores;  // n_graphs
};

// Runs the full stack. Train mode normalizes with batch statistics and
// updates the running estimates in `params`; eval mode reads the running
// estimates and leaves params untouched. Scores are checked finite.
template <class T>
std::vector<T> forward_batch(NetworkParamsT<T>& params, const GraphBatchT<T>& batch,
                             Mode mode, ForwardTraceT<T>* trace = nullptr);

// MSE loss mean((s - target)^2) and gradients for every learnable tensor.
// Requires the trace of the matching forward call. Throws NumericError
// naming the offending graph when a score or target is non-finite.
template <class T>
T backward_mse(const NetworkParamsT<T>& params, const GraphBatchT<T>& batch,
               const ForwardTraceT<T>& trace, const std::vector<T>& targets,
               NetworkParamsT<T>& grads);

float forward_single(NetworkParams& params, const GraspGraph& graph, Mode mode);

// Lossless precision change, pairing tensors by visit order.
template <class U, class T>
NetworkParamsT<U> cast_params(const NetworkParamsT<T>& params);

}  // namespace gtg::nn

#include "gtg/nn/network_params_inl.hpp"

namespace gtg::nn {

template <class U, class T>
NetworkParamsT<U> cast_params(const NetworkParamsT<T>& params) {
  NetworkParamsT<U> out = NetworkParamsT<U>::zeros();
  std::vector<const TensorT<T>*> src;
  params.visit_all([&](const std::string&, const TensorT<T>& t) { src.push_back(&t); });
  size_t i = 0;
  out.visit_all([&](const std::string&, TensorT<U>& t) {
    for (size_t j = 0; j < t.size(); ++j) t.data[j] = U(src[i]->data[j]);
    ++i;
  });
  return out;
}

}  // namespace gtg::nn
