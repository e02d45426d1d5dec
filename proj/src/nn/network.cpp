#include "gtg/nn/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "gtg/error.hpp"
#include "gtg/kern/kernels.hpp"

namespace gtg::nn {
namespace {

constexpr double kBnEps = 1e-5;
constexpr double kBnMomentum = 0.1;

// float routes through the dispatched SIMD kernels; double uses plain loops
// (it only runs in tests as the finite-difference shadow).
template <class T>
struct Ops;

template <>
struct Ops<float> {
  static void gemm(const float* a, const float* b, float* c, size_t m, size_t k,
                   size_t n, bool acc) {
    kern::gemm(a, b, c, m, k, n, acc);
  }
  static void relu(const float* x, float* y, size_t n) { kern::relu(x, y, n); }
  static void relu_backward(const float* x, const float* dy, float* dx, size_t n) {
    kern::relu_backward(x, dy, dx, n);
  }
  static void vmax_arg(const float* x, float* y, int32_t* arg, int32_t idx,
                       size_t n) {
    kern::vmax_arg(x, y, arg, idx, n);
  }
  static void axpy(float a, const float* x, float* y, size_t n) {
    kern::axpy(a, x, y, n);
  }
};

template <>
struct Ops<double> {
  static void gemm(const double* a, const double* b, double* c, size_t m, size_t k,
                   size_t n, bool acc) {
    if (!acc) std::fill(c, c + m * n, 0.0);
    for (size_t i = 0; i < m; ++i) {
      const double* arow = a + i * k;
      double* crow = c + i * n;
      for (size_t kk = 0; kk < k; ++kk) {
        const double av = arow[kk];
        if (av == 0.0) continue;
        const double* brow = b + kk * n;
        for (size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
      }
    }
  }
  static void relu(const double* x, double* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
  }
  static void relu_backward(const double* x, const double* dy, double* dx,
                            size_t n) {
    for (size_t i = 0; i < n; ++i) dx[i] = x[i] > 0.0 ? dy[i] : 0.0;
  }
  static void vmax_arg(const double* x, double* y, int32_t* arg, int32_t idx,
                       size_t n) {
    for (size_t i = 0; i < n; ++i) {
      if (x[i] > y[i]) {
        y[i] = x[i];
        arg[i] = idx;
      }
    }
  }
  static void axpy(double a, const double* x, double* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] += a * x[i];
  }
};

template <class T>
void transpose(const T* src, T* dst, size_t rows, size_t cols) {
  for (size_t r = 0; r < rows; ++r)
    for (size_t c = 0; c < cols; ++c) dst[c * rows + r] = src[r * cols + c];
}

// y (N x out) = x (N x in) * W^T, W given row-major (out x in).
template <class T>
void linear_forward(const std::vector<T>& x, const TensorT<T>& w, std::vector<T>& y,
                    size_t n_rows, bool accumulate) {
  const size_t out = w.rows(), in = w.cols();
  std::vector<T> wt(in * out);
  transpose(w.ptr(), wt.data(), out, in);
  y.resize(n_rows * out);
  Ops<T>::gemm(x.data(), wt.data(), y.data(), n_rows, in, out, accumulate);
}

template <class T>
void add_row_bias(std::vector<T>& y, const TensorT<T>& bias, size_t n_rows) {
  const size_t d = bias.size();
  for (size_t i = 0; i < n_rows; ++i)
    Ops<T>::axpy(T(1), bias.ptr(), y.data() + i * d, d);
}

// dW (out x in) += dY^T (out x N) * X (N x in); dBias += column sums of dY.
template <class T>
void linear_backward_params(const std::vector<T>& x, const std::vector<T>& dy,
                            size_t n_rows, size_t in, size_t out, TensorT<T>& dw,
                            std::type_identity_t<TensorT<T>>* dbias) {
  std::vector<T> dyt(out * n_rows);
  transpose(dy.data(), dyt.data(), n_rows, out);
  Ops<T>::gemm(dyt.data(), x.data(), dw.ptr(), out, n_rows, in, true);
  if (dbias)
    for (size_t i = 0; i < n_rows; ++i)
      Ops<T>::axpy(T(1), dy.data() + i * out, dbias->ptr(), out);
}

// dX (N x in) += dY (N x out) * W (out x in).
template <class T>
void linear_backward_input(const std::vector<T>& dy, const TensorT<T>& w,
                           std::vector<T>& dx, size_t n_rows, bool accumulate) {
  dx.resize(n_rows * w.cols());
  Ops<T>::gemm(dy.data(), w.ptr(), dx.data(), n_rows, w.rows(), w.cols(), accumulate);
}

template <class T>
void batchnorm_forward(BatchNormT<T>& bn, const std::vector<T>& x, std::vector<T>& y,
                       size_t n_rows, Mode mode, BnTraceT<T>& trace) {
  const size_t d = bn.gamma.size();
  trace.mean.assign(d, T(0));
  trace.inv_std.assign(d, T(0));
  y.resize(n_rows * d);

  if (mode == Mode::train) {
    for (size_t i = 0; i < n_rows; ++i)
      for (size_t j = 0; j < d; ++j) trace.mean[j] += x[i * d + j];
    for (size_t j = 0; j < d; ++j) trace.mean[j] /= T(n_rows);

    std::vector<T> var(d, T(0));
    for (size_t i = 0; i < n_rows; ++i)
      for (size_t j = 0; j < d; ++j) {
        const T c = x[i * d + j] - trace.mean[j];
        var[j] += c * c;
      }
    for (size_t j = 0; j < d; ++j) var[j] /= T(n_rows);

    for (size_t j = 0; j < d; ++j)
      trace.inv_std[j] = T(1) / std::sqrt(var[j] + T(kBnEps));

    // Running estimates track the batch stats; variance uses the unbiased
    // form, matching the usual BN convention.
    const T unbias = n_rows > 1 ? T(n_rows) / T(n_rows - 1) : T(1);
    for (size_t j = 0; j < d; ++j) {
      bn.running_mean.data[j] =
          T(1 - kBnMomentum) * bn.running_mean.data[j] + T(kBnMomentum) * trace.mean[j];
      bn.running_var.data[j] = T(1 - kBnMomentum) * bn.running_var.data[j] +
                               T(kBnMomentum) * var[j] * unbias;
    }
  } else {
    for (size_t j = 0; j < d; ++j) {
      trace.mean[j] = bn.running_mean.data[j];
      trace.inv_std[j] = T(1) / std::sqrt(bn.running_var.data[j] + T(kBnEps));
    }
  }

  for (size_t i = 0; i < n_rows; ++i)
    for (size_t j = 0; j < d; ++j)
      y[i * d + j] = bn.gamma.data[j] * (x[i * d + j] - trace.mean[j]) *
                         trace.inv_std[j] +
                     bn.beta.data[j];
}

template <class T>
void batchnorm_backward(const BatchNormT<T>& bn, const std::vector<T>& x,
                        const std::vector<T>& dy, std::vector<T>& dx, size_t n_rows,
                        Mode mode, const BnTraceT<T>& trace, BatchNormT<T>& grads) {
  const size_t d = bn.gamma.size();
  dx.resize(n_rows * d);

  std::vector<T> sum_dy(d, T(0)), sum_dy_xhat(d, T(0));
  for (size_t i = 0; i < n_rows; ++i)
    for (size_t j = 0; j < d; ++j) {
      const T xhat = (x[i * d + j] - trace.mean[j]) * trace.inv_std[j];
      sum_dy[j] += dy[i * d + j];
      sum_dy_xhat[j] += dy[i * d + j] * xhat;
    }
  for (size_t j = 0; j < d; ++j) {
    grads.gamma.data[j] += sum_dy_xhat[j];
    grads.beta.data[j] += sum_dy[j];
  }

  if (mode == Mode::train) {
    const T inv_n = T(1) / T(n_rows);
    for (size_t i = 0; i < n_rows; ++i)
      for (size_t j = 0; j < d; ++j) {
        const T xhat = (x[i * d + j] - trace.mean[j]) * trace.inv_std[j];
        dx[i * d + j] = bn.gamma.data[j] * trace.inv_std[j] *
                        (dy[i * d + j] - sum_dy[j] * inv_n - xhat * sum_dy_xhat[j] * inv_n);
      }
  } else {
    for (size_t i = 0; i < n_rows; ++i)
      for (size_t j = 0; j < d; ++j)
        dx[i * d + j] = dy[i * d + j] * bn.gamma.data[j] * trace.inv_std[j];
  }
}

// Element-wise max over each node's incoming sources; empty neighborhoods
// aggregate to the zero vector. Argmax ties keep the lowest source id
// (sources are stored ascending and updates use strict greater-than).
template <class T>
void aggregate_max(const GraphBatchT<T>& batch, const std::vector<T>& h,
                   std::vector<T>& agg, std::vector<int32_t>& argmax) {
  const size_t d = kHidden;
  agg.assign(batch.n_nodes * d, T(0));
  argmax.assign(batch.n_nodes * d, -1);
  for (size_t i = 0; i < batch.n_nodes; ++i) {
    const int32_t begin = batch.in_offsets[i], end = batch.in_offsets[i + 1];
    if (begin == end) continue;
    T* arow = agg.data() + i * d;
    int32_t* amrow = argmax.data() + i * d;
    const int32_t first = batch.in_sources[size_t(begin)];
    std::memcpy(arow, h.data() + size_t(first) * d, d * sizeof(T));
    std::fill(amrow, amrow + d, first);
    for (int32_t e = begin + 1; e < end; ++e) {
      const int32_t src = batch.in_sources[size_t(e)];
      Ops<T>::vmax_arg(h.data() + size_t(src) * d, arow, amrow, src, d);
    }
  }
}

template <class T>
void check_finite_scores(const std::vector<T>& scores, const char* where) {
  for (size_t g = 0; g < scores.size(); ++g)
    if (!std::isfinite(double(scores[g])))
      throw NumericError(std::string(where) + ": non-finite score for graph " +
                         std::to_string(g));
}

}  // namespace

template <class T>
GraphBatchT<T> GraphBatchT<T>::from_graphs(const std::vector<const GraspGraph*>& graphs) {
  GraphBatchT<T> batch;
  batch.n_graphs = graphs.size();
  batch.graph_begin.resize(graphs.size() + 1, 0);
  for (size_t g = 0; g < graphs.size(); ++g) {
    if (graphs[g]->n_nodes() == 0) throw DataError("batch contains an empty graph");
    batch.graph_begin[g + 1] = batch.graph_begin[g] + int32_t(graphs[g]->n_nodes());
  }
  batch.n_nodes = size_t(batch.graph_begin.back());

  batch.features.resize(batch.n_nodes * kInputDim);
  size_t at = 0;
  for (const GraspGraph* graph : graphs) {
    for (float v : graph->node_features) batch.features[at++] = T(v);
  }

  // CSR of incoming edges, sources ascending within each destination.
  std::vector<int32_t> counts(batch.n_nodes, 0);
  for (size_t g = 0; g < graphs.size(); ++g)
    for (uint32_t dst : graphs[g]->edge_dst)
      ++counts[size_t(batch.graph_begin[g] + int32_t(dst))];
  batch.in_offsets.resize(batch.n_nodes + 1, 0);
  for (size_t i = 0; i < batch.n_nodes; ++i)
    batch.in_offsets[i + 1] = batch.in_offsets[i] + counts[i];
  batch.in_sources.resize(size_t(batch.in_offsets.back()));
  std::vector<int32_t> cursor(batch.in_offsets.begin(), batch.in_offsets.end() - 1);
  for (size_t g = 0; g < graphs.size(); ++g) {
    const int32_t off = batch.graph_begin[g];
    const auto& gr = *graphs[g];
    for (size_t e = 0; e < gr.n_edges(); ++e) {
      const size_t dst = size_t(off + int32_t(gr.edge_dst[e]));
      batch.in_sources[size_t(cursor[dst]++)] = off + int32_t(gr.edge_src[e]);
    }
  }
  for (size_t i = 0; i < batch.n_nodes; ++i)
    std::sort(batch.in_sources.begin() + batch.in_offsets[i],
              batch.in_sources.begin() + batch.in_offsets[i + 1]);
  return batch;
}

template <class T>
std::vector<T> forward_batch(NetworkParamsT<T>& params, const GraphBatchT<T>& batch,
                             Mode mode, ForwardTraceT<T>* trace_out) {
  if (batch.n_graphs == 0) throw DataError("forward on an empty batch");
  ForwardTraceT<T> local;
  ForwardTraceT<T>& tr = trace_out ? *trace_out : local;
  tr.mode = mode;
  const size_t n = batch.n_nodes;
  const size_t h = kHidden;

  // Encoder: (linear -> BN -> ReLU) x2, then linear -> BN.
  linear_forward(batch.features, params.enc_w1, tr.enc_lin1, n, false);
  batchnorm_forward(params.enc_bn1, tr.enc_lin1, tr.enc_act1, n, mode, tr.bn1);
  Ops<T>::relu(tr.enc_act1.data(), tr.enc_act1.data(), tr.enc_act1.size());
  linear_forward(tr.enc_act1, params.enc_w2, tr.enc_lin2, n, false);
  batchnorm_forward(params.enc_bn2, tr.enc_lin2, tr.enc_act2, n, mode, tr.bn2);
  Ops<T>::relu(tr.enc_act2.data(), tr.enc_act2.data(), tr.enc_act2.size());
  linear_forward(tr.enc_act2, params.enc_w3, tr.enc_lin3, n, false);
  batchnorm_forward(params.enc_bn3, tr.enc_lin3, tr.enc_out, n, mode, tr.bn3);

  // Three SAGE convolutions; ReLU between stacked layers, none after the last.
  const std::vector<T>* hin = &tr.enc_out;
  for (size_t l = 0; l < 3; ++l) {
    tr.sage_in[l] = *hin;
    aggregate_max(batch, tr.sage_in[l], tr.sage_agg[l], tr.sage_argmax[l]);
    linear_forward(tr.sage_in[l], params.sage[l].w_self, tr.sage_out[l], n, false);
    std::vector<T> neigh_term;
    linear_forward(tr.sage_agg[l], params.sage[l].w_neigh, neigh_term, n, false);
    Ops<T>::axpy(T(1), neigh_term.data(), tr.sage_out[l].data(), n * h);
    add_row_bias(tr.sage_out[l], params.sage[l].bias, n);
    if (l < 2)
      Ops<T>::relu(tr.sage_out[l].data(), tr.sage_out[l].data(), tr.sage_out[l].size());
    hin = &tr.sage_out[l];
  }

  // Per-node affine refinement out = a(h) . h + b(h).
  const std::vector<T>& he = tr.sage_out[2];
  linear_forward(he, params.elem_wa, tr.elem_a, n, false);
  add_row_bias(tr.elem_a, params.elem_ba, n);
  linear_forward(he, params.elem_wb, tr.elem_b, n, false);
  add_row_bias(tr.elem_b, params.elem_bb, n);
  tr.elem_out.resize(n * h);
  for (size_t i = 0; i < n * h; ++i)
    tr.elem_out[i] = tr.elem_a[i] * he[i] + tr.elem_b[i];

  // Global max pooling per graph.
  tr.pooled.assign(batch.n_graphs * h, T(0));
  tr.pool_argmax.assign(batch.n_graphs * h, -1);
  for (size_t g = 0; g < batch.n_graphs; ++g) {
    const int32_t begin = batch.graph_begin[g], end = batch.graph_begin[g + 1];
    T* prow = tr.pooled.data() + g * h;
    int32_t* arow = tr.pool_argmax.data() + g * h;
    std::memcpy(prow, tr.elem_out.data() + size_t(begin) * h, h * sizeof(T));
    std::fill(arow, arow + h, begin);
    for (int32_t i = begin + 1; i < end; ++i)
      Ops<T>::vmax_arg(tr.elem_out.data() + size_t(i) * h, prow, arow, i, h);
  }

  // Predictor MLP over pooled graph descriptors.
  const size_t gct = batch.n_graphs;
  linear_forward(tr.pooled, params.pred_w1, tr.pred_lin1, gct, false);
  batchnorm_forward(params.pred_bn1, tr.pred_lin1, tr.pred_act1, gct, mode, tr.pbn1);
  Ops<T>::relu(tr.pred_act1.data(), tr.pred_act1.data(), tr.pred_act1.size());
  linear_forward(tr.pred_act1, params.pred_w2, tr.pred_lin2, gct, false);
  batchnorm_forward(params.pred_bn2, tr.pred_lin2, tr.pred_act2, gct, mode, tr.pbn2);
  Ops<T>::relu(tr.pred_act2.data(), tr.pred_act2.data(), tr.pred_act2.size());
  linear_forward(tr.pred_act2, params.pred_w3, tr.scores, gct, false);

  check_finite_scores(tr.scores, "forward");
  return tr.scores;
}

template <class T>
T backward_mse(const NetworkParamsT<T>& params, const GraphBatchT<T>& batch,
               const ForwardTraceT<T>& tr, const std::vector<T>& targets,
               NetworkParamsT<T>& grads) {
  const size_t gct = batch.n_graphs;
  if (targets.size() != gct) throw DataError("target count != graph count");
  if (grads.enc_w1.size() == 0) grads = NetworkParamsT<T>::zeros();
  grads.visit_learnable([](const std::string&, TensorT<T>& t) { t.fill(T(0)); });

  check_finite_scores(tr.scores, "backward");
  T loss = T(0);
  std::vector<T> dscores(gct);
  for (size_t g = 0; g < gct; ++g) {
    if (!std::isfinite(double(targets[g])))
      throw NumericError("backward: non-finite target for graph " + std::to_string(g));
    const T r = tr.scores[g] - targets[g];
    loss += r * r;
    dscores[g] = T(2) * r / T(gct);
  }
  loss /= T(gct);
  if (!std::isfinite(double(loss))) throw NumericError("backward: non-finite loss");

  const size_t n = batch.n_nodes;
  const size_t h = kHidden;
  const Mode mode = tr.mode;

  // Predictor.
  std::vector<T> d_act2;
  linear_backward_params(tr.pred_act2, dscores, gct, 128, 1, grads.pred_w3, nullptr);
  linear_backward_input(dscores, params.pred_w3, d_act2, gct, false);
  std::vector<T> d_lin2(gct * 128);
  Ops<T>::relu_backward(tr.pred_act2.data(), d_act2.data(), d_act2.data(),
                        d_act2.size());
  batchnorm_backward(params.pred_bn2, tr.pred_lin2, d_act2, d_lin2, gct, mode,
                     tr.pbn2, grads.pred_bn2);
  std::vector<T> d_act1;
  linear_backward_params(tr.pred_act1, d_lin2, gct, 256, 128, grads.pred_w2, nullptr);
  linear_backward_input(d_lin2, params.pred_w2, d_act1, gct, false);
  std::vector<T> d_lin1(gct * 256);
  Ops<T>::relu_backward(tr.pred_act1.data(), d_act1.data(), d_act1.data(),
                        d_act1.size());
  batchnorm_backward(params.pred_bn1, tr.pred_lin1, d_act1, d_lin1, gct, mode,
                     tr.pbn1, grads.pred_bn1);
  std::vector<T> d_pooled;
  linear_backward_params(tr.pooled, d_lin1, gct, h, 256, grads.pred_w1, nullptr);
  linear_backward_input(d_lin1, params.pred_w1, d_pooled, gct, false);

  // Un-pool: gradient routes to each feature's argmax node.
  std::vector<T> d_elem_out(n * h, T(0));
  for (size_t g = 0; g < gct; ++g)
    for (size_t j = 0; j < h; ++j) {
      const int32_t src = tr.pool_argmax[g * h + j];
      d_elem_out[size_t(src) * h + j] += d_pooled[g * h + j];
    }

  // Element-wise transform.
  const std::vector<T>& he = tr.sage_out[2];
  std::vector<T> d_a(n * h), d_b(n * h), d_he(n * h);
  for (size_t i = 0; i < n * h; ++i) {
    d_a[i] = d_elem_out[i] * he[i];
    d_b[i] = d_elem_out[i];
    d_he[i] = d_elem_out[i] * tr.elem_a[i];
  }
  linear_backward_params(he, d_a, n, h, h, grads.elem_wa, &grads.elem_ba);
  linear_backward_params(he, d_b, n, h, h, grads.elem_wb, &grads.elem_bb);
  std::vector<T> d_tmp;
  linear_backward_input(d_a, params.elem_wa, d_tmp, n, false);
  Ops<T>::axpy(T(1), d_tmp.data(), d_he.data(), n * h);
  linear_backward_input(d_b, params.elem_wb, d_tmp, n, false);
  Ops<T>::axpy(T(1), d_tmp.data(), d_he.data(), n * h);

  // SAGE stack, last layer first.
  std::vector<T> d_out = std::move(d_he);
  for (size_t li = 3; li-- > 0;) {
    if (li < 2)
      Ops<T>::relu_backward(tr.sage_out[li].data(), d_out.data(), d_out.data(),
                            d_out.size());
    linear_backward_params(tr.sage_in[li], d_out, n, h, h, grads.sage[li].w_self,
                           &grads.sage[li].bias);
    linear_backward_params(tr.sage_agg[li], d_out, n, h, h, grads.sage[li].w_neigh,
                           nullptr);
    std::vector<T> d_in;
    linear_backward_input(d_out, params.sage[li].w_self, d_in, n, false);
    std::vector<T> d_agg;
    linear_backward_input(d_out, params.sage[li].w_neigh, d_agg, n, false);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < h; ++j) {
        const int32_t src = tr.sage_argmax[li][i * h + j];
        if (src >= 0) d_in[size_t(src) * h + j] += d_agg[i * h + j];
      }
    d_out = std::move(d_in);
  }

  // Encoder.
  std::vector<T> d_lin3(n * h);
  batchnorm_backward(params.enc_bn3, tr.enc_lin3, d_out, d_lin3, n, mode, tr.bn3,
                     grads.enc_bn3);
  std::vector<T> d_act2e;
  linear_backward_params(tr.enc_act2, d_lin3, n, 2 * h, h, grads.enc_w3, nullptr);
  linear_backward_input(d_lin3, params.enc_w3, d_act2e, n, false);
  Ops<T>::relu_backward(tr.enc_act2.data(), d_act2e.data(), d_act2e.data(),
                        d_act2e.size());
  std::vector<T> d_lin2e(n * 2 * h);
  batchnorm_backward(params.enc_bn2, tr.enc_lin2, d_act2e, d_lin2e, n, mode, tr.bn2,
                     grads.enc_bn2);
  std::vector<T> d_act1e;
  linear_backward_params(tr.enc_act1, d_lin2e, n, h, 2 * h, grads.enc_w2, nullptr);
  linear_backward_input(d_lin2e, params.enc_w2, d_act1e, n, false);
  Ops<T>::relu_backward(tr.enc_act1.data(), d_act1e.data(), d_act1e.data(),
                        d_act1e.size());
  std::vector<T> d_lin1e(n * h);
  batchnorm_backward(params.enc_bn1, tr.enc_lin1, d_act1e, d_lin1e, n, mode, tr.bn1,
                     grads.enc_bn1);
  linear_backward_params(batch.features, d_lin1e, n, kInputDim, h, grads.enc_w1,
                         nullptr);
  return loss;
}

float forward_single(NetworkParams& params, const GraspGraph& graph, Mode mode) {
  const GraphBatch batch = GraphBatch::from_graphs({&graph});
  return forward_batch(params, batch, mode).at(0);
}

template struct GraphBatchT<float>;
template struct GraphBatchT<double>;

template std::vector<float> forward_batch<float>(NetworkParamsT<float>&,
                                                 const GraphBatchT<float>&, Mode,
                                                 ForwardTraceT<float>*);
template std::vector<double> forward_batch<double>(NetworkParamsT<double>&,
                                                   const GraphBatchT<double>&, Mode,
                                                   ForwardTraceT<double>*);
template float backward_mse<float>(const NetworkParamsT<float>&,
                                   const GraphBatchT<float>&,
                                   const ForwardTraceT<float>&,
                                   const std::vector<float>&, NetworkParamsT<float>&);
template double backward_mse<double>(const NetworkParamsT<double>&,
                                     const GraphBatchT<double>&,
                                     const ForwardTraceT<double>&,
                                     const std::vector<double>&,
                                     NetworkParamsT<double>&);

}  // namespace gtg::nn
