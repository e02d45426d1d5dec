#include <cmath>
#include <cstring>

#include "gtg/kern/kernels.hpp"

namespace gtg::kern::detail {
namespace {

void axpy_scalar(float alpha, const float* x, float* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

float dot_scalar(const float* a, const float* b, size_t n) {
  float s = 0.0f;
  for (size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void vmax_scalar(const float* x, float* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] = x[i] > y[i] ? x[i] : y[i];
}

void vmax_arg_scalar(const float* x, float* y, int32_t* arg, int32_t idx, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    if (x[i] > y[i]) {
      y[i] = x[i];
      arg[i] = idx;
    }
  }
}

void relu_scalar(const float* x, float* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

void relu_backward_scalar(const float* x, const float* dy, float* dx, size_t n) {
  for (size_t i = 0; i < n; ++i) dx[i] = x[i] > 0.0f ? dy[i] : 0.0f;
}

void adam_update_scalar(float* p, float* m, float* v, const float* g, size_t n,
                        float lr_t, float beta1, float beta2, float eps) {
  for (size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0f - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0f - beta2) * g[i] * g[i];
    p[i] -= lr_t * m[i] / (std::sqrt(v[i]) + eps);
  }
}

// Row-wise accumulation form: C_i += sum_k A[i][k] * B_row_k. Streams B rows
// contiguously; the compiler auto-vectorizes the inner loop.
void gemm_scalar(const float* a, const float* b, float* c, size_t m, size_t k,
                 size_t n, bool accumulate) {
  if (!accumulate) std::memset(c, 0, m * n * sizeof(float));
  for (size_t i = 0; i < m; ++i) {
    const float* arow = a + i * k;
    float* crow = c + i * n;
    for (size_t kk = 0; kk < k; ++kk) {
      const float av = arow[kk];
      if (av == 0.0f) continue;
      const float* brow = b + kk * n;
      for (size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t = {axpy_scalar,          dot_scalar,
                                vmax_scalar,          vmax_arg_scalar,
                                relu_scalar,          relu_backward_scalar,
                                adam_update_scalar,   gemm_scalar};
  return t;
}

}  // namespace gtg::kern::detail
