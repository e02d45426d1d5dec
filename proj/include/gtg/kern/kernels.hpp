#pragma once

#include <cstddef>
#include <cstdint>

// Dense float kernels backing the network engine and the geometry sweeps.
// Every kernel has a scalar reference implementation and an AVX2+FMA variant;
// the active backend is chosen once at startup (env GTG_KERNEL_BACKEND or
// CPU detection) and can be overridden for tests. The scalar path is the
// semantic reference: SIMD variants are equivalence-tested against it.
namespace gtg::kern {

enum class Backend { scalar, avx2 };

Backend active_backend();
// Throws ConfigError if the requested backend is unsupported on this CPU.
void set_backend(Backend b);
bool cpu_supports_avx2();
const char* backend_name(Backend b);

// y += alpha * x
void axpy(float alpha, const float* x, float* y, size_t n);
// sum_i a[i] * b[i]
float dot(const float* a, const float* b, size_t n);
// y = max(y, x) element-wise
void vmax(const float* x, float* y, size_t n);
// Element-wise running max with argmax tracking: where x[i] > y[i], set
// y[i] = x[i] and arg[i] = idx. Ties keep the earlier index.
void vmax_arg(const float* x, float* y, int32_t* arg, int32_t idx, size_t n);
// y = max(x, 0)
void relu(const float* x, float* y, size_t n);
// dx = dy where x > 0 else 0
void relu_backward(const float* x, const float* dy, float* dx, size_t n);
// Adam with bias correction folded into lr_t = lr * sqrt(1-b2^t) / (1-b1^t).
void adam_update(float* p, float* m, float* v, const float* g, size_t n,
                 float lr_t, float beta1, float beta2, float eps);
// C (+)= A * B with A: MxK, B: KxN, C: MxN, all row-major contiguous.
// accumulate=false zeroes C first.
void gemm(const float* a, const float* b, float* c, size_t m, size_t k, size_t n,
          bool accumulate);

namespace detail {
struct KernelTable {
  void (*axpy)(float, const float*, float*, size_t);
  float (*dot)(const float*, const float*, size_t);
  void (*vmax)(const float*, float*, size_t);
  void (*vmax_arg)(const float*, float*, int32_t*, int32_t, size_t);
  void (*relu)(const float*, float*, size_t);
  void (*relu_backward)(const float*, const float*, float*, size_t);
  void (*adam_update)(float*, float*, float*, const float*, size_t, float, float,
                      float, float);
  void (*gemm)(const float*, const float*, float*, size_t, size_t, size_t, bool);
};
const KernelTable& scalar_table();
const KernelTable& avx2_table();
}  // namespace detail

}  // namespace gtg::kern
