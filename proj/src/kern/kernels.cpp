#include "gtg/kern/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "gtg/error.hpp"

namespace gtg::kern {
namespace {

Backend pick_startup_backend() {
  if (const char* env = std::getenv("GTG_KERNEL_BACKEND")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && cpu_supports_avx2()) return Backend::avx2;
  }
  return cpu_supports_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<const detail::KernelTable*>& table_slot() {
  static std::atomic<const detail::KernelTable*> slot{
      pick_startup_backend() == Backend::avx2 ? &detail::avx2_table()
                                              : &detail::scalar_table()};
  return slot;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{pick_startup_backend()};
  return slot;
}

const detail::KernelTable& table() {
  return *table_slot().load(std::memory_order_relaxed);
}

}  // namespace

bool cpu_supports_avx2() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (b == Backend::avx2 && !cpu_supports_avx2())
    throw ConfigError("kernel backend avx2 requested but CPU lacks AVX2/FMA");
  backend_slot().store(b, std::memory_order_relaxed);
  table_slot().store(b == Backend::avx2 ? &detail::avx2_table()
                                        : &detail::scalar_table(),
                     std::memory_order_relaxed);
}

const char* backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

void axpy(float alpha, const float* x, float* y, size_t n) {
  table().axpy(alpha, x, y, n);
}
float dot(const float* a, const float* b, size_t n) { return table().dot(a, b, n); }
void vmax(const float* x, float* y, size_t n) { table().vmax(x, y, n); }
void vmax_arg(const float* x, float* y, int32_t* arg, int32_t idx, size_t n) {
  table().vmax_arg(x, y, arg, idx, n);
}
void relu(const float* x, float* y, size_t n) { table().relu(x, y, n); }
void relu_backward(const float* x, const float* dy, float* dx, size_t n) {
  table().relu_backward(x, dy, dx, n);
}
void adam_update(float* p, float* m, float* v, const float* g, size_t n, float lr_t,
                 float beta1, float beta2, float eps) {
  table().adam_update(p, m, v, g, n, lr_t, beta1, beta2, eps);
}
void gemm(const float* a, const float* b, float* c, size_t m, size_t k, size_t n,
          bool accumulate) {
  table().gemm(a, b, c, m, k, n, accumulate);
}

}  // namespace gtg::kern
