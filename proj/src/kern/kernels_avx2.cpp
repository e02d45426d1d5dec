#include <immintrin.h>

#include <cmath>
#include <cstring>

#include "gtg/kern/kernels.hpp"

namespace gtg::kern::detail {
namespace {

void axpy_avx2(float alpha, const float* x, float* y, size_t n) {
  const __m256 va = _mm256_set1_ps(alpha);
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 vy = _mm256_loadu_ps(y + i);
    vy = _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), vy);
    _mm256_storeu_ps(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

float hsum(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  __m128 s = _mm_add_ps(lo, hi);
  s = _mm_add_ps(s, _mm_movehl_ps(s, s));
  s = _mm_add_ss(s, _mm_shuffle_ps(s, s, 1));
  return _mm_cvtss_f32(s);
}

float dot_avx2(const float* a, const float* b, size_t n) {
  __m256 acc0 = _mm256_setzero_ps();
  __m256 acc1 = _mm256_setzero_ps();
  size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
    acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 8), _mm256_loadu_ps(b + i + 8),
                           acc1);
  }
  for (; i + 8 <= n; i += 8)
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
  float s = hsum(_mm256_add_ps(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void vmax_avx2(const float* x, float* y, size_t n) {
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 vy = _mm256_loadu_ps(y + i);
    const __m256 vx = _mm256_loadu_ps(x + i);
    _mm256_storeu_ps(y + i, _mm256_max_ps(vy, vx));
  }
  for (; i < n; ++i) y[i] = x[i] > y[i] ? x[i] : y[i];
}

void vmax_arg_avx2(const float* x, float* y, int32_t* arg, int32_t idx, size_t n) {
  const __m256i vidx = _mm256_set1_epi32(idx);
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 vx = _mm256_loadu_ps(x + i);
    const __m256 vy = _mm256_loadu_ps(y + i);
    const __m256 gt = _mm256_cmp_ps(vx, vy, _CMP_GT_OQ);
    _mm256_storeu_ps(y + i, _mm256_blendv_ps(vy, vx, gt));
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(arg + i));
    const __m256i sel = _mm256_blendv_epi8(va, vidx, _mm256_castps_si256(gt));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(arg + i), sel);
  }
  for (; i < n; ++i) {
    if (x[i] > y[i]) {
      y[i] = x[i];
      arg[i] = idx;
    }
  }
}

void relu_avx2(const float* x, float* y, size_t n) {
  const __m256 zero = _mm256_setzero_ps();
  size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i, _mm256_max_ps(_mm256_loadu_ps(x + i), zero));
  for (; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

void relu_backward_avx2(const float* x, const float* dy, float* dx, size_t n) {
  const __m256 zero = _mm256_setzero_ps();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 mask = _mm256_cmp_ps(_mm256_loadu_ps(x + i), zero, _CMP_GT_OQ);
    _mm256_storeu_ps(dx + i, _mm256_and_ps(_mm256_loadu_ps(dy + i), mask));
  }
  for (; i < n; ++i) dx[i] = x[i] > 0.0f ? dy[i] : 0.0f;
}

void adam_update_avx2(float* p, float* m, float* v, const float* g, size_t n,
                      float lr_t, float beta1, float beta2, float eps) {
  const __m256 vb1 = _mm256_set1_ps(beta1);
  const __m256 vb2 = _mm256_set1_ps(beta2);
  const __m256 vub1 = _mm256_set1_ps(1.0f - beta1);
  const __m256 vub2 = _mm256_set1_ps(1.0f - beta2);
  const __m256 vlr = _mm256_set1_ps(lr_t);
  const __m256 veps = _mm256_set1_ps(eps);
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 vg = _mm256_loadu_ps(g + i);
    __m256 vm = _mm256_add_ps(_mm256_mul_ps(vb1, _mm256_loadu_ps(m + i)),
                              _mm256_mul_ps(vub1, vg));
    __m256 vv = _mm256_add_ps(_mm256_mul_ps(vb2, _mm256_loadu_ps(v + i)),
                              _mm256_mul_ps(vub2, _mm256_mul_ps(vg, vg)));
    _mm256_storeu_ps(m + i, vm);
    _mm256_storeu_ps(v + i, vv);
    const __m256 denom = _mm256_add_ps(_mm256_sqrt_ps(vv), veps);
    const __m256 step = _mm256_div_ps(_mm256_mul_ps(vlr, vm), denom);
    _mm256_storeu_ps(p + i, _mm256_sub_ps(_mm256_loadu_ps(p + i), step));
  }
  for (; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0f - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0f - beta2) * g[i] * g[i];
    p[i] -= lr_t * m[i] / (std::sqrt(v[i]) + eps);
  }
}

// Register-blocked row accumulation: a 64-wide slice of the C row stays in
// eight ymm accumulators while K streams through with FMA broadcasts.
template <int VECS>
inline void gemm_row_panel(const float* arow, const float* b, float* crow,
                           size_t k, size_t n, size_t j0, bool accumulate) {
  __m256 acc[VECS];
  for (int v = 0; v < VECS; ++v)
    acc[v] = accumulate ? _mm256_loadu_ps(crow + j0 + size_t(v) * 8)
                        : _mm256_setzero_ps();
  for (size_t kk = 0; kk < k; ++kk) {
    const __m256 av = _mm256_set1_ps(arow[kk]);
    const float* brow = b + kk * n + j0;
    for (int v = 0; v < VECS; ++v)
      acc[v] = _mm256_fmadd_ps(av, _mm256_loadu_ps(brow + size_t(v) * 8), acc[v]);
  }
  for (int v = 0; v < VECS; ++v)
    _mm256_storeu_ps(crow + j0 + size_t(v) * 8, acc[v]);
}

void gemm_avx2(const float* a, const float* b, float* c, size_t m, size_t k,
               size_t n, bool accumulate) {
  for (size_t i = 0; i < m; ++i) {
    const float* arow = a + i * k;
    float* crow = c + i * n;
    size_t j = 0;
    for (; j + 64 <= n; j += 64) gemm_row_panel<8>(arow, b, crow, k, n, j, accumulate);
    for (; j + 32 <= n; j += 32) gemm_row_panel<4>(arow, b, crow, k, n, j, accumulate);
    for (; j + 8 <= n; j += 8) gemm_row_panel<1>(arow, b, crow, k, n, j, accumulate);
    if (j < n) {
      for (size_t jj = j; jj < n; ++jj) {
        float s = accumulate ? crow[jj] : 0.0f;
        for (size_t kk = 0; kk < k; ++kk) s += arow[kk] * b[kk * n + jj];
        crow[jj] = s;
      }
    }
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable t = {axpy_avx2,          dot_avx2,
                                vmax_avx2,          vmax_arg_avx2,
                                relu_avx2,          relu_backward_avx2,
                                adam_update_avx2,   gemm_avx2};
  return t;
}

}  // namespace gtg::kern::detail
