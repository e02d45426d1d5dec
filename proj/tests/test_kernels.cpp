#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gtg/kern/kernels.hpp"
#include "gtg/rng.hpp"

using namespace gtg;

namespace {

std::vector<float> random_vec(Rng& rng, size_t n, double scale = 1.0) {
  std::vector<float> v(n);
  for (auto& x : v) x = float(rng.uniform(-scale, scale));
  return v;
}

double max_rel_err(const std::vector<float>& a, const std::vector<float>& b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({1.0, std::abs(double(a[i])), std::abs(double(b[i]))});
    worst = std::max(worst, std::abs(double(a[i]) - double(b[i])) / denom);
  }
  return worst;
}

struct BackendGuard {
  kern::Backend saved = kern::active_backend();
  ~BackendGuard() { kern::set_backend(saved); }
};

}  // namespace

TEST_CASE("gemm matches a naive triple loop") {
  Rng rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    const size_t m = 1 + rng.next_below(40);
    const size_t k = 1 + rng.next_below(70);
    const size_t n = 1 + rng.next_below(150);
    const auto a = random_vec(rng, m * k);
    const auto b = random_vec(rng, k * n);
    auto c0 = random_vec(rng, m * n);
    auto c = c0;

    std::vector<float> expected(m * n);
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < n; ++j) {
        double s = double(c0[i * n + j]);
        for (size_t kk = 0; kk < k; ++kk)
          s += double(a[i * k + kk]) * double(b[kk * n + j]);
        expected[i * n + j] = float(s);
      }

    kern::gemm(a.data(), b.data(), c.data(), m, k, n, true);
    CHECK(max_rel_err(c, expected) < 1e-5);

    kern::gemm(a.data(), b.data(), c.data(), m, k, n, false);
    for (size_t i = 0; i < m * n; ++i) expected[i] -= c0[i];
    CHECK(max_rel_err(c, expected) < 1e-5);
  }
}

TEST_CASE("scalar and avx2 backends agree") {
  if (!kern::cpu_supports_avx2()) return;
  BackendGuard guard;
  Rng rng(22);

  for (int trial = 0; trial < 16; ++trial) {
    const size_t n = 1 + rng.next_below(300);
    const auto x = random_vec(rng, n);
    const auto y0 = random_vec(rng, n);
    const float alpha = float(rng.uniform(-2.0, 2.0));

    auto ys = y0;
    auto yv = y0;
    kern::set_backend(kern::Backend::scalar);
    kern::axpy(alpha, x.data(), ys.data(), n);
    const float dot_s = kern::dot(x.data(), y0.data(), n);
    kern::set_backend(kern::Backend::avx2);
    kern::axpy(alpha, x.data(), yv.data(), n);
    const float dot_v = kern::dot(x.data(), y0.data(), n);
    CHECK(max_rel_err(ys, yv) < 1e-6);
    CHECK(std::abs(double(dot_s) - double(dot_v)) <
          1e-5 * std::max(1.0, std::abs(double(dot_s))));

    // Order-preserving ops must agree bit-exactly.
    auto ms = y0;
    auto mv = y0;
    std::vector<int32_t> args(n, -1), argv(n, -1);
    kern::set_backend(kern::Backend::scalar);
    kern::vmax_arg(x.data(), ms.data(), args.data(), 7, n);
    std::vector<float> rs(n);
    kern::relu(x.data(), rs.data(), n);
    kern::set_backend(kern::Backend::avx2);
    kern::vmax_arg(x.data(), mv.data(), argv.data(), 7, n);
    std::vector<float> rv(n);
    kern::relu(x.data(), rv.data(), n);
    CHECK(ms == mv);
    CHECK(args == argv);
    CHECK(rs == rv);
  }

  // GEMM equivalence across the panel widths (64/32/8/tail).
  for (size_t n : {1ul, 5ul, 8ul, 33ul, 64ul, 100ul, 130ul, 256ul}) {
    const size_t m = 17, k = 31;
    const auto a = random_vec(rng, m * k);
    const auto b = random_vec(rng, k * n);
    std::vector<float> cs(m * n), cv(m * n);
    kern::set_backend(kern::Backend::scalar);
    kern::gemm(a.data(), b.data(), cs.data(), m, k, n, false);
    kern::set_backend(kern::Backend::avx2);
    kern::gemm(a.data(), b.data(), cv.data(), m, k, n, false);
    CHECK(max_rel_err(cs, cv) < 1e-5);
  }

  // Adam: same trajectory over several steps on both backends.
  const size_t n = 133;
  auto ps = random_vec(rng, n), pv = ps;
  std::vector<float> m_s(n, 0), v_s(n, 0), m_v(n, 0), v_v(n, 0);
  for (int step = 1; step <= 5; ++step) {
    const auto g = random_vec(rng, n);
    kern::set_backend(kern::Backend::scalar);
    kern::adam_update(ps.data(), m_s.data(), v_s.data(), g.data(), n, 0.01f, 0.9f,
                      0.999f, 1e-8f);
    kern::set_backend(kern::Backend::avx2);
    kern::adam_update(pv.data(), m_v.data(), v_v.data(), g.data(), n, 0.01f, 0.9f,
                      0.999f, 1e-8f);
  }
  CHECK(max_rel_err(ps, pv) < 1e-5);
}

TEST_CASE("vmax_arg keeps the earliest index on ties") {
  BackendGuard guard;
  const std::vector<float> a = {1.0f, 2.0f, 3.0f};
  for (auto backend : {kern::Backend::scalar, kern::Backend::avx2}) {
    if (backend == kern::Backend::avx2 && !kern::cpu_supports_avx2()) continue;
    kern::set_backend(backend);
    std::vector<float> acc = a;
    std::vector<int32_t> arg(3, 0);
    kern::vmax_arg(a.data(), acc.data(), arg.data(), 9, 3);  // equal: no update
    CHECK(arg == std::vector<int32_t>{0, 0, 0});
    const std::vector<float> bigger = {1.0f, 5.0f, 3.0f};
    kern::vmax_arg(bigger.data(), acc.data(), arg.data(), 9, 3);
    CHECK(arg == std::vector<int32_t>{0, 9, 0});
    CHECK(acc[1] == 5.0f);
  }
}

TEST_CASE("relu and relu_backward basics") {
  const std::vector<float> x = {-1.0f, 0.0f, 2.5f};
  std::vector<float> y(3);
  kern::relu(x.data(), y.data(), 3);
  CHECK(y == std::vector<float>{0.0f, 0.0f, 2.5f});
  const std::vector<float> dy = {10.0f, 10.0f, 10.0f};
  std::vector<float> dx(3);
  kern::relu_backward(x.data(), dy.data(), dx.data(), 3);
  CHECK(dx == std::vector<float>{0.0f, 0.0f, 10.0f});
}

TEST_CASE("zero gradient leaves adam parameters unchanged") {
  std::vector<float> p = {1.0f, -2.0f};
  std::vector<float> m(2, 0), v(2, 0), g(2, 0);
  kern::adam_update(p.data(), m.data(), v.data(), g.data(), 2, 0.01f, 0.9f, 0.999f,
                    1e-8f);
  CHECK(p == std::vector<float>{1.0f, -2.0f});
}
