#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

namespace gtg::nn {

// Dense row-major tensor. float for production paths; the double
// instantiation backs the finite-difference shadow used by gradient tests.
template <class T>
struct TensorT {
  std::vector<size_t> shape;
  std::vector<T> data;

  static TensorT zeros(std::vector<size_t> dims) {
    TensorT t;
    size_t total = 1;
    for (size_t d : dims) total *= d;
    t.shape = std::move(dims);
    t.data.assign(total, T(0));
    return t;
  }

  size_t size() const { return data.size(); }
  size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }
  T* ptr() { return data.data(); }
  const T* ptr() const { return data.data(); }
  void fill(T v) { std::fill(data.begin(), data.end(), v); }

  template <class U>
  TensorT<U> cast() const {
    TensorT<U> out;
    out.shape = shape;
    out.data.resize(data.size());
    for (size_t i = 0; i < data.size(); ++i) out.data[i] = U(data[i]);
    return out;
  }
};

using Tensor = TensorT<float>;

}  // namespace gtg::nn
