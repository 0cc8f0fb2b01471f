#pragma once

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "newsseg/error.hpp"

namespace newsseg {

/// Dense row-major tensor. Plain value type; kernels index the flat data.
template <typename T>
struct Tensor {
  std::vector<int64_t> shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<int64_t> s) : shape(std::move(s)) {
    data.assign(static_cast<size_t>(numel_of(shape)), T{0});
  }

  static int64_t numel_of(const std::vector<int64_t>& s) {
    int64_t n = 1;
    for (int64_t d : s) n *= d;
    return n;
  }

  static Tensor zeros(std::vector<int64_t> s) { return Tensor(std::move(s)); }

  int64_t numel() const { return static_cast<int64_t>(data.size()); }
  bool empty() const { return data.empty(); }
  int64_t dim(size_t i) const { return shape.at(i); }
  size_t rank() const { return shape.size(); }

  T* ptr() { return data.data(); }
  const T* ptr() const { return data.data(); }

  void fill(T v) { std::fill(data.begin(), data.end(), v); }

  /// Rows/cols view of a rank-2 tensor.
  int64_t rows() const { return shape.at(0); }
  int64_t cols() const { return shape.at(1); }

  void require_shape(const std::vector<int64_t>& expect,
                     const std::string& what) const {
    if (shape != expect) {
      std::string got = "(";
      for (size_t i = 0; i < shape.size(); ++i) {
        got += (i ? "," : "") + std::to_string(shape[i]);
      }
      got += ")";
      std::string want = "(";
      for (size_t i = 0; i < expect.size(); ++i) {
        want += (i ? "," : "") + std::to_string(expect[i]);
      }
      want += ")";
      throw ShapeError(what + ": expected shape " + want + ", got " + got);
    }
  }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out;
    out.shape = shape;
    out.data.resize(data.size());
    for (size_t i = 0; i < data.size(); ++i) {
      out.data[i] = static_cast<U>(data[i]);
    }
    return out;
  }

  bool operator==(const Tensor&) const = default;
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

}  // namespace newsseg
