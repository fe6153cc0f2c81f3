#ifndef XENS_TENSOR_HPP
#define XENS_TENSOR_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "xens/error.hpp"

namespace xens {

// Dense row-major tensor. Training code runs float; correctness oracles
// instantiate the same layer templates in double.
template <typename T>
struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::int64_t> s) : shape(std::move(s)) {
    data.assign(static_cast<std::size_t>(numel_of(shape)), T(0));
  }

  static std::int64_t numel_of(const std::vector<std::int64_t>& s) {
    std::int64_t n = 1;
    for (auto d : s) {
      require(d >= 0, "negative tensor dimension");
      n *= d;
    }
    return n;
  }

  std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }
  int ndim() const { return static_cast<int>(shape.size()); }
  std::int64_t dim(int i) const { return shape[static_cast<std::size_t>(i)]; }

  void zero() { std::fill(data.begin(), data.end(), T(0)); }

  T* ptr() { return data.data(); }
  const T* ptr() const { return data.data(); }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out(shape);
    for (std::size_t i = 0; i < data.size(); ++i)
      out.data[i] = static_cast<U>(data[i]);
    return out;
  }
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

// Named view of a parameter or buffer inside a module. Buffers (running
// statistics) carry no gradient and are never handed to the optimizer, but
// they are checkpointed and snapshotted like parameters.
template <typename T>
struct ParamRef {
  std::string name;
  Tensor<T>* value = nullptr;
  Tensor<T>* grad = nullptr;  // null for buffers
  bool is_buffer = false;
};

}  // namespace xens

#endif
