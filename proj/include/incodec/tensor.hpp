// Copyright 2026 The incodec Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "incodec/error.hpp"

namespace incodec {

struct Shape3 {
  int channels = 0;
  int height = 0;
  int width = 0;

  std::size_t size() const {
    return static_cast<std::size_t>(channels) * height * width;
  }
  bool operator==(const Shape3&) const = default;
  std::string str() const;
};

// Dense [channels, height, width] array, row-major. Tensor (float) is the
// training/inference type; TensorD exists for gradient checks.
template <class T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() = default;
  explicit BasicTensor(Shape3 shape, T fill = T(0));
  BasicTensor(int channels, int height, int width, T fill = T(0))
      : BasicTensor(Shape3{channels, height, width}, fill) {}
  BasicTensor(Shape3 shape, std::vector<T> data);

  const Shape3& shape() const { return shape_; }
  int channels() const { return shape_.channels; }
  int height() const { return shape_.height; }
  int width() const { return shape_.width; }
  std::size_t size() const { return data_.size(); }
  std::size_t plane_size() const {
    return static_cast<std::size_t>(shape_.height) * shape_.width;
  }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  std::span<T> channel(int c) {
    return std::span<T>(data_).subspan(c * plane_size(), plane_size());
  }
  std::span<const T> channel(int c) const {
    return std::span<const T>(data_).subspan(c * plane_size(), plane_size());
  }

  T& at(int c, int y, int x) { return data_[index(c, y, x)]; }
  const T& at(int c, int y, int x) const { return data_[index(c, y, x)]; }

  bool all_finite() const;
  bool operator==(const BasicTensor&) const = default;

  template <class U>
  BasicTensor<U> cast() const {
    return BasicTensor<U>(shape_, std::vector<U>(data_.begin(), data_.end()));
  }

 private:
  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * shape_.height + y) * shape_.width + x;
  }

  Shape3 shape_;
  std::vector<T> data_;
};

using Tensor = BasicTensor<float>;
using TensorD = BasicTensor<double>;

// [out_ch, in_ch, kh, kw]. Fully-connected layers reuse this with kh = kw = 1.
struct KernelShape {
  int out_ch = 0;
  int in_ch = 0;
  int kh = 1;
  int kw = 1;

  std::size_t weight_count() const {
    return static_cast<std::size_t>(out_ch) * in_ch * kh * kw;
  }
  std::size_t param_count() const { return weight_count() + out_ch; }
  bool operator==(const KernelShape&) const = default;
  std::string str() const;
};

// Non-owning view of a kernel's weights and bias.
template <class T>
struct KernelRef {
  KernelShape shape;
  std::span<const T> weights;
  std::span<const T> bias;
};

template <class T>
struct BasicConvKernel {
  KernelShape shape;
  std::vector<T> weights;
  std::vector<T> bias;

  BasicConvKernel() = default;
  explicit BasicConvKernel(KernelShape s)
      : shape(s), weights(s.weight_count(), T(0)), bias(s.out_ch, T(0)) {}

  T& w(int o, int c, int u, int v) {
    return weights[((static_cast<std::size_t>(o) * shape.in_ch + c) * shape.kh + u) *
                       shape.kw + v];
  }
  KernelRef<T> ref() const { return {shape, weights, bias}; }
};

using ConvKernel = BasicConvKernel<float>;

template <class T>
struct BasicGradBundle {
  BasicTensor<T> grad_input;
  std::vector<T> grad_weights;
  std::vector<T> grad_bias;
};

using GradBundle = BasicGradBundle<float>;
using GradBundleD = BasicGradBundle<double>;

// Throws ContractViolation unless kh/kw are odd sizes in {1,3,5,7,9} and
// weights/bias lengths match the shape.
template <class T>
void validate_kernel(const KernelRef<T>& k);

// Stride-1 convolution with zero "same" padding. Each output accumulates
// bias first, then input channels, kernel rows and kernel columns in that
// order, so results are bit-reproducible.
template <class T>
BasicTensor<T> conv2d_same(const BasicTensor<T>& x, const KernelRef<T>& k);

template <class T>
BasicGradBundle<T> conv2d_backward(const BasicTensor<T>& x, const KernelRef<T>& k,
                                   const BasicTensor<T>& grad_out);

// Dense layer on a (len, 1, 1) tensor: out[o] = bias[o] + sum_c w[o, c] x[c].
template <class T>
BasicTensor<T> fully_connected(const BasicTensor<T>& x, const KernelRef<T>& k);

template <class T>
BasicGradBundle<T> fully_connected_backward(const BasicTensor<T>& x,
                                            const KernelRef<T>& k,
                                            const BasicTensor<T>& grad_out);

template <class T>
BasicTensor<T> relu(const BasicTensor<T>& x);

template <class T>
BasicTensor<T> relu_backward(const BasicTensor<T>& x, const BasicTensor<T>& grad_out);

template <class T>
BasicTensor<T> concat_channels(std::span<const BasicTensor<T>* const> xs);

template <class T>
BasicTensor<T> concat_channels(const std::vector<BasicTensor<T>>& xs);

// Channels [first, first + count).
template <class T>
BasicTensor<T> slice_channels(const BasicTensor<T>& x, int first, int count);

template <class T>
BasicTensor<T> add(const BasicTensor<T>& x, const BasicTensor<T>& y);

// Throws NumericError naming `what` if any value is NaN or Inf.
template <class T>
void require_finite(const BasicTensor<T>& x, const char* what);

}  // namespace incodec
