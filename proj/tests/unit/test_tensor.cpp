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

#include <cmath>
#include <limits>

#include "../oracles/finite_diff.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "incodec/tensor.hpp"

using namespace incodec;
using testing::Rng;

namespace {

double max_abs_diff(const oracle::Volume& a, const oracle::Volume& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
  return m;
}

KernelShape random_shape(Rng& rng) {
  return {rng.uniform_int(1, 12), rng.uniform_int(1, 10), rng.pick({1, 3, 5, 7, 9}),
          rng.pick({1, 3, 5, 7, 9})};
}

// Scalar objective sum(g .* conv(x, k)) for finite differences.
double probe(const TensorD& x, const BasicConvKernel<double>& k, const TensorD& g) {
  const TensorD y = conv2d_same(x, k.ref());
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y.data()[i] * g.data()[i];
  return s;
}

}  // namespace

TEST_CASE("conv forward matches the direct-sum oracle on random shapes") {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const KernelShape s = random_shape(rng);
    const int h = rng.uniform_int(1, 20), w = rng.uniform_int(1, 40);
    const auto x = testing::random_tensor<float>(rng, s.in_ch, h, w);
    const auto k = testing::random_kernel<float>(rng, s);
    const Tensor y = conv2d_same(x, k.ref());
    const auto ref = oracle::conv_same(testing::to_volume(x), testing::to_filter(s, k.weights, k.bias));
    CAPTURE(s.str());
    CHECK(max_abs_diff(testing::to_volume(y), ref) <= 1e-4);
  }
}

TEST_CASE("conv forward in double is exact to rounding") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const KernelShape s = random_shape(rng);
    const auto x = testing::random_tensor<double>(rng, s.in_ch, rng.uniform_int(1, 17),
                                                  rng.uniform_int(1, 33));
    const auto k = testing::random_kernel<double>(rng, s);
    const auto ref =
        oracle::conv_same(testing::to_volume(x), testing::to_filter(s, k.weights, k.bias));
    CHECK(max_abs_diff(testing::to_volume(conv2d_same(x, k.ref())), ref) <= 1e-12);
  }
}

TEST_CASE("conv backward matches central differences") {
  Rng rng(13);
  for (int trial = 0; trial < 8; ++trial) {
    const KernelShape s{rng.uniform_int(1, 5), rng.uniform_int(1, 4), rng.pick({1, 3, 5}),
                        rng.pick({1, 3, 5})};
    const int h = rng.uniform_int(2, 7), w = rng.uniform_int(2, 9);
    auto x = testing::random_tensor<double>(rng, s.in_ch, h, w);
    auto k = testing::random_kernel<double>(rng, s);
    const auto g = testing::random_tensor<double>(rng, s.out_ch, h, w);
    const GradBundleD b = conv2d_backward(x, k.ref(), g);
    auto f = [&] { return probe(x, k, g); };
    for (int i = 0; i < 5; ++i) {
      const std::size_t wi = rng.uniform_int(0, static_cast<int>(k.weights.size()) - 1);
      CHECK(oracle::relative_error(oracle::central_difference(k.weights[wi], 1e-3, f),
                                   b.grad_weights[wi]) <= 1e-7);
      const std::size_t xi = rng.uniform_int(0, static_cast<int>(x.size()) - 1);
      CHECK(oracle::relative_error(oracle::central_difference(x.data()[xi], 1e-3, f),
                                   b.grad_input.data()[xi]) <= 1e-7);
    }
    const int o = rng.uniform_int(0, s.out_ch - 1);
    CHECK(oracle::relative_error(oracle::central_difference(k.bias[o], 1e-3, f), b.grad_bias[o]) <=
          1e-7);
  }
}

TEST_CASE("conv identity kernel returns its input") {
  Rng rng(14);
  const auto x = testing::random_tensor<float>(rng, 1, 9, 13);
  ConvKernel k(KernelShape{1, 1, 3, 3});
  k.w(0, 0, 1, 1) = 1.0f;
  CHECK(conv2d_same(x, k.ref()) == x);
}

TEST_CASE("conv output is bit-reproducible") {
  Rng rng(15);
  const auto x = testing::random_tensor<float>(rng, 16, 32, 32);
  const auto k = testing::random_kernel<float>(rng, KernelShape{24, 16, 3, 3});
  CHECK(conv2d_same(x, k.ref()) == conv2d_same(x, k.ref()));
  const auto g = testing::random_tensor<float>(rng, 24, 32, 32);
  const auto a = conv2d_backward(x, k.ref(), g);
  const auto b = conv2d_backward(x, k.ref(), g);
  CHECK(a.grad_weights == b.grad_weights);
  CHECK(a.grad_input == b.grad_input);
}

TEST_CASE("conv rejects bad kernels and mismatched inputs") {
  Tensor x(2, 4, 4);
  ConvKernel even(KernelShape{1, 2, 2, 2});
  CHECK_THROWS_AS(conv2d_same(x, even.ref()), ContractViolation);
  ConvKernel wrong_in(KernelShape{1, 3, 3, 3});
  CHECK_THROWS_AS(conv2d_same(x, wrong_in.ref()), ContractViolation);
  ConvKernel ok(KernelShape{1, 2, 3, 3});
  ok.bias.clear();
  CHECK_THROWS_AS(conv2d_same(x, ok.ref()), ContractViolation);
  ConvKernel k(KernelShape{1, 2, 3, 3});
  CHECK_THROWS_AS(conv2d_backward(x, k.ref(), Tensor(2, 4, 4)), ContractViolation);
}

TEST_CASE("non-finite values raise a numeric error") {
  Tensor x(1, 3, 3, 1.0f);
  x.at(0, 1, 1) = std::numeric_limits<float>::quiet_NaN();
  ConvKernel k(KernelShape{1, 1, 1, 1});
  k.weights[0] = 1.0f;
  CHECK_THROWS_AS(conv2d_same(x, k.ref()), NumericError);
  Tensor big(1, 1, 1, 3e38f);
  k.weights[0] = 10.0f;
  CHECK_THROWS_AS(conv2d_same(big, k.ref()), NumericError);
}

TEST_CASE("fully connected layer matches the oracle and its gradient") {
  Rng rng(16);
  const KernelShape s{7, 19, 1, 1};
  auto x = testing::random_tensor<double>(rng, 19, 1, 1);
  auto k = testing::random_kernel<double>(rng, s);
  const TensorD y = fully_connected(x, k.ref());
  const auto ref = oracle::dense(testing::to_volume(x).v, testing::to_filter(s, k.weights, k.bias));
  for (int o = 0; o < 7; ++o) CHECK(y.data()[o] == doctest::Approx(ref[o]).epsilon(1e-12));

  const auto g = testing::random_tensor<double>(rng, 7, 1, 1);
  const auto b = fully_connected_backward(x, k.ref(), g);
  auto f = [&] {
    const TensorD z = fully_connected(x, k.ref());
    double s2 = 0.0;
    for (int o = 0; o < 7; ++o) s2 += z.data()[o] * g.data()[o];
    return s2;
  };
  for (int i = 0; i < 10; ++i) {
    const int wi = rng.uniform_int(0, 7 * 19 - 1);
    CHECK(oracle::relative_error(oracle::central_difference(k.weights[wi], 1e-4, f),
                                 b.grad_weights[wi]) <= 1e-7);
    const int xi = rng.uniform_int(0, 18);
    CHECK(oracle::relative_error(oracle::central_difference(x.data()[xi], 1e-4, f),
                                 b.grad_input.data()[xi]) <= 1e-7);
  }
}

TEST_CASE("relu, concat and slice") {
  Tensor x(2, 1, 2, 0.0f);
  x.at(0, 0, 0) = -1.0f;
  x.at(0, 0, 1) = 2.0f;
  x.at(1, 0, 0) = 0.5f;
  const Tensor r = relu(x);
  CHECK(r.at(0, 0, 0) == 0.0f);
  CHECK(r.at(0, 0, 1) == 2.0f);
  const Tensor g = relu_backward(x, Tensor(2, 1, 2, 1.0f));
  CHECK(g.at(0, 0, 0) == 0.0f);
  CHECK(g.at(0, 0, 1) == 1.0f);
  CHECK(g.at(1, 1 - 1, 1) == 0.0f);  // relu'(0) = 0

  const Tensor c = concat_channels(std::vector<Tensor>{x, r});
  CHECK(c.channels() == 4);
  CHECK(slice_channels(c, 2, 2) == r);
  CHECK(slice_channels(c, 0, 2) == x);
  CHECK_THROWS_AS(slice_channels(c, 3, 2), ContractViolation);
  CHECK_THROWS_AS(concat_channels(std::vector<Tensor>{x, Tensor(1, 2, 2)}), ContractViolation);
  CHECK_THROWS_AS(add(x, Tensor(1, 1, 2)), ContractViolation);
}

TEST_CASE("tensor shapes must be positive") {
  CHECK_THROWS_AS(Tensor(0, 1, 1), ContractViolation);
  CHECK_THROWS_AS(Tensor(Shape3{1, 2, 2}, std::vector<float>(3)), ContractViolation);
}
