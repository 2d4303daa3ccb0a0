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

#include <filesystem>
#include <random>
#include <string>

#include "../oracles/conv_oracle.hpp"
#include "incodec/graph.hpp"
#include "incodec/image.hpp"
#include "incodec/tensor.hpp"

namespace testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(INCODEC_FIXTURE_DIR) / name;
}

// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("incodec_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  template <class T>
  T pick(std::initializer_list<T> xs) {
    return *(xs.begin() + uniform_int(0, static_cast<int>(xs.size()) - 1));
  }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

template <class T>
incodec::BasicTensor<T> random_tensor(Rng& rng, int c, int h, int w, double lo = -1.0,
                                      double hi = 1.0) {
  incodec::BasicTensor<T> t(c, h, w);
  for (T& v : t.values()) v = static_cast<T>(rng.uniform(lo, hi));
  return t;
}

template <class T>
incodec::BasicConvKernel<T> random_kernel(Rng& rng, incodec::KernelShape s, double scale = 0.5) {
  incodec::BasicConvKernel<T> k(s);
  for (T& v : k.weights) v = static_cast<T>(rng.uniform(-scale, scale));
  for (T& v : k.bias) v = static_cast<T>(rng.uniform(-scale, scale));
  return k;
}

template <class T>
oracle::Volume to_volume(const incodec::BasicTensor<T>& t) {
  oracle::Volume v(t.channels(), t.height(), t.width());
  for (std::size_t i = 0; i < t.size(); ++i) v.v[i] = static_cast<double>(t.data()[i]);
  return v;
}

template <class T>
oracle::Filter to_filter(const incodec::KernelShape& s, const std::vector<T>& w,
                         const std::vector<T>& b) {
  oracle::Filter f{s.out_ch, s.in_ch, s.kh, s.kw, {}, {}};
  f.w.assign(w.begin(), w.end());
  f.b.assign(b.begin(), b.end());
  return f;
}

// Lookup of weight-store layers as oracle filters.
template <class T>
auto layer_lookup(const incodec::BasicWeightStore<T>& store) {
  return [&store](const std::string& id) {
    const auto& p = store.layers.at(id);
    incodec::KernelShape s{static_cast<int>(p.dims[0]), static_cast<int>(p.dims[1]),
                           p.dims.size() > 2 ? static_cast<int>(p.dims[2]) : 1,
                           p.dims.size() > 3 ? static_cast<int>(p.dims[3]) : 1};
    return to_filter(s, p.weights, p.bias);
  };
}

template <class T>
incodec::BasicWeightStore<T> random_weights(const incodec::NetworkGraph& g, Rng& rng,
                                            double scale) {
  incodec::BasicWeightStore<T> s = incodec::zero_weights(g).cast<T>();
  for (auto& [id, p] : s.layers) {
    for (T& v : p.weights) v = static_cast<T>(rng.uniform(-scale, scale));
    for (T& v : p.bias) v = static_cast<T>(rng.uniform(-scale, scale));
  }
  return s;
}

inline incodec::Plane random_plane(Rng& rng, int w, int h) {
  incodec::Plane p(w, h);
  for (auto& v : p.samples) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  return p;
}

}  // namespace testing
