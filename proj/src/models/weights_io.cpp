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

#include "incodec/weights_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace incodec {

namespace {

using Kind = WeightFileError::Kind;

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void str16(const std::string& s) {
    if (s.size() > 0xFFFF) throw ContractViolation("string too long for weight file: " + s);
    u16(static_cast<std::uint16_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
  }
  void raw(const char* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : buf_(b) {}

  void set_context(std::string ctx) { ctx_ = std::move(ctx); }

  std::uint8_t u8() {
    need(1);
    return buf_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(buf_[pos_] | (buf_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::vector<float> f32s(std::size_t n) {
    need(4 * n);
    std::vector<float> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t v = 0;
      for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(buf_[pos_ + b]) << (8 * b);
      out[i] = std::bit_cast<float>(v);
      pos_ += 4;
    }
    return out;
  }
  std::string str16() {
    const std::uint16_t n = u16();
    need(n);
    std::string s(buf_.begin() + pos_, buf_.begin() + pos_ + n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return buf_.size() - pos_; }

 private:
  void need(std::size_t n) {
    if (remaining() < n)
      throw WeightFileError(Kind::truncated, "weight file truncated " + ctx_ + " (need " +
                                                 std::to_string(n) + " bytes, " +
                                                 std::to_string(remaining()) + " left)");
  }

  const std::vector<std::uint8_t>& buf_;
  std::size_t pos_ = 0;
  std::string ctx_ = "in header";
};

}  // namespace

std::vector<std::uint8_t> serialize_weights(const WeightStore& store, const NetworkGraph& graph) {
  validate_weights(graph, store);
  Writer w;
  w.raw(kWeightMagic, 4);
  w.u32(kWeightVersion);
  w.str16(graph.arch_tag());
  const std::vector<int> params = graph.parameter_nodes();
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (int i : params) {
    const Node& n = graph.node(i);
    const LayerParams& p = store.layers.at(n.id);
    w.str16(n.id);
    w.u8(static_cast<std::uint8_t>(p.dims.size()));
    for (std::uint32_t d : p.dims) w.u32(d);
    for (float v : p.weights) w.f32(v);
    w.u32(static_cast<std::uint32_t>(p.bias.size()));
    for (float v : p.bias) w.f32(v);
  }
  return w.take();
}

WeightStore parse_weights(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kWeightMagic, 4) != 0)
    throw WeightFileError(Kind::bad_magic, "not a weight file (bad magic)");
  Reader r(bytes);
  r.u32();  // magic
  const std::uint32_t version = r.u32();
  if (version != kWeightVersion)
    throw WeightFileError(Kind::version_mismatch, "weight file version " +
                                                      std::to_string(version) + ", expected " +
                                                      std::to_string(kWeightVersion));
  WeightStore store;
  store.arch_tag = r.str16();
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    r.set_context("at node " + std::to_string(i));
    const std::string id = r.str16();
    r.set_context("in layer '" + id + "'");
    LayerParams p;
    const std::uint8_t rank = r.u8();
    std::size_t elems = 1;
    for (int d = 0; d < rank; ++d) {
      p.dims.push_back(r.u32());
      elems *= p.dims.back();
      // Cap before the product can overflow; anything larger cannot fit anyway.
      if (elems > r.remaining()) elems = r.remaining() + 1;
    }
    p.weights = r.f32s(elems);
    p.bias = r.f32s(r.u32());
    store.layers[id] = std::move(p);
  }
  return store;
}

void save_weights(const WeightStore& store, const NetworkGraph& graph,
                  const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = serialize_weights(store, graph);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw WeightFileError(Kind::io, "cannot write weight file " + path.string());
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw WeightFileError(Kind::io, "failed writing weight file " + path.string());
}

WeightStore load_weights(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw WeightFileError(Kind::io, "cannot open weight file " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                        std::istreambuf_iterator<char>());
  return parse_weights(bytes);
}

WeightStore load_weights(const std::filesystem::path& path, const NetworkGraph& graph) {
  WeightStore store = load_weights(path);
  try {
    validate_weights(graph, store);
  } catch (const ContractViolation& e) {
    throw WeightFileError(Kind::shape_mismatch, path.string() + ": " + e.what());
  }
  if (store.layers.size() != graph.parameter_nodes().size())
    throw WeightFileError(Kind::shape_mismatch,
                          path.string() + ": " + std::to_string(store.layers.size()) +
                              " layers in file, graph " + graph.arch_tag() + " has " +
                              std::to_string(graph.parameter_nodes().size()));
  return store;
}

std::vector<std::uint8_t> serialize_vectors(const std::vector<VectorCase>& cases) {
  Writer w;
  w.raw(kVectorMagic, 4);
  w.u32(static_cast<std::uint32_t>(cases.size()));
  for (const VectorCase& c : cases) {
    if (c.input.size() != kVectorCaseFloats || c.output.size() != kVectorCaseFloats)
      throw ContractViolation("vector case must hold 32x32 input and output blocks");
    for (float v : c.input.values()) w.f32(v);
    for (float v : c.output.values()) w.f32(v);
  }
  return w.take();
}

std::vector<VectorCase> parse_vectors(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kVectorMagic, 4) != 0)
    throw WeightFileError(Kind::bad_magic, "not a vector file (bad magic)");
  Reader r(bytes);
  r.u32();
  const std::uint32_t count = r.u32();
  std::vector<VectorCase> cases;
  for (std::uint32_t i = 0; i < count; ++i) {
    r.set_context("in case " + std::to_string(i));
    VectorCase c;
    c.input = Tensor(Shape3{1, 32, 32}, r.f32s(kVectorCaseFloats));
    c.output = Tensor(Shape3{1, 32, 32}, r.f32s(kVectorCaseFloats));
    cases.push_back(std::move(c));
  }
  return cases;
}

void save_vectors(const std::vector<VectorCase>& cases, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = serialize_vectors(cases);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw WeightFileError(Kind::io, "cannot write vector file " + path.string());
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw WeightFileError(Kind::io, "failed writing vector file " + path.string());
}

std::vector<VectorCase> load_vectors(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw WeightFileError(Kind::io, "cannot open vector file " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                        std::istreambuf_iterator<char>());
  return parse_vectors(bytes);
}

double max_vector_error(const NetworkGraph& graph, const WeightStore& weights,
                        const std::vector<VectorCase>& cases) {
  double worst = 0.0;
  for (const VectorCase& c : cases) {
    const Tensor out = forward(graph, weights, c.input);
    for (std::size_t i = 0; i < out.size(); ++i)
      worst = std::max(worst, std::abs(static_cast<double>(out.data()[i]) - c.output.data()[i]));
  }
  return worst;
}

}  // namespace incodec
