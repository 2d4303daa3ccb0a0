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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "incodec/error.hpp"
#include "incodec/graph.hpp"

namespace incodec {

// Weight file layout (little-endian, unpadded):
//   "NNWT" | u32 version (1) | u16 tag length, tag bytes | u32 node count
//   per node: u16 id length, id bytes | u8 rank | rank x u32 dims |
//             prod(dims) x f32 weights | u32 bias length | bias x f32
inline constexpr char kWeightMagic[4] = {'N', 'N', 'W', 'T'};
inline constexpr std::uint32_t kWeightVersion = 1;

class WeightFileError : public Error {
 public:
  enum class Kind { io, bad_magic, version_mismatch, truncated, shape_mismatch };
  WeightFileError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::vector<std::uint8_t> serialize_weights(const WeightStore& store, const NetworkGraph& graph);
WeightStore parse_weights(const std::vector<std::uint8_t>& bytes);

void save_weights(const WeightStore& store, const NetworkGraph& graph,
                  const std::filesystem::path& path);
WeightStore load_weights(const std::filesystem::path& path);
// Also checks every layer against `graph` (shape_mismatch otherwise).
WeightStore load_weights(const std::filesystem::path& path, const NetworkGraph& graph);

// Conformance vectors (little-endian): "NNTV" | u32 case count | per case
// 1024 input floats then 1024 expected-output floats (32x32 blocks).
inline constexpr char kVectorMagic[4] = {'N', 'N', 'T', 'V'};
inline constexpr std::size_t kVectorCaseFloats = 1024;

struct VectorCase {
  Tensor input;   // (1, 32, 32)
  Tensor output;  // (1, 32, 32)
};

std::vector<std::uint8_t> serialize_vectors(const std::vector<VectorCase>& cases);
// Errors are reported as WeightFileError (bad_magic, truncated, io).
std::vector<VectorCase> parse_vectors(const std::vector<std::uint8_t>& bytes);
void save_vectors(const std::vector<VectorCase>& cases, const std::filesystem::path& path);
std::vector<VectorCase> load_vectors(const std::filesystem::path& path);

// Largest per-element |forward(input) - output| over all cases.
double max_vector_error(const NetworkGraph& graph, const WeightStore& weights,
                        const std::vector<VectorCase>& cases);

}  // namespace incodec
