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
#include <optional>
#include <string>
#include <vector>

#include "incodec/graph.hpp"

namespace incodec {

inline constexpr int kMaxQp = 51;

// Inclusive QP interval served by the model trained at `train_qp`.
struct QpBand {
  int lo = 0;
  int hi = kMaxQp;
  int train_qp = 0;

  bool contains(int qp) const { return qp >= lo && qp <= hi; }
  bool operator==(const QpBand&) const = default;
};

// {0-24 -> 22, 25-29 -> 27, 30-34 -> 32, 35-51 -> 37}.
std::vector<QpBand> default_qp_bands();

// Bands sit on the midpoints between consecutive training QPs; the outer
// bands extend to 0 and 51.
std::vector<QpBand> bands_for(const std::vector<int>& train_qps);

struct ModelBank {
  std::string arch_tag;
  std::vector<QpBand> bands;
  std::vector<WeightStore> weights;  // parallel to bands

  // Throws ContractViolation unless bands are disjoint, ordered and cover
  // 0..51, and there is one weight store per band.
  void validate() const;
};

const WeightStore& select_model(const ModelBank& bank, int qp);

// Models referenced by the one-byte bank id in a bitstream header.
struct CodecModels {
  int id = 0;
  std::optional<ModelBank> filter;
  std::optional<WeightStore> intra;
};

// Directory layout: bank.cfg with lines
//   id=<0..255>
//   filter_arch=<tag>
//   band=<lo>,<hi>,<train_qp>,<file>
//   intra=<file>
// plus the referenced NNWT files.
void save_models(const std::filesystem::path& dir, const CodecModels& models);
CodecModels load_models(const std::filesystem::path& dir);

}  // namespace incodec
