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
#include <optional>
#include <span>
#include <vector>

#include "incodec/entropy.hpp"
#include "incodec/graph.hpp"
#include "incodec/image.hpp"
#include "incodec/intra.hpp"
#include "incodec/model_bank.hpp"
#include "incodec/transform.hpp"

namespace incodec {

struct CodecConfig {
  int block_size = 32;
  int qp = 32;
  bool neural_mode = false;
  bool inloop_filter = false;
  double lambda_scale = 0.57;
  int context_width = 4;

  // lambda_scale * 2^((qp - 12) / 3)
  double lambda() const;
};

inline constexpr char kStreamMagic[4] = {'N', 'C', 'V', '1'};
inline constexpr std::size_t kStreamHeaderBytes = 12;
inline constexpr std::uint8_t kFlagNeuralMode = 0x01;
inline constexpr std::uint8_t kFlagInloopFilter = 0x02;

// "NCV1" | u16 width | u16 height | u8 qp | u8 flags | u8 bank id | u8 reserved
// followed by the bit-packed payload (zero-padded final byte).
struct Bitstream {
  int width = 0;
  int height = 0;
  int qp = 0;
  bool neural_mode = false;
  bool inloop_filter = false;
  int bank_id = 0;
  std::vector<std::uint8_t> payload;
  std::size_t payload_bits = 0;  // exact when produced by the encoder, bytes * 8 when parsed

  std::vector<std::uint8_t> serialize() const;
  static Bitstream parse(std::span<const std::uint8_t> bytes);
};

// Outcome of coding one block with one prediction.
struct ModeDecision {
  int mode = 0;  // 0..34, or kNeuralMode
  bool neural = false;
  Plane recon;
  std::vector<int> levels;  // zigzag order
  std::size_t bits = 0;
  double ssd = 0.0;
  double cost = 0.0;
};

// recon = clamp(round(pred + idct(dequant(levels)))); shared by encoder and decoder.
Plane reconstruct_block(const Plane& pred, std::span<const int> zigzag_levels,
                        const QuantParams& q);

// Transform, quantize and reconstruct `orig` against one prediction, and cost
// it as SSD + lambda * bits.
ModeDecision evaluate_candidate(const Plane& orig, const Plane& pred, int mode, bool neural,
                                const QuantParams& q, double lambda);

// Graph plus weights for the neural intra mode.
struct NeuralPredictor {
  const NetworkGraph* graph = nullptr;
  const WeightStore* weights = nullptr;
};

// Minimum-cost candidate among the 35 classical modes and, when `predictor`
// is given, the neural mode. Ties go to the smaller mode index, classical
// before neural.
ModeDecision rd_select_mode(const Plane& orig, const RefArray& refs,
                            std::span<const float> context, const QuantParams& q,
                            const CodecConfig& config, const NeuralPredictor* predictor);

// Filters a reconstructed block in place: normalize to [0,1], run the
// network, de-normalize, round and clamp.
void apply_block_filter(Plane& block, const NetworkGraph& graph, const WeightStore& weights);

struct EncodeStats {
  std::vector<int> mode_counts = std::vector<int>(kNumClassicalModes + 1, 0);
  int blocks = 0;
  int neural_blocks() const { return mode_counts[kNeuralMode]; }
};

struct EncodeResult {
  Bitstream stream;
  Frame recon;
  EncodeStats stats;
};

// Codes Y, U and V in turn, each padded to the block grid and scanned in
// raster order. `models` must be present when the config enables the neural
// mode or the in-loop filter.
EncodeResult encode_frame(const Frame& frame, const CodecConfig& config,
                          const CodecModels* models);

// Throws CorruptStream on malformed data and MissingModel when the header
// needs a bank that is not among `banks`.
Frame decode_frame(const Bitstream& stream, std::span<const CodecModels> banks);

// Luma-only coding used by dataset generation: returns the reconstruction.
Plane encode_plane(const Plane& plane, const CodecConfig& config, const CodecModels* models,
                   BitWriter& out, EncodeStats* stats = nullptr);

}  // namespace incodec
