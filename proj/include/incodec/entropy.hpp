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
#include <span>
#include <vector>

namespace incodec {

// MSB-first bit packer; the final byte is zero-padded.
class BitWriter {
 public:
  void put_bit(bool b);
  void put_bits(std::uint32_t value, int count);
  // Order-0 Exp-Golomb.
  void put_exp_golomb(std::uint32_t v);
  void append(const BitWriter& other);

  std::size_t bit_count() const { return bits_; }
  const std::vector<std::uint8_t>& bytes() const { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
  std::size_t bits_ = 0;
};

// Reads at most `bit_limit` bits; any read beyond it throws CorruptStream.
class BitReader {
 public:
  BitReader(std::span<const std::uint8_t> bytes, std::size_t bit_limit);
  explicit BitReader(std::span<const std::uint8_t> bytes)
      : BitReader(bytes, bytes.size() * 8) {}

  bool get_bit();
  std::uint32_t get_bits(int count);
  std::uint32_t get_exp_golomb();
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return limit_ - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t limit_;
  std::size_t pos_ = 0;
};

// v <= 0 -> -2v, v > 0 -> 2v - 1.
std::uint32_t signed_to_code(int v);
int code_to_signed(std::uint32_t code);
int exp_golomb_length(std::uint32_t v);

inline constexpr int kModeIndexBits = 6;

// Per-block syntax: neural flag, 6-bit mode index when the flag is 0, then
// every level in zigzag order as signed Exp-Golomb.
struct BlockSyntax {
  bool neural = false;
  int mode = 0;
  std::vector<int> levels;  // zigzag order

  bool operator==(const BlockSyntax&) const = default;
};

void entropy_encode_block(const BlockSyntax& block, BitWriter& out);
BlockSyntax entropy_decode_block(BitReader& in, int coeff_count);

int mode_signaling_bits(bool neural);
// Exact length entropy_encode_block would write.
std::size_t block_bits(bool neural, std::span<const int> levels);

}  // namespace incodec
