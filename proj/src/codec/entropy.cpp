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

#include "incodec/entropy.hpp"

#include <bit>
#include <string>

#include "incodec/error.hpp"
#include "incodec/intra.hpp"

namespace incodec {

void BitWriter::put_bit(bool b) {
  if (bits_ % 8 == 0) buf_.push_back(0);
  if (b) buf_.back() |= static_cast<std::uint8_t>(0x80u >> (bits_ % 8));
  ++bits_;
}

void BitWriter::put_bits(std::uint32_t value, int count) {
  for (int i = count - 1; i >= 0; --i) put_bit((value >> i) & 1u);
}

void BitWriter::put_exp_golomb(std::uint32_t v) {
  const std::uint64_t x = static_cast<std::uint64_t>(v) + 1;
  const int len = std::bit_width(x);
  for (int i = 0; i < len - 1; ++i) put_bit(false);
  for (int i = len - 1; i >= 0; --i) put_bit((x >> i) & 1u);
}

void BitWriter::append(const BitWriter& other) {
  for (std::size_t i = 0; i < other.bits_; ++i)
    put_bit((other.buf_[i / 8] >> (7 - i % 8)) & 1u);
}

BitReader::BitReader(std::span<const std::uint8_t> bytes, std::size_t bit_limit)
    : bytes_(bytes), limit_(bit_limit) {
  if (bit_limit > bytes.size() * 8) throw CorruptStream("bit limit exceeds buffer");
}

bool BitReader::get_bit() {
  if (pos_ >= limit_)
    throw CorruptStream("read past end of stream at bit " + std::to_string(pos_));
  const bool b = (bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1u;
  ++pos_;
  return b;
}

std::uint32_t BitReader::get_bits(int count) {
  std::uint32_t v = 0;
  for (int i = 0; i < count; ++i) v = (v << 1) | (get_bit() ? 1u : 0u);
  return v;
}

std::uint32_t BitReader::get_exp_golomb() {
  const std::size_t start = pos_;
  int zeros = 0;
  while (!get_bit()) {
    if (++zeros > 31)
      throw CorruptStream("malformed Exp-Golomb prefix at bit " + std::to_string(start));
  }
  std::uint64_t x = 1;
  for (int i = 0; i < zeros; ++i) x = (x << 1) | (get_bit() ? 1u : 0u);
  return static_cast<std::uint32_t>(x - 1);
}

std::uint32_t signed_to_code(int v) {
  return v <= 0 ? static_cast<std::uint32_t>(-2LL * v) : static_cast<std::uint32_t>(2LL * v - 1);
}

int code_to_signed(std::uint32_t code) {
  return code % 2 == 0 ? -static_cast<int>(code / 2) : static_cast<int>((code + 1) / 2);
}

int exp_golomb_length(std::uint32_t v) {
  return 2 * std::bit_width(static_cast<std::uint64_t>(v) + 1) - 1;
}

int mode_signaling_bits(bool neural) { return neural ? 1 : 1 + kModeIndexBits; }

std::size_t block_bits(bool neural, std::span<const int> levels) {
  std::size_t bits = mode_signaling_bits(neural);
  for (int l : levels) bits += exp_golomb_length(signed_to_code(l));
  return bits;
}

void entropy_encode_block(const BlockSyntax& block, BitWriter& out) {
  out.put_bit(block.neural);
  if (!block.neural) {
    if (block.mode < 0 || block.mode >= kNumClassicalModes)
      throw ContractViolation("entropy_encode_block: invalid mode " + std::to_string(block.mode));
    out.put_bits(static_cast<std::uint32_t>(block.mode), kModeIndexBits);
  }
  for (int l : block.levels) out.put_exp_golomb(signed_to_code(l));
}

BlockSyntax entropy_decode_block(BitReader& in, int coeff_count) {
  BlockSyntax b;
  b.neural = in.get_bit();
  if (!b.neural) {
    b.mode = static_cast<int>(in.get_bits(kModeIndexBits));
    if (b.mode >= kNumClassicalModes)
      throw CorruptStream("invalid intra mode index " + std::to_string(b.mode));
  } else {
    b.mode = kNeuralMode;
  }
  b.levels.resize(coeff_count);
  for (int& l : b.levels) l = code_to_signed(in.get_exp_golomb());
  return b;
}

}  // namespace incodec
