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

#include "incodec/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

namespace incodec {

double CodecConfig::lambda() const { return lambda_scale * std::pow(2.0, (qp - 12) / 3.0); }

std::vector<std::uint8_t> Bitstream::serialize() const {
  if (width <= 0 || height <= 0 || width > 0xFFFF || height > 0xFFFF)
    throw ContractViolation("bitstream dimensions out of range");
  std::vector<std::uint8_t> out(kStreamMagic, kStreamMagic + 4);
  out.push_back(static_cast<std::uint8_t>(width & 0xFF));
  out.push_back(static_cast<std::uint8_t>(width >> 8));
  out.push_back(static_cast<std::uint8_t>(height & 0xFF));
  out.push_back(static_cast<std::uint8_t>(height >> 8));
  out.push_back(static_cast<std::uint8_t>(qp));
  out.push_back(static_cast<std::uint8_t>((neural_mode ? kFlagNeuralMode : 0) |
                                          (inloop_filter ? kFlagInloopFilter : 0)));
  out.push_back(static_cast<std::uint8_t>(bank_id));
  out.push_back(0);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Bitstream Bitstream::parse(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kStreamHeaderBytes) throw CorruptStream("stream shorter than its header");
  if (std::memcmp(bytes.data(), kStreamMagic, 4) != 0) throw CorruptStream("bad stream magic");
  Bitstream s;
  s.width = bytes[4] | (bytes[5] << 8);
  s.height = bytes[6] | (bytes[7] << 8);
  s.qp = bytes[8];
  const std::uint8_t flags = bytes[9];
  s.bank_id = bytes[10];
  if (s.width == 0 || s.height == 0) throw CorruptStream("header declares an empty frame");
  if (s.qp > 51) throw CorruptStream("header qp " + std::to_string(s.qp) + " out of range");
  if (flags & ~(kFlagNeuralMode | kFlagInloopFilter))
    throw CorruptStream("header carries unknown flags");
  if (bytes[11] != 0) throw CorruptStream("header reserved byte is not zero");
  s.neural_mode = flags & kFlagNeuralMode;
  s.inloop_filter = flags & kFlagInloopFilter;
  s.payload.assign(bytes.begin() + kStreamHeaderBytes, bytes.end());
  s.payload_bits = s.payload.size() * 8;
  return s;
}

Plane reconstruct_block(const Plane& pred, std::span<const int> zigzag_levels,
                        const QuantParams& q) {
  const int n = pred.width;
  Plane recon = pred;
  if (std::all_of(zigzag_levels.begin(), zigzag_levels.end(), [](int l) { return l == 0; }))
    return recon;
  const std::vector<int> raster = from_zigzag(zigzag_levels, n);
  const std::vector<double> residual = dct2d(dequantize(raster, q), n, true);
  for (std::size_t i = 0; i < residual.size(); ++i) {
    const double v = std::round(pred.samples[i] + residual[i]);
    recon.samples[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
  }
  return recon;
}

ModeDecision evaluate_candidate(const Plane& orig, const Plane& pred, int mode, bool neural,
                                const QuantParams& q, double lambda) {
  const int n = orig.width;
  std::vector<double> residual(orig.samples.size());
  for (std::size_t i = 0; i < residual.size(); ++i)
    residual[i] = static_cast<double>(orig.samples[i]) - pred.samples[i];
  const std::vector<int> levels = quantize(dct2d(residual, n, false), q);
  ModeDecision d;
  d.mode = mode;
  d.neural = neural;
  d.levels = to_zigzag(levels, n);
  d.recon = reconstruct_block(pred, d.levels, q);
  d.bits = block_bits(neural, d.levels);
  double ssd = 0.0;
  for (std::size_t i = 0; i < residual.size(); ++i) {
    const double e = static_cast<double>(orig.samples[i]) - d.recon.samples[i];
    ssd += e * e;
  }
  d.ssd = ssd;
  d.cost = ssd + lambda * static_cast<double>(d.bits);
  return d;
}

ModeDecision rd_select_mode(const Plane& orig, const RefArray& refs,
                            std::span<const float> context, const QuantParams& q,
                            const CodecConfig& config, const NeuralPredictor* predictor) {
  const double lambda = config.lambda();
  const int n = config.block_size;
  std::optional<ModeDecision> best;
  for (int mode = 0; mode < kNumClassicalModes; ++mode) {
    ModeDecision d = evaluate_candidate(orig, predict_intra(refs, mode, n), mode, false, q, lambda);
    if (!best || d.cost < best->cost) best = std::move(d);
  }
  if (predictor) {
    const Plane pred = predict_neural(context, *predictor->graph, *predictor->weights, n);
    ModeDecision d = evaluate_candidate(orig, pred, kNeuralMode, true, q, lambda);
    if (d.cost < best->cost) best = std::move(d);
  }
  return std::move(*best);
}

void apply_block_filter(Plane& block, const NetworkGraph& graph, const WeightStore& weights) {
  Tensor in(1, block.height, block.width);
  for (std::size_t i = 0; i < block.samples.size(); ++i)
    in.data()[i] = static_cast<float>(block.samples[i]) / 255.0f;
  const Tensor out = forward(graph, weights, in);
  for (std::size_t i = 0; i < block.samples.size(); ++i) {
    const float v = std::round(out.data()[i] * 255.0f);
    block.samples[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0f, 255.0f));
  }
}

namespace {

// Graphs and weights resolved for one coding run.
struct Runtime {
  std::optional<NetworkGraph> filter_graph;
  const WeightStore* filter_weights = nullptr;
  std::optional<NetworkGraph> intra_graph;
  const WeightStore* intra_weights = nullptr;
  int bank_id = 0;

  NeuralPredictor predictor() const { return {&*intra_graph, intra_weights}; }
};

Runtime resolve(const CodecConfig& config, const CodecModels* models) {
  Runtime rt;
  if (models) rt.bank_id = models->id;
  if (config.inloop_filter) {
    if (!models || !models->filter)
      throw MissingModel(rt.bank_id, "in-loop filter enabled but model bank " +
                                         std::to_string(rt.bank_id) + " has no filter models");
    rt.filter_graph = build_from_tag(models->filter->arch_tag);
    if (!rt.filter_graph->spatial() || rt.filter_graph->input_channels() != 1 ||
        rt.filter_graph->output_channels() != 1)
      throw ContractViolation("filter architecture " + models->filter->arch_tag +
                              " is not a single-plane filter");
    rt.filter_weights = &select_model(*models->filter, config.qp);
  }
  if (config.neural_mode) {
    if (!models || !models->intra)
      throw MissingModel(rt.bank_id, "neural mode enabled but model bank " +
                                         std::to_string(rt.bank_id) + " has no intra predictor");
    rt.intra_graph = build_from_tag(models->intra->arch_tag);
    const int n = config.block_size;
    if (rt.intra_graph->spatial() ||
        rt.intra_graph->input_channels() != fc_context_length(n, config.context_width) ||
        rt.intra_graph->output_channels() != n * n)
      throw ContractViolation("intra predictor " + models->intra->arch_tag +
                              " does not match block size " + std::to_string(n) +
                              " and context width " + std::to_string(config.context_width));
    rt.intra_weights = &*models->intra;
  }
  return rt;
}

Plane extract_block(const Plane& p, int x0, int y0, int n) {
  Plane b(n, n);
  for (int y = 0; y < n; ++y)
    std::copy_n(p.samples.begin() + static_cast<std::size_t>(y0 + y) * p.width + x0, n,
                b.samples.begin() + static_cast<std::size_t>(y) * n);
  return b;
}

void store_block(Plane& p, const Plane& b, int x0, int y0) {
  for (int y = 0; y < b.height; ++y)
    std::copy_n(b.samples.begin() + static_cast<std::size_t>(y) * b.width, b.width,
                p.samples.begin() + static_cast<std::size_t>(y0 + y) * p.width + x0);
}

Plane encode_plane_rt(const Plane& plane, const CodecConfig& config, const Runtime& rt,
                      BitWriter& out, EncodeStats* stats) {
  const int n = config.block_size;
  const QuantParams q = QuantParams::from_qp(config.qp);
  const Plane src = pad_to_multiple(plane, n);
  Plane recon(src.width, src.height, 0);
  const NeuralPredictor predictor = config.neural_mode ? rt.predictor() : NeuralPredictor{};
  for (int y0 = 0; y0 < src.height; y0 += n) {
    for (int x0 = 0; x0 < src.width; x0 += n) {
      const RefArray refs = gather_references(recon, x0, y0, n);
      std::vector<float> context;
      if (config.neural_mode) context = gather_context(recon, x0, y0, n, config.context_width, refs);
      ModeDecision d = rd_select_mode(extract_block(src, x0, y0, n), refs, context, q, config,
                                      config.neural_mode ? &predictor : nullptr);
      entropy_encode_block({d.neural, d.mode, d.levels}, out);
      if (config.inloop_filter) apply_block_filter(d.recon, *rt.filter_graph, *rt.filter_weights);
      store_block(recon, d.recon, x0, y0);
      if (stats) {
        ++stats->mode_counts[d.mode];
        ++stats->blocks;
      }
    }
  }
  return crop(recon, plane.width, plane.height);
}

Plane decode_plane_rt(int width, int height, const CodecConfig& config, const Runtime& rt,
                      BitReader& in) {
  const int n = config.block_size;
  const QuantParams q = QuantParams::from_qp(config.qp);
  const int pw = (width + n - 1) / n * n, ph = (height + n - 1) / n * n;
  Plane recon(pw, ph, 0);
  for (int y0 = 0; y0 < ph; y0 += n) {
    for (int x0 = 0; x0 < pw; x0 += n) {
      const RefArray refs = gather_references(recon, x0, y0, n);
      const BlockSyntax syntax = entropy_decode_block(in, n * n);
      Plane pred;
      if (syntax.neural) {
        if (!config.neural_mode) throw CorruptStream("neural block in a stream without neural mode");
        const auto context = gather_context(recon, x0, y0, n, config.context_width, refs);
        pred = predict_neural(context, *rt.intra_graph, *rt.intra_weights, n);
      } else {
        pred = predict_intra(refs, syntax.mode, n);
      }
      Plane block = reconstruct_block(pred, syntax.levels, q);
      if (config.inloop_filter) apply_block_filter(block, *rt.filter_graph, *rt.filter_weights);
      store_block(recon, block, x0, y0);
    }
  }
  return crop(recon, width, height);
}

}  // namespace

Plane encode_plane(const Plane& plane, const CodecConfig& config, const CodecModels* models,
                   BitWriter& out, EncodeStats* stats) {
  return encode_plane_rt(plane, config, resolve(config, models), out, stats);
}

EncodeResult encode_frame(const Frame& frame, const CodecConfig& config,
                          const CodecModels* models) {
  if (frame.width() > 0xFFFF || frame.height() > 0xFFFF)
    throw ContractViolation("frame too large for the stream header");
  const Runtime rt = resolve(config, models);
  EncodeResult r;
  BitWriter bits;
  for (int c = 0; c < 3; ++c)
    r.recon.plane(c) = encode_plane_rt(frame.plane(c), config, rt, bits, &r.stats);
  r.stream.width = frame.width();
  r.stream.height = frame.height();
  r.stream.qp = config.qp;
  r.stream.neural_mode = config.neural_mode;
  r.stream.inloop_filter = config.inloop_filter;
  r.stream.bank_id = rt.bank_id;
  r.stream.payload = bits.bytes();
  r.stream.payload_bits = bits.bit_count();
  return r;
}

Frame decode_frame(const Bitstream& stream, std::span<const CodecModels> banks) {
  CodecConfig config;
  config.qp = stream.qp;
  config.neural_mode = stream.neural_mode;
  config.inloop_filter = stream.inloop_filter;
  const CodecModels* models = nullptr;
  if (stream.neural_mode || stream.inloop_filter) {
    for (const CodecModels& m : banks)
      if (m.id == stream.bank_id) models = &m;
    if (!models)
      throw MissingModel(stream.bank_id,
                         "stream needs model bank " + std::to_string(stream.bank_id) +
                             ", which is not loaded");
  }
  const Runtime rt = resolve(config, models);
  if (stream.payload_bits > stream.payload.size() * 8)
    throw CorruptStream("declared payload length exceeds data");
  BitReader in(stream.payload, stream.payload_bits);
  Frame f;
  f.y = decode_plane_rt(stream.width, stream.height, config, rt, in);
  const int cw = (stream.width + 1) / 2, ch = (stream.height + 1) / 2;
  f.u = decode_plane_rt(cw, ch, config, rt, in);
  f.v = decode_plane_rt(cw, ch, config, rt, in);
  if (in.remaining() >= 8) throw CorruptStream("trailing data after the last block");
  while (in.remaining() > 0)
    if (in.get_bit()) throw CorruptStream("non-zero padding after the last block");
  return f;
}

}  // namespace incodec
