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
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "incodec/codec.hpp"
#include "incodec/graph.hpp"
#include "incodec/image.hpp"
#include "incodec/model_bank.hpp"

namespace incodec {

// Aligned (reconstruction, original) luma blocks, both scaled to [0,1].
struct PatchPair {
  Tensor degraded;
  Tensor target;
  int qp = 0;
};

struct TrainConfig {
  double learning_rate = 1e-4;
  int batch_size = 16;
  long steps = 500;
  std::uint64_t seed = 1;
  int qp = 37;
  // Reduced architecture: inception blocks and channel widths.
  int num_blocks = 2;
  int pre_channels = 64;
  int branch_channels = 32;

  // Throws ContractViolation unless every field is positive (steps may be 0).
  void validate() const;
  NetworkGraph filter_graph() const;
};

// Codes each image at `qp` (filter and neural mode off) and cuts the luma
// reconstruction and original into aligned block pairs on the coding grid.
std::vector<PatchPair> make_filter_dataset(const std::vector<Plane>& images, int qp,
                                           int block_size = 32);

template <class T>
struct LossResult {
  double loss = 0.0;
  BasicTensor<T> grad;
};

// L = mean((out - target)^2); grad = 2 (out - target) / count.
template <class T>
LossResult<T> mse_loss(const BasicTensor<T>& output, const BasicTensor<T>& target);

struct AdamMoments {
  std::vector<float> m_w, v_w, m_b, v_b;
};

struct AdamState {
  long t = 0;
  std::map<std::string, AdamMoments> moments;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// One bias-corrected Adam update of every layer in `params`.
void adam_step(WeightStore& params, const WeightStore& grads, AdamState& state, double lr);

// Glorot-uniform weights, a = sqrt(6 / (fan_in + fan_out)) with fans counted
// over the receptive field; zero biases.
WeightStore init_weights(const NetworkGraph& g, std::uint64_t seed);

struct TrainResult {
  WeightStore weights;
  std::vector<double> loss_curve;  // mean batch loss per step
};

using StepCallback = std::function<void(long step, double loss)>;

// Mini-batch Adam on the MSE between the filtered degraded block and its
// target. Throws DivergenceError if the loss becomes non-finite.
TrainResult train_filter(const std::vector<PatchPair>& dataset, const NetworkGraph& graph,
                         const TrainConfig& config, const StepCallback& on_step = {});

// Mean per-patch MSE of the network output against the targets.
double evaluate_filter_mse(const std::vector<PatchPair>& dataset, const NetworkGraph& graph,
                           const WeightStore& weights);
// Same for the unfiltered degraded patches.
double degraded_mse(const std::vector<PatchPair>& dataset);

struct ContextSample {
  Tensor context;  // (len, 1, 1)
  Tensor block;    // (N*N, 1, 1)
};

// `count` (context, block) pairs at uniformly random positions where the
// whole L-shaped context lies inside the image.
std::vector<ContextSample> sample_contexts(const std::vector<Plane>& images, int block_size,
                                           int context_width, std::size_t count,
                                           std::uint64_t seed);

struct FcTrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 16;
  long steps = 2000;
  std::uint64_t seed = 1;
  std::vector<int> hidden = {512, 512};
  std::size_t samples = 4096;

  void validate() const;
};

TrainResult train_fc_predictor(const std::vector<Plane>& images, int block_size,
                               int context_width, const FcTrainConfig& config,
                               const StepCallback& on_step = {});

double evaluate_fc_mse(const std::vector<ContextSample>& samples, const NetworkGraph& graph,
                       const WeightStore& weights);

// One filter per training QP (seed offset by band index), banded with
// bands_for(qps).
ModelBank build_model_bank(const std::vector<Plane>& images, const std::vector<int>& qps,
                           const TrainConfig& config, const StepCallback& on_step = {});

void write_loss_csv(const std::filesystem::path& path, const std::vector<double>& curve);
// Image paths, one per line; blank lines and '#' comments are skipped.
std::vector<std::filesystem::path> read_manifest(const std::filesystem::path& path);

}  // namespace incodec
