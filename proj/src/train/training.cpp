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

#include "incodec/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

namespace incodec {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || batch_size <= 0 || steps < 0 || num_blocks < 0 ||
      pre_channels <= 0 || branch_channels <= 0 || qp < 0 || qp > kMaxQp)
    throw ContractViolation("invalid training configuration");
}

NetworkGraph TrainConfig::filter_graph() const {
  return build_inception_filter(num_blocks, pre_channels, branch_channels);
}

void FcTrainConfig::validate() const {
  const bool bad_width = std::any_of(hidden.begin(), hidden.end(), [](int h) { return h <= 0; });
  if (!(learning_rate > 0.0) || batch_size <= 0 || steps < 0 || samples == 0 || bad_width)
    throw ContractViolation("invalid predictor training configuration");
}

namespace {

Tensor plane_block_tensor(const Plane& p, int x0, int y0, int n) {
  Tensor t(1, n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) t.at(0, y, x) = static_cast<float>(p.at(x0 + x, y0 + y)) / 255.0f;
  return t;
}

template <class T>
void add_into(BasicWeightStore<T>& acc, const BasicWeightStore<T>& g) {
  for (auto& [id, p] : acc.layers) {
    const auto& q = g.layers.at(id);
    for (std::size_t i = 0; i < p.weights.size(); ++i) p.weights[i] += q.weights[i];
    for (std::size_t i = 0; i < p.bias.size(); ++i) p.bias[i] += q.bias[i];
  }
}

template <class T>
void scale(BasicWeightStore<T>& s, T f) {
  for (auto& [id, p] : s.layers) {
    for (T& v : p.weights) v *= f;
    for (T& v : p.bias) v *= f;
  }
}

// Shuffled index stream, reshuffled at every pass.
class BatchSampler {
 public:
  BatchSampler(std::size_t n, std::uint64_t seed) : order_(n), rng_(seed) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::shuffle(order_.begin(), order_.end(), rng_);
  }
  std::size_t next() {
    if (pos_ == order_.size()) {
      std::shuffle(order_.begin(), order_.end(), rng_);
      pos_ = 0;
    }
    return order_[pos_++];
  }

 private:
  std::vector<std::size_t> order_;
  std::mt19937_64 rng_;
  std::size_t pos_ = 0;
};

// Shared Adam loop over (input, target) examples.
template <class Example>
TrainResult run_training(const std::vector<Example>& data, const NetworkGraph& graph,
                         WeightStore weights, double lr, int batch_size, long steps,
                         std::uint64_t seed, const StepCallback& on_step) {
  if (data.empty()) throw ContractViolation("training set is empty");
  TrainResult r;
  AdamState state;
  BatchSampler sampler(data.size(), seed ^ 0x9E3779B97F4A7C15ull);
  for (long step = 0; step < steps; ++step) {
    WeightStore grad_sum;
    double loss_sum = 0.0;
    for (int b = 0; b < batch_size; ++b) {
      const Example& ex = data[sampler.next()];
      WeightStore g;
      LossResult<float> loss;
      try {
        const ForwardTrace<float> trace = forward_trace(graph, weights, ex.input());
        loss = mse_loss(trace.output(), ex.output());
        g = backward(graph, weights, trace, loss.grad);
      } catch (const NumericError& e) {
        // Activations overflowed before the loss could be formed.
        throw DivergenceError(step, "training diverged at step " + std::to_string(step) + ": " +
                                        e.what());
      }
      if (b == 0)
        grad_sum = std::move(g);
      else
        add_into(grad_sum, g);
      loss_sum += loss.loss;
    }
    const double mean_loss = loss_sum / batch_size;
    if (!std::isfinite(mean_loss))
      throw DivergenceError(step, "training diverged at step " + std::to_string(step));
    scale(grad_sum, 1.0f / static_cast<float>(batch_size));
    adam_step(weights, grad_sum, state, lr);
    r.loss_curve.push_back(mean_loss);
    if (on_step) on_step(step, mean_loss);
  }
  r.weights = std::move(weights);
  return r;
}

struct FilterExample {
  const PatchPair* pair;
  const Tensor& input() const { return pair->degraded; }
  const Tensor& output() const { return pair->target; }
};

struct FcExample {
  const ContextSample* sample;
  const Tensor& input() const { return sample->context; }
  const Tensor& output() const { return sample->block; }
};

}  // namespace

std::vector<PatchPair> make_filter_dataset(const std::vector<Plane>& images, int qp,
                                           int block_size) {
  CodecConfig config;
  config.qp = qp;
  config.block_size = block_size;
  std::vector<PatchPair> out;
  for (const Plane& img : images) {
    if (img.width < block_size || img.height < block_size)
      throw ContractViolation("make_filter_dataset: image " + std::to_string(img.width) + "x" +
                              std::to_string(img.height) + " is smaller than one block");
    BitWriter sink;
    const Plane recon = encode_plane(img, config, nullptr, sink);
    for (int y0 = 0; y0 + block_size <= img.height; y0 += block_size)
      for (int x0 = 0; x0 + block_size <= img.width; x0 += block_size)
        out.push_back({plane_block_tensor(recon, x0, y0, block_size),
                       plane_block_tensor(img, x0, y0, block_size), qp});
  }
  return out;
}

template <class T>
LossResult<T> mse_loss(const BasicTensor<T>& output, const BasicTensor<T>& target) {
  if (!(output.shape() == target.shape()))
    throw ContractViolation("mse_loss: shape mismatch " + output.shape().str() + " vs " +
                            target.shape().str());
  LossResult<T> r;
  r.grad = BasicTensor<T>(output.shape());
  const double count = static_cast<double>(output.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < output.size(); ++i) {
    const double d = static_cast<double>(output.data()[i]) - target.data()[i];
    sum += d * d;
    r.grad.data()[i] = static_cast<T>(2.0 * d / count);
  }
  r.loss = sum / count;
  return r;
}

template LossResult<float> mse_loss<float>(const Tensor&, const Tensor&);
template LossResult<double> mse_loss<double>(const TensorD&, const TensorD&);

void adam_step(WeightStore& params, const WeightStore& grads, AdamState& state, double lr) {
  ++state.t;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  auto update = [&](std::vector<float>& p, const std::vector<float>& g, std::vector<float>& m,
                    std::vector<float>& v) {
    if (g.size() != p.size()) throw ContractViolation("adam_step: gradient shape mismatch");
    if (m.empty()) {
      m.assign(p.size(), 0.0f);
      v.assign(p.size(), 0.0f);
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double mi = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      const double vi = state.beta2 * v[i] + (1.0 - state.beta2) * static_cast<double>(g[i]) * g[i];
      m[i] = static_cast<float>(mi);
      v[i] = static_cast<float>(vi);
      p[i] = static_cast<float>(p[i] - lr * (mi / c1) / (std::sqrt(vi / c2) + state.epsilon));
    }
  };
  for (auto& [id, p] : params.layers) {
    auto it = grads.layers.find(id);
    if (it == grads.layers.end()) throw ContractViolation("adam_step: no gradient for " + id);
    AdamMoments& mom = state.moments[id];
    update(p.weights, it->second.weights, mom.m_w, mom.v_w);
    update(p.bias, it->second.bias, mom.m_b, mom.v_b);
  }
}

WeightStore init_weights(const NetworkGraph& g, std::uint64_t seed) {
  WeightStore store = zero_weights(g);
  std::mt19937_64 rng(seed);
  for (int i : g.parameter_nodes()) {
    const Node& n = g.node(i);
    const double rf = static_cast<double>(n.kernel.kh) * n.kernel.kw;
    const double a = std::sqrt(6.0 / (n.kernel.in_ch * rf + n.kernel.out_ch * rf));
    std::uniform_real_distribution<float> dist(static_cast<float>(-a), static_cast<float>(a));
    for (float& w : store.layers[n.id].weights) w = dist(rng);
  }
  return store;
}

TrainResult train_filter(const std::vector<PatchPair>& dataset, const NetworkGraph& graph,
                         const TrainConfig& config, const StepCallback& on_step) {
  config.validate();
  if (dataset.empty()) throw ContractViolation("train_filter: empty dataset");
  std::vector<FilterExample> data;
  for (const PatchPair& p : dataset) data.push_back({&p});
  return run_training(data, graph, init_weights(graph, config.seed), config.learning_rate,
                      config.batch_size, config.steps, config.seed, on_step);
}

double evaluate_filter_mse(const std::vector<PatchPair>& dataset, const NetworkGraph& graph,
                           const WeightStore& weights) {
  if (dataset.empty()) throw ContractViolation("evaluate_filter_mse: empty dataset");
  double sum = 0.0;
  for (const PatchPair& p : dataset) sum += mse_loss(forward(graph, weights, p.degraded), p.target).loss;
  return sum / static_cast<double>(dataset.size());
}

double degraded_mse(const std::vector<PatchPair>& dataset) {
  if (dataset.empty()) throw ContractViolation("degraded_mse: empty dataset");
  double sum = 0.0;
  for (const PatchPair& p : dataset) sum += mse_loss(p.degraded, p.target).loss;
  return sum / static_cast<double>(dataset.size());
}

std::vector<ContextSample> sample_contexts(const std::vector<Plane>& images, int n, int k,
                                           std::size_t count, std::uint64_t seed) {
  std::vector<const Plane*> usable;
  for (const Plane& img : images)
    if (img.width >= n + k && img.height >= n + k) usable.push_back(&img);
  if (usable.empty())
    throw ContractViolation("sample_contexts: no image holds a " + std::to_string(n + k) +
                            "-pixel context window");
  std::mt19937_64 rng(seed);
  std::vector<ContextSample> out;
  out.reserve(count);
  const int len = fc_context_length(n, k);
  for (std::size_t s = 0; s < count; ++s) {
    const Plane& img = *usable[std::uniform_int_distribution<std::size_t>(0, usable.size() - 1)(rng)];
    const int x0 = std::uniform_int_distribution<int>(k, img.width - n)(rng);
    const int y0 = std::uniform_int_distribution<int>(k, img.height - n)(rng);
    ContextSample cs{Tensor(len, 1, 1), Tensor(n * n, 1, 1)};
    float* c = cs.context.data();
    for (int y = y0 - k; y < y0; ++y)
      for (int x = x0 - k; x < x0 + n; ++x) *c++ = img.at(x, y) / 255.0f;
    for (int y = y0; y < y0 + n; ++y)
      for (int x = x0 - k; x < x0; ++x) *c++ = img.at(x, y) / 255.0f;
    float* b = cs.block.data();
    for (int y = y0; y < y0 + n; ++y)
      for (int x = x0; x < x0 + n; ++x) *b++ = img.at(x, y) / 255.0f;
    out.push_back(std::move(cs));
  }
  return out;
}

TrainResult train_fc_predictor(const std::vector<Plane>& images, int block_size,
                               int context_width, const FcTrainConfig& config,
                               const StepCallback& on_step) {
  config.validate();
  const NetworkGraph graph = build_fc_predictor(block_size, context_width, config.hidden);
  const std::vector<ContextSample> samples =
      sample_contexts(images, block_size, context_width, config.samples, config.seed);
  std::vector<FcExample> data;
  for (const ContextSample& s : samples) data.push_back({&s});
  return run_training(data, graph, init_weights(graph, config.seed), config.learning_rate,
                      config.batch_size, config.steps, config.seed, on_step);
}

double evaluate_fc_mse(const std::vector<ContextSample>& samples, const NetworkGraph& graph,
                       const WeightStore& weights) {
  if (samples.empty()) throw ContractViolation("evaluate_fc_mse: no samples");
  double sum = 0.0;
  for (const ContextSample& s : samples) sum += mse_loss(forward(graph, weights, s.context), s.block).loss;
  return sum / static_cast<double>(samples.size());
}

ModelBank build_model_bank(const std::vector<Plane>& images, const std::vector<int>& qps,
                           const TrainConfig& config, const StepCallback& on_step) {
  config.validate();
  const NetworkGraph graph = config.filter_graph();
  ModelBank bank;
  bank.arch_tag = graph.arch_tag();
  bank.bands = bands_for(qps);
  for (std::size_t i = 0; i < bank.bands.size(); ++i) {
    TrainConfig band_cfg = config;
    band_cfg.qp = bank.bands[i].train_qp;
    band_cfg.seed = config.seed + i;
    const auto dataset = make_filter_dataset(images, band_cfg.qp);
    bank.weights.push_back(train_filter(dataset, graph, band_cfg, on_step).weights);
  }
  bank.validate();
  return bank;
}

void write_loss_csv(const std::filesystem::path& path, const std::vector<double>& curve) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  os << "step,loss\n";
  os.precision(9);
  for (std::size_t i = 0; i < curve.size(); ++i) os << i << "," << curve[i] << "\n";
}

std::vector<std::filesystem::path> read_manifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open manifest " + path.string());
  std::vector<std::filesystem::path> out;
  std::string line;
  while (std::getline(is, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    std::filesystem::path p = line.substr(b, e - b + 1);
    if (p.is_relative()) p = path.parent_path() / p;
    out.push_back(p);
  }
  return out;
}

}  // namespace incodec
