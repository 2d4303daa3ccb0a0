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

#include "incodec/graph.hpp"

#include <regex>
#include <sstream>

namespace incodec {

const char* op_kind_name(OpKind kind) {
  switch (kind) {
    case OpKind::input: return "input";
    case OpKind::conv: return "conv";
    case OpKind::relu: return "relu";
    case OpKind::concat: return "concat";
    case OpKind::residual_add_input: return "residual_add_input";
    case OpKind::fully_connected: return "fully_connected";
  }
  return "?";
}

NetworkGraph::NetworkGraph(std::string arch_tag, int input_channels, bool spatial)
    : arch_tag_(std::move(arch_tag)), spatial_(spatial) {
  if (input_channels <= 0) throw ContractViolation("graph input channels must be positive");
  Node in;
  in.id = "input";
  in.kind = OpKind::input;
  in.channels = input_channels;
  nodes_.push_back(std::move(in));
}

void NetworkGraph::require_input(int input) const {
  if (input < 0 || input >= static_cast<int>(nodes_.size()))
    throw ContractViolation("graph " + arch_tag_ + ": producer index " + std::to_string(input) +
                            " does not exist yet");
}

int NetworkGraph::push(Node n) {
  if (find(n.id)) throw ContractViolation("graph " + arch_tag_ + ": duplicate node id " + n.id);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int NetworkGraph::add_conv(const std::string& id, int input, int out_ch, int kh, int kw) {
  require_input(input);
  if (!spatial_) throw ContractViolation("conv node " + id + " in a vector graph");
  Node n;
  n.id = id;
  n.kind = OpKind::conv;
  n.kernel = {out_ch, nodes_[input].channels, kh, kw};
  n.inputs = {input};
  n.channels = out_ch;
  return push(std::move(n));
}

int NetworkGraph::add_fc(const std::string& id, int input, int out_len) {
  require_input(input);
  if (spatial_) throw ContractViolation("fully_connected node " + id + " in a spatial graph");
  Node n;
  n.id = id;
  n.kind = OpKind::fully_connected;
  n.kernel = {out_len, nodes_[input].channels, 1, 1};
  n.inputs = {input};
  n.channels = out_len;
  return push(std::move(n));
}

int NetworkGraph::add_relu(const std::string& id, int input) {
  require_input(input);
  Node n;
  n.id = id;
  n.kind = OpKind::relu;
  n.inputs = {input};
  n.channels = nodes_[input].channels;
  return push(std::move(n));
}

int NetworkGraph::add_concat(const std::string& id, std::vector<int> inputs) {
  if (inputs.empty()) throw ContractViolation("concat node " + id + " has no inputs");
  Node n;
  n.id = id;
  n.kind = OpKind::concat;
  for (int i : inputs) {
    require_input(i);
    n.channels += nodes_[i].channels;
  }
  n.inputs = std::move(inputs);
  return push(std::move(n));
}

int NetworkGraph::add_residual_input(const std::string& id, int input) {
  require_input(input);
  if (nodes_[input].channels != input_channels())
    throw ContractViolation("residual node " + id + ": producer has " +
                            std::to_string(nodes_[input].channels) + " channels, input has " +
                            std::to_string(input_channels()));
  Node n;
  n.id = id;
  n.kind = OpKind::residual_add_input;
  n.inputs = {input};
  n.channels = input_channels();
  return push(std::move(n));
}

std::vector<int> NetworkGraph::parameter_nodes() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i)
    if (nodes_[i].kind == OpKind::conv || nodes_[i].kind == OpKind::fully_connected)
      out.push_back(i);
  return out;
}

std::optional<int> NetworkGraph::find(const std::string& id) const {
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i)
    if (nodes_[i].id == id) return i;
  return std::nullopt;
}

std::size_t NetworkGraph::residual_count() const {
  std::size_t n = 0;
  for (const Node& node : nodes_) n += node.kind == OpKind::residual_add_input;
  return n;
}

std::vector<std::uint32_t> layer_dims(const Node& n) {
  const KernelShape& k = n.kernel;
  if (n.kind == OpKind::fully_connected)
    return {static_cast<std::uint32_t>(k.out_ch), static_cast<std::uint32_t>(k.in_ch)};
  return {static_cast<std::uint32_t>(k.out_ch), static_cast<std::uint32_t>(k.in_ch),
          static_cast<std::uint32_t>(k.kh), static_cast<std::uint32_t>(k.kw)};
}

WeightStore zero_weights(const NetworkGraph& g) {
  WeightStore store;
  store.arch_tag = g.arch_tag();
  for (int i : g.parameter_nodes()) {
    const Node& n = g.node(i);
    store.layers[n.id] = {layer_dims(n), std::vector<float>(n.kernel.weight_count(), 0.0f),
                          std::vector<float>(n.kernel.out_ch, 0.0f)};
  }
  return store;
}

template <class T>
void validate_weights(const NetworkGraph& g, const BasicWeightStore<T>& store) {
  for (int i : g.parameter_nodes()) {
    const Node& n = g.node(i);
    auto it = store.layers.find(n.id);
    if (it == store.layers.end())
      throw ContractViolation("weights for layer " + n.id + " are missing");
    const auto& p = it->second;
    if (p.dims != layer_dims(n) || p.weights.size() != n.kernel.weight_count() ||
        p.bias.size() != static_cast<std::size_t>(n.kernel.out_ch))
      throw ContractViolation("weights for layer " + n.id + " do not match shape " +
                              n.kernel.str());
  }
}

namespace {

// Inception block: three branches, each opened by a 1x1 conv; branch B adds
// parallel 1x3/3x1 convs, branch C a serial 3x3 then parallel 1x3/3x1.
int add_inception_block(NetworkGraph& g, const std::string& name, int input, int branch) {
  auto conv_relu = [&](const std::string& id, int in, int kh, int kw) {
    return g.add_relu(id + ".relu", g.add_conv(id, in, branch, kh, kw));
  };
  const int a = conv_relu(name + ".a.1x1", input, 1, 1);

  const int b1 = conv_relu(name + ".b.1x1", input, 1, 1);
  const int b13 = conv_relu(name + ".b.1x3", b1, 1, 3);
  const int b31 = conv_relu(name + ".b.3x1", b1, 3, 1);
  const int b = g.add_concat(name + ".b.cat", {b13, b31});

  const int c1 = conv_relu(name + ".c.1x1", input, 1, 1);
  const int c33 = conv_relu(name + ".c.3x3", c1, 3, 3);
  const int c13 = conv_relu(name + ".c.1x3", c33, 1, 3);
  const int c31 = conv_relu(name + ".c.3x1", c33, 3, 1);
  const int c = g.add_concat(name + ".c.cat", {c13, c31});

  return g.add_concat(name + ".cat", {a, b, c});
}

std::string inception_tag(int num_blocks, int pre, int branch) {
  std::string tag = "inception" + std::to_string(num_blocks);
  if (pre != 64 || branch != 32)
    tag += "w" + std::to_string(pre) + "b" + std::to_string(branch);
  return tag;
}

}  // namespace

NetworkGraph build_inception_filter(int num_blocks, int pre_channels, int branch_channels) {
  if (num_blocks < 0 || pre_channels <= 0 || branch_channels <= 0)
    throw ContractViolation("build_inception_filter: invalid configuration");
  NetworkGraph g(inception_tag(num_blocks, pre_channels, branch_channels), 1, true);
  int x = g.add_relu("pre1.relu", g.add_conv("pre1", 0, pre_channels, 3, 3));
  x = g.add_relu("pre2.relu", g.add_conv("pre2", x, pre_channels, 3, 3));
  for (int b = 1; b <= num_blocks; ++b) {
    char name[16];
    std::snprintf(name, sizeof name, "block%02d", b);
    x = add_inception_block(g, name, x, branch_channels);
  }
  x = g.add_conv("post", x, 1, 3, 3);
  g.add_residual_input("residual", x);
  return g;
}

NetworkGraph build_vrcnn() {
  NetworkGraph g("vrcnn", 1, true);
  const int l1 = g.add_relu("layer1.relu", g.add_conv("layer1", 0, 64, 5, 5));
  const int l2a = g.add_relu("layer2.5x5.relu", g.add_conv("layer2.5x5", l1, 16, 5, 5));
  const int l2b = g.add_relu("layer2.3x3.relu", g.add_conv("layer2.3x3", l1, 32, 3, 3));
  const int l2 = g.add_concat("layer2.cat", {l2a, l2b});
  const int l3a = g.add_relu("layer3.3x3.relu", g.add_conv("layer3.3x3", l2, 16, 3, 3));
  const int l3b = g.add_relu("layer3.1x1.relu", g.add_conv("layer3.1x1", l2, 32, 1, 1));
  const int l3 = g.add_concat("layer3.cat", {l3a, l3b});
  const int l4 = g.add_conv("layer4", l3, 1, 3, 3);
  g.add_residual_input("residual", l4);
  return g;
}

NetworkGraph build_arcnn() {
  NetworkGraph g("arcnn", 1, true);
  int x = g.add_relu("extract.relu", g.add_conv("extract", 0, 64, 9, 9));
  x = g.add_relu("enhance.relu", g.add_conv("enhance", x, 32, 7, 7));
  x = g.add_relu("map.relu", g.add_conv("map", x, 16, 1, 1));
  g.add_conv("reconstruct", x, 1, 5, 5);
  return g;
}

int fc_context_length(int block_size, int context_width) {
  const int outer = block_size + context_width;
  return outer * outer - block_size * block_size;
}

NetworkGraph build_fc_predictor(int block_size, int context_width,
                                const std::vector<int>& hidden_sizes) {
  if (block_size != 4 && block_size != 8 && block_size != 16 && block_size != 32)
    throw ContractViolation("build_fc_predictor: block size must be 4, 8, 16 or 32");
  if (context_width < 1) throw ContractViolation("build_fc_predictor: context width must be >= 1");
  std::ostringstream tag;
  tag << "fc_n" << block_size << "_k" << context_width;
  if (!hidden_sizes.empty()) {
    tag << "_h";
    for (std::size_t i = 0; i < hidden_sizes.size(); ++i) tag << (i ? "x" : "") << hidden_sizes[i];
  }
  NetworkGraph g(tag.str(), fc_context_length(block_size, context_width), false);
  int x = 0;
  for (std::size_t i = 0; i < hidden_sizes.size(); ++i) {
    if (hidden_sizes[i] <= 0) throw ContractViolation("build_fc_predictor: hidden size must be > 0");
    const std::string id = "fc" + std::to_string(i + 1);
    x = g.add_relu(id + ".relu", g.add_fc(id, x, hidden_sizes[i]));
  }
  g.add_fc("out", x, block_size * block_size);
  return g;
}

NetworkGraph build_from_tag(const std::string& tag) {
  static const std::regex inception(R"(inception(\d+)(?:w(\d+)b(\d+))?)");
  static const std::regex fc(R"(fc_n(\d+)_k(\d+)(?:_h(\d+(?:x\d+)*))?)");
  std::smatch m;
  if (std::regex_match(tag, m, inception)) {
    const int blocks = std::stoi(m[1]);
    if (m[2].matched) return build_inception_filter(blocks, std::stoi(m[2]), std::stoi(m[3]));
    return build_inception_filter(blocks);
  }
  if (tag == "vrcnn") return build_vrcnn();
  if (tag == "arcnn") return build_arcnn();
  if (std::regex_match(tag, m, fc)) {
    std::vector<int> hidden;
    if (m[3].matched) {
      std::istringstream is(m[3].str());
      std::string part;
      while (std::getline(is, part, 'x')) hidden.push_back(std::stoi(part));
    }
    return build_fc_predictor(std::stoi(m[1]), std::stoi(m[2]), hidden);
  }
  throw ContractViolation("unknown architecture tag '" + tag + "'");
}

std::size_t count_parameters(const NetworkGraph& g, int node_index, ParamConvention convention) {
  const Node& n = g.node(node_index);
  if (n.kind != OpKind::conv && n.kind != OpKind::fully_connected) return 0;
  return convention == ParamConvention::with_bias ? n.kernel.param_count()
                                                  : n.kernel.weight_count();
}

std::size_t count_parameters(const NetworkGraph& g, ParamConvention convention) {
  std::size_t total = 0;
  for (int i : g.parameter_nodes()) total += count_parameters(g, i, convention);
  return total;
}

namespace {

template <class T>
KernelRef<T> kernel_of(const Node& n, const BasicWeightStore<T>& store) {
  auto it = store.layers.find(n.id);
  if (it == store.layers.end()) throw ContractViolation("weights for layer " + n.id + " are missing");
  return {n.kernel, it->second.weights, it->second.bias};
}

template <class T>
void check_input_shape(const NetworkGraph& g, const BasicTensor<T>& input) {
  if (input.channels() != g.input_channels() ||
      (!g.spatial() && (input.height() != 1 || input.width() != 1)))
    throw ContractViolation("graph " + g.arch_tag() + ": input " + input.shape().str() +
                            " does not match declared input of " +
                            std::to_string(g.input_channels()) + " channels");
}

}  // namespace

template <class T>
ForwardTrace<T> forward_trace(const NetworkGraph& g, const BasicWeightStore<T>& store,
                              const BasicTensor<T>& input) {
  check_input_shape(g, input);
  validate_weights(g, store);
  ForwardTrace<T> trace;
  trace.values.reserve(g.nodes().size());
  trace.values.push_back(input);
  for (std::size_t i = 1; i < g.nodes().size(); ++i) {
    const Node& n = g.nodes()[i];
    const auto& in = trace.values[n.inputs.front()];
    switch (n.kind) {
      case OpKind::conv: trace.values.push_back(conv2d_same(in, kernel_of(n, store))); break;
      case OpKind::fully_connected:
        trace.values.push_back(fully_connected(in, kernel_of(n, store)));
        break;
      case OpKind::relu: trace.values.push_back(relu(in)); break;
      case OpKind::concat: {
        std::vector<const BasicTensor<T>*> parts;
        for (int p : n.inputs) parts.push_back(&trace.values[p]);
        trace.values.push_back(concat_channels<T>(std::span<const BasicTensor<T>* const>(parts)));
        break;
      }
      case OpKind::residual_add_input: trace.values.push_back(add(in, trace.values[0])); break;
      case OpKind::input: throw ContractViolation("graph has a second input node");
    }
  }
  return trace;
}

template <class T>
BasicTensor<T> forward(const NetworkGraph& g, const BasicWeightStore<T>& store,
                       const BasicTensor<T>& input) {
  return forward_trace(g, store, input).output();
}

template <class T>
BasicWeightStore<T> backward(const NetworkGraph& g, const BasicWeightStore<T>& store,
                             const ForwardTrace<T>& trace, const BasicTensor<T>& grad_output,
                             BasicTensor<T>* grad_input) {
  const std::size_t count = g.nodes().size();
  if (trace.values.size() != count)
    throw ContractViolation("backward: trace does not belong to graph " + g.arch_tag());
  if (!(grad_output.shape() == trace.output().shape()))
    throw ContractViolation("backward: gradient " + grad_output.shape().str() +
                            " does not match output " + trace.output().shape().str());

  std::vector<std::optional<BasicTensor<T>>> grads(count);
  grads.back() = grad_output;
  auto accumulate = [&](int node, BasicTensor<T> g_in) {
    if (grads[node]) {
      grads[node] = add(*grads[node], g_in);
    } else {
      grads[node] = std::move(g_in);
    }
  };

  BasicWeightStore<T> out;
  out.arch_tag = store.arch_tag;
  for (std::size_t idx = count - 1; idx >= 1; --idx) {
    const Node& n = g.nodes()[idx];
    if (!grads[idx]) continue;
    const BasicTensor<T> go = std::move(*grads[idx]);
    grads[idx].reset();
    const int src = n.inputs.front();
    switch (n.kind) {
      case OpKind::conv:
      case OpKind::fully_connected: {
        const KernelRef<T> k = kernel_of(n, store);
        BasicGradBundle<T> gb = n.kind == OpKind::conv
                                    ? conv2d_backward(trace.values[src], k, go)
                                    : fully_connected_backward(trace.values[src], k, go);
        out.layers[n.id] = {layer_dims(n), std::move(gb.grad_weights), std::move(gb.grad_bias)};
        accumulate(src, std::move(gb.grad_input));
        break;
      }
      case OpKind::relu: accumulate(src, relu_backward(trace.values[src], go)); break;
      case OpKind::concat: {
        int first = 0;
        for (int p : n.inputs) {
          const int ch = g.node(p).channels;
          accumulate(p, slice_channels(go, first, ch));
          first += ch;
        }
        break;
      }
      case OpKind::residual_add_input:
        accumulate(src, go);
        accumulate(0, go);
        break;
      case OpKind::input: break;
    }
  }
  // Layers whose output never reached the loss still get zero gradients.
  for (int i : g.parameter_nodes()) {
    const Node& n = g.node(i);
    if (!out.layers.count(n.id))
      out.layers[n.id] = {layer_dims(n), std::vector<T>(n.kernel.weight_count(), T(0)),
                          std::vector<T>(n.kernel.out_ch, T(0))};
  }
  if (grad_input)
    *grad_input = grads[0] ? std::move(*grads[0]) : BasicTensor<T>(trace.values[0].shape());
  return out;
}

#define INCODEC_INSTANTIATE(T)                                                                  \
  template void validate_weights<T>(const NetworkGraph&, const BasicWeightStore<T>&);           \
  template ForwardTrace<T> forward_trace<T>(const NetworkGraph&, const BasicWeightStore<T>&,    \
                                            const BasicTensor<T>&);                             \
  template BasicTensor<T> forward<T>(const NetworkGraph&, const BasicWeightStore<T>&,           \
                                     const BasicTensor<T>&);                                    \
  template BasicWeightStore<T> backward<T>(const NetworkGraph&, const BasicWeightStore<T>&,     \
                                           const ForwardTrace<T>&, const BasicTensor<T>&,       \
                                           BasicTensor<T>*);

INCODEC_INSTANTIATE(float)
INCODEC_INSTANTIATE(double)

#undef INCODEC_INSTANTIATE

}  // namespace incodec
