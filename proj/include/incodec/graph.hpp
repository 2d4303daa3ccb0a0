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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "incodec/tensor.hpp"

namespace incodec {

enum class OpKind { input, conv, relu, concat, residual_add_input, fully_connected };

const char* op_kind_name(OpKind kind);

struct Node {
  std::string id;
  OpKind kind = OpKind::input;
  KernelShape kernel;      // conv and fully_connected only
  std::vector<int> inputs;  // indices of producer nodes
  int channels = 0;         // output channel count (vector length for FC nets)
};

// Directed acyclic op graph in topological order. Node 0 is the input.
// Spatial graphs (filters) take (channels, h, w) for any h, w; vector graphs
// (fully-connected predictors) take (len, 1, 1).
class NetworkGraph {
 public:
  NetworkGraph(std::string arch_tag, int input_channels, bool spatial);

  int add_conv(const std::string& id, int input, int out_ch, int kh, int kw);
  int add_fc(const std::string& id, int input, int out_len);
  int add_relu(const std::string& id, int input);
  int add_concat(const std::string& id, std::vector<int> inputs);
  // Adds the graph input to `input` (residual learning).
  int add_residual_input(const std::string& id, int input);

  const std::string& arch_tag() const { return arch_tag_; }
  bool spatial() const { return spatial_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int i) const { return nodes_.at(i); }
  int output() const { return static_cast<int>(nodes_.size()) - 1; }
  int input_channels() const { return nodes_.front().channels; }
  int output_channels() const { return nodes_.back().channels; }
  // Nodes that carry weights (conv and fully_connected) in graph order.
  std::vector<int> parameter_nodes() const;
  std::optional<int> find(const std::string& id) const;
  std::size_t residual_count() const;

 private:
  int push(Node n);
  void require_input(int input) const;

  std::string arch_tag_;
  bool spatial_;
  std::vector<Node> nodes_;
};

template <class T>
struct BasicLayerParams {
  std::vector<std::uint32_t> dims;  // [out, in, kh, kw] for conv, [out, in] for FC
  std::vector<T> weights;
  std::vector<T> bias;

  bool operator==(const BasicLayerParams&) const = default;
};

// Per-node parameters keyed by node id.
template <class T>
struct BasicWeightStore {
  std::string arch_tag;
  std::map<std::string, BasicLayerParams<T>> layers;

  template <class U>
  BasicWeightStore<U> cast() const {
    BasicWeightStore<U> out;
    out.arch_tag = arch_tag;
    for (const auto& [id, p] : layers)
      out.layers[id] = {p.dims, std::vector<U>(p.weights.begin(), p.weights.end()),
                        std::vector<U>(p.bias.begin(), p.bias.end())};
    return out;
  }
  bool operator==(const BasicWeightStore&) const = default;
};

using LayerParams = BasicLayerParams<float>;
using WeightStore = BasicWeightStore<float>;
using WeightStoreD = BasicWeightStore<double>;

// Weight-file dims for a parameter node.
std::vector<std::uint32_t> layer_dims(const Node& n);

// A store with every parameter node present and zero-filled.
WeightStore zero_weights(const NetworkGraph& g);

// Throws ContractViolation if a parameter node is missing or mis-shaped.
template <class T>
void validate_weights(const NetworkGraph& g, const BasicWeightStore<T>& store);

// Full graph: two 3x3/64 pre-processing convs, `num_blocks` inception blocks,
// a 3x3 conv to one map and a residual add of the input. `pre_channels` and
// `branch_channels` default to 64 and 32; smaller values give reduced nets.
NetworkGraph build_inception_filter(int num_blocks, int pre_channels = 64,
                                    int branch_channels = 32);
NetworkGraph build_vrcnn();
NetworkGraph build_arcnn();
NetworkGraph build_fc_predictor(int block_size, int context_width,
                                const std::vector<int>& hidden_sizes);

// Rebuild a graph from its arch tag ("inception12", "inception2w32b16",
// "vrcnn", "arcnn", "fc_n32_k4_h512x512").
NetworkGraph build_from_tag(const std::string& tag);

// Length of the flattened L-shaped context: (N+K)^2 - N^2.
int fc_context_length(int block_size, int context_width);

enum class ParamConvention { with_bias, without_bias };

std::size_t count_parameters(const NetworkGraph& g, ParamConvention convention);
std::size_t count_parameters(const NetworkGraph& g, int node_index, ParamConvention convention);

// Every node's output, indexed like graph.nodes().
template <class T>
struct ForwardTrace {
  std::vector<BasicTensor<T>> values;
  const BasicTensor<T>& output() const { return values.back(); }
};

template <class T>
ForwardTrace<T> forward_trace(const NetworkGraph& g, const BasicWeightStore<T>& store,
                              const BasicTensor<T>& input);

template <class T>
BasicTensor<T> forward(const NetworkGraph& g, const BasicWeightStore<T>& store,
                       const BasicTensor<T>& input);

// Backpropagate `grad_output` through a recorded trace. Returns parameter
// gradients keyed like the weight store; `grad_input` receives dL/dinput when
// non-null.
template <class T>
BasicWeightStore<T> backward(const NetworkGraph& g, const BasicWeightStore<T>& store,
                             const ForwardTrace<T>& trace, const BasicTensor<T>& grad_output,
                             BasicTensor<T>* grad_input = nullptr);

}  // namespace incodec
