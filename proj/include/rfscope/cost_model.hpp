/**
 * Copyright (c) rfscope contributors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef RFSCOPE_COST_MODEL_HPP
#define RFSCOPE_COST_MODEL_HPP

#include "rfscope/graph.hpp"

#include <span>

namespace rfscope {

struct Shape {
  std::int64_t height = 1;
  std::int64_t width = 1;
  std::int64_t channels = 1;

  std::int64_t elements() const { return height * width * channels; }
  bool operator==(const Shape &) const = default;
};

struct ShapeInfo {
  std::string node_id;
  Shape out;
};

class ShapeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using ShapeMap = std::unordered_map<std::string, ShapeInfo>;

/// Output extent of a sliding window along one axis. Same padding yields
/// ceil(in / stride); valid and explicit padding use the floor formula.
std::int64_t window_output(std::int64_t in, std::int64_t k_eff,
                           std::int64_t stride, const Padding &padding);

ShapeMap propagate_shapes(const ArchGraph &graph);

struct CostOptions {
  /// Count one MAC per output element of BatchNorm, Activation and Add, and
  /// one per window element of pooling layers.
  bool count_elementwise = true;
  /// Squeeze-excitation bottleneck ratio.
  std::int64_t se_ratio = 16;
};

/// Trainable parameters of one layer given its (first) input shape.
std::int64_t layer_params(const LayerKind &kind, const Shape &in,
                          const CostOptions &options = {});

/// Multiply-accumulates of one layer.
std::int64_t layer_macs(const LayerKind &kind, std::span<const Shape> inputs,
                        const Shape &out, const CostOptions &options = {});

struct LayerCost {
  std::string node_id;
  std::int64_t params = 0;
  std::int64_t macs = 0;
  Shape out;
};

struct CostReport {
  std::vector<LayerCost> per_layer; // topological order
  std::int64_t total_params = 0;
  std::int64_t total_macs = 0;
  std::int64_t total_flops = 0; // 2 * total_macs

  /// total_macs / 1e9: the "GFLOPs" figure under the MAC = 1 FLOP reading.
  double reported_gflops_mac1() const {
    return static_cast<double>(total_macs) / 1e9;
  }
};

CostReport estimate_cost(const ArchGraph &graph, const CostOptions &options = {});

std::int64_t count_params(const ArchGraph &graph, const CostOptions &options = {});
std::int64_t count_macs(const ArchGraph &graph, const CostOptions &options = {});

} // namespace rfscope

#endif // RFSCOPE_COST_MODEL_HPP
