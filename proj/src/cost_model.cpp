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

#include "rfscope/cost_model.hpp"

#include "rfscope/receptive_field.hpp"

#include <algorithm>

namespace rfscope {

namespace {

// Spatial attention gate: 7x7 conv over [avg, max] channel pools, no bias.
constexpr std::int64_t kSpatialGateParams = 2 * 7 * 7;

std::int64_t se_hidden(std::int64_t channels, std::int64_t ratio) {
  return std::max<std::int64_t>(1, channels / ratio);
}

std::string describe(const Shape &s) {
  return std::to_string(s.height) + "x" + std::to_string(s.width) + "x" +
         std::to_string(s.channels);
}

} // namespace

std::int64_t window_output(std::int64_t in, std::int64_t k_eff,
                           std::int64_t stride, const Padding &padding) {
  switch (padding.mode) {
  case PaddingMode::Same:
    return (in + stride - 1) / stride;
  case PaddingMode::Valid:
    if (in < k_eff)
      return 0;
    return (in - k_eff) / stride + 1;
  case PaddingMode::Explicit: {
    auto padded = in + 2 * padding.amount;
    if (padded < k_eff)
      return 0;
    return (padded - k_eff) / stride + 1;
  }
  }
  return 0;
}

ShapeMap propagate_shapes(const ArchGraph &graph) {
  ShapeMap shapes;
  for (const auto &id : topological_order(graph)) {
    const auto &node = graph.node(id);
    const auto &preds = graph.predecessors(id);
    Shape in = preds.empty()
                   ? Shape{graph.input().height, graph.input().width,
                           graph.input().channels}
                   : shapes.at(preds.front()).out;
    Shape out = in;

    auto spatial = [&](std::int64_t k_eff, std::int64_t stride,
                       const Padding &padding) {
      out.height = window_output(in.height, k_eff, stride, padding);
      out.width = window_output(in.width, k_eff, stride, padding);
      if (out.height < 1 || out.width < 1)
        throw ShapeError("node '" + id + "': window of " +
                         std::to_string(k_eff) + " does not fit input " +
                         describe(in));
    };

    if (const auto *conv = std::get_if<Conv2d>(&node.kind)) {
      spatial(effective_kernel(conv->kernel, conv->dilation), conv->stride,
              conv->padding);
      out.channels = conv->filters;
    } else if (const auto *pool = std::get_if<Pool>(&node.kind)) {
      spatial(pool->kernel, pool->stride, Padding::explicitly(pool->padding));
    } else if (is_kind<GlobalAvgPool>(node.kind)) {
      out = Shape{1, 1, in.channels};
    } else if (const auto *dense = std::get_if<Dense>(&node.kind)) {
      out = Shape{1, 1, dense->units};
    } else if (is_kind<Add>(node.kind)) {
      for (const auto &p : preds) {
        const auto &other = shapes.at(p).out;
        if (!(other == in))
          throw ShapeError("node '" + id + "': Add inputs disagree (" +
                           describe(in) + " from '" + preds.front() + "' vs " +
                           describe(other) + " from '" + p + "')");
      }
    } else if (is_kind<Concat>(node.kind)) {
      out.channels = 0;
      for (const auto &p : preds) {
        const auto &other = shapes.at(p).out;
        if (other.height != in.height || other.width != in.width)
          throw ShapeError("node '" + id + "': Concat spatial dims disagree (" +
                           describe(in) + " vs " + describe(other) + " from '" +
                           p + "')");
        out.channels += other.channels;
      }
    }
    shapes.emplace(id, ShapeInfo{id, out});
  }
  return shapes;
}

std::int64_t layer_params(const LayerKind &kind, const Shape &in,
                          const CostOptions &options) {
  if (const auto *conv = std::get_if<Conv2d>(&kind))
    return conv->kernel * conv->kernel * in.channels * conv->filters +
           (conv->bias ? conv->filters : 0);
  if (const auto *dense = std::get_if<Dense>(&kind))
    return in.elements() * dense->units + (dense->bias ? dense->units : 0);
  if (is_kind<BatchNorm>(kind))
    return 2 * in.channels;
  if (const auto *att = std::get_if<Attention>(&kind)) {
    auto se = 2 * in.channels * se_hidden(in.channels, options.se_ratio);
    switch (att->variant) {
    case AttentionVariant::SE:
      return se;
    case AttentionVariant::Spatial:
      return kSpatialGateParams;
    case AttentionVariant::CBAM:
      return se + kSpatialGateParams;
    }
  }
  return 0;
}

std::int64_t layer_macs(const LayerKind &kind, std::span<const Shape> inputs,
                        const Shape &out, const CostOptions &options) {
  const Shape in = inputs.empty() ? out : inputs.front();
  const std::int64_t out_positions = out.height * out.width;

  if (const auto *conv = std::get_if<Conv2d>(&kind))
    return conv->kernel * conv->kernel * in.channels * conv->filters *
           out_positions;
  if (const auto *dense = std::get_if<Dense>(&kind))
    return in.elements() * dense->units;
  if (const auto *att = std::get_if<Attention>(&kind)) {
    auto plane = in.height * in.width;
    auto se = 2 * in.elements() + 2 * in.channels * se_hidden(in.channels, options.se_ratio);
    auto spatial = 3 * in.elements() + kSpatialGateParams * plane;
    switch (att->variant) {
    case AttentionVariant::SE:
      return se;
    case AttentionVariant::Spatial:
      return spatial;
    case AttentionVariant::CBAM:
      return se + spatial;
    }
  }
  if (!options.count_elementwise)
    return 0;
  if (const auto *pool = std::get_if<Pool>(&kind))
    return pool->kernel * pool->kernel * out.elements();
  if (is_kind<GlobalAvgPool>(kind))
    return in.elements();
  if (is_kind<BatchNorm>(kind) || is_kind<Activation>(kind) || is_kind<Add>(kind))
    return out.elements();
  return 0;
}

CostReport estimate_cost(const ArchGraph &graph, const CostOptions &options) {
  auto shapes = propagate_shapes(graph);
  CostReport report;
  for (const auto &id : topological_order(graph)) {
    const auto &node = graph.node(id);
    std::vector<Shape> inputs;
    for (const auto &p : graph.predecessors(id))
      inputs.push_back(shapes.at(p).out);
    const auto &out = shapes.at(id).out;

    LayerCost cost;
    cost.node_id = id;
    cost.out = out;
    cost.params =
        inputs.empty() ? 0 : layer_params(node.kind, inputs.front(), options);
    cost.macs = layer_macs(node.kind, inputs, out, options);
    report.total_params += cost.params;
    report.total_macs += cost.macs;
    report.per_layer.push_back(std::move(cost));
  }
  report.total_flops = 2 * report.total_macs;
  return report;
}

std::int64_t count_params(const ArchGraph &graph, const CostOptions &options) {
  return estimate_cost(graph, options).total_params;
}

std::int64_t count_macs(const ArchGraph &graph, const CostOptions &options) {
  return estimate_cost(graph, options).total_macs;
}

} // namespace rfscope
