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

#include "rfscope/receptive_field.hpp"

#include <algorithm>

namespace rfscope {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out))
    throw GraphError("receptive field arithmetic overflow");
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out))
    throw GraphError("receptive field arithmetic overflow");
  return out;
}

RFState grow(const RFState &state, std::int64_t k_eff, std::int64_t stride,
             bool is_conv) {
  RFState next = state;
  if (!state.r.is_global())
    next.r = RFSize(
        checked_add(state.r.pixels(), checked_mul(k_eff - 1, state.j)));
  next.j = checked_mul(state.j, stride);
  if (is_conv)
    next.conv_r = next.r;
  return next;
}

// a <= b componentwise
bool below(const RFState &a, const RFState &b) {
  return a.r <= b.r && a.j <= b.j && a.conv_r <= b.conv_r;
}

bool state_less(const RFState &a, const RFState &b) {
  if (a.r != b.r)
    return a.r < b.r;
  if (a.j != b.j)
    return a.j < b.j;
  return a.conv_r < b.conv_r;
}

// Keeps states not dominated by another (dominance = `dominates(other, s)`).
template <typename Dominates>
std::vector<RFState> prune(std::vector<RFState> states, Dominates dominates) {
  std::sort(states.begin(), states.end(), state_less);
  states.erase(std::unique(states.begin(), states.end()), states.end());
  std::vector<RFState> kept;
  for (const auto &s : states) {
    bool dominated = std::any_of(states.begin(), states.end(), [&](const RFState &o) {
      return !(o == s) && dominates(o, s);
    });
    if (!dominated)
      kept.push_back(s);
  }
  return kept;
}

Frontier make_frontier(std::vector<RFState> states) {
  Frontier f;
  f.minimal = prune(states, [](const RFState &o, const RFState &s) {
    return below(o, s);
  });
  f.maximal = prune(std::move(states), [](const RFState &o, const RFState &s) {
    return below(s, o);
  });
  return f;
}

Frontier transfer(const Frontier &in, const LayerKind &kind) {
  std::vector<RFState> states;
  states.reserve(in.size());
  for (const auto &s : in.minimal)
    states.push_back(layer_rf_transfer(s, kind));
  for (const auto &s : in.maximal)
    states.push_back(layer_rf_transfer(s, kind));
  return make_frontier(std::move(states));
}

template <typename Key>
auto extreme(const std::vector<RFState> &states, Key key, bool want_max) {
  auto cmp = [&](const RFState &a, const RFState &b) { return key(a) < key(b); };
  return key(want_max ? *std::max_element(states.begin(), states.end(), cmp)
                      : *std::min_element(states.begin(), states.end(), cmp));
}

} // namespace

std::int64_t RFSize::pixels() const {
  if (global_)
    throw GraphError("global receptive field has no pixel extent");
  return pixels_;
}

std::string RFSize::to_string() const {
  return global_ ? std::string("global") : std::to_string(pixels_);
}

std::int64_t effective_kernel(std::int64_t kernel, std::int64_t dilation) {
  return checked_add(checked_mul(dilation, kernel - 1), 1);
}

RFState layer_rf_transfer(const RFState &state, const LayerKind &kind) {
  if (const auto *conv = std::get_if<Conv2d>(&kind))
    return grow(state, effective_kernel(conv->kernel, conv->dilation),
                conv->stride, true);
  if (const auto *pool = std::get_if<Pool>(&kind))
    return grow(state, pool->kernel, pool->stride, false);
  if (is_kind<GlobalAvgPool>(kind) || is_kind<Dense>(kind)) {
    RFState next = state;
    next.r = RFSize::global();
    next.conv_r = RFSize::global();
    return next;
  }
  return state;
}

std::vector<RFState> propagate_sequential(std::span<const LayerKind> layers) {
  std::vector<RFState> out;
  out.reserve(layers.size());
  RFState state;
  for (const auto &kind : layers) {
    state = layer_rf_transfer(state, kind);
    out.push_back(state);
  }
  return out;
}

RFAnnotations propagate_dag(const ArchGraph &graph,
                            const PropagationOptions &options) {
  auto order = topological_order(graph);
  RFAnnotations annotations;
  for (const auto &id : order) {
    const auto &node = graph.node(id);
    RFAnnotation ann;
    ann.node_id = id;

    const auto &preds = graph.predecessors(id);
    if (preds.empty()) {
      ann.in_frontier = make_frontier({RFState{}});
    } else if (preds.size() == 1) {
      ann.in_frontier = annotations.at(preds.front()).out_frontier;
    } else {
      std::vector<RFState> merged;
      for (const auto &p : preds) {
        const auto &f = annotations.at(p).out_frontier;
        merged.insert(merged.end(), f.minimal.begin(), f.minimal.end());
        merged.insert(merged.end(), f.maximal.begin(), f.maximal.end());
      }
      ann.in_frontier = make_frontier(std::move(merged));
    }
    ann.out_frontier = transfer(ann.in_frontier, node.kind);

    for (const auto *f : {&ann.in_frontier, &ann.out_frontier})
      if (f->size() > options.frontier_cap)
        throw FrontierOverflow("frontier at node '" + id + "' holds " +
                               std::to_string(f->size()) +
                               " states, cap is " +
                               std::to_string(options.frontier_cap));

    const auto &in = ann.in_frontier;
    const auto &out = ann.out_frontier;
    auto r = [](const RFState &s) { return s.r; };
    auto j = [](const RFState &s) { return s.j; };
    auto conv_r = [](const RFState &s) { return s.conv_r; };
    ann.r_in_min = extreme(in.minimal, r, false);
    ann.r_in_max = extreme(in.maximal, r, true);
    ann.j_in_min = extreme(in.minimal, j, false);
    ann.j_in_max = extreme(in.maximal, j, true);
    ann.conv_r_in_min = extreme(in.minimal, conv_r, false);
    ann.conv_r_in_max = extreme(in.maximal, conv_r, true);
    ann.r_out_min = extreme(out.minimal, r, false);
    ann.r_out_max = extreme(out.maximal, r, true);

    annotations.emplace(id, std::move(ann));
  }
  return annotations;
}

} // namespace rfscope
