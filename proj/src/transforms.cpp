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

#include "rfscope/transforms.hpp"

#include <algorithm>
#include <set>

namespace rfscope {

namespace {

/// Mutable working copy used by the rewrite passes.
class GraphEditor {
public:
  explicit GraphEditor(const ArchGraph &graph)
      : name_(graph.name()), input_(graph.input()), nodes_(graph.nodes()),
        edges_(graph.edges()) {}

  bool contains(const std::string &id) const {
    return std::any_of(nodes_.begin(), nodes_.end(),
                       [&](const LayerNode &n) { return n.id == id; });
  }

  LayerNode &node(const std::string &id) {
    for (auto &n : nodes_)
      if (n.id == id)
        return n;
    throw GraphError("unknown node '" + id + "'");
  }

  std::vector<std::string> predecessors(const std::string &id) const {
    std::vector<std::string> out;
    for (const auto &e : edges_)
      if (e.target == id)
        out.push_back(e.source);
    return out;
  }

  std::vector<std::string> successors(const std::string &id) const {
    std::vector<std::string> out;
    for (const auto &e : edges_)
      if (e.source == id)
        out.push_back(e.target);
    return out;
  }

  void remove(const std::string &id) {
    std::erase_if(nodes_, [&](const LayerNode &n) { return n.id == id; });
    std::erase_if(edges_, [&](const Edge &e) {
      return e.source == id || e.target == id;
    });
  }

  /// Removes `id` and wires each predecessor to each successor in its place.
  void bypass(const std::string &id) {
    std::vector<Edge> rewired;
    for (const auto &e : edges_) {
      if (e.target == id) {
        for (const auto &succ : successors(id))
          rewired.push_back(Edge{e.source, succ});
      }
    }
    std::vector<Edge> kept;
    for (const auto &e : edges_) {
      if (e.source == id) {
        // splice the replacement edges in where the outgoing edge was
        for (const auto &r : rewired)
          if (r.target == e.target)
            kept.push_back(r);
      } else if (e.target != id) {
        kept.push_back(e);
      }
    }
    edges_.clear();
    for (const auto &e : kept)
      if (std::find(edges_.begin(), edges_.end(), e) == edges_.end())
        edges_.push_back(e);
    std::erase_if(nodes_, [&](const LayerNode &n) { return n.id == id; });
  }

  std::string fresh_id(const std::string &base) const {
    std::string id = base;
    for (int n = 1; contains(id); ++n)
      id = base + "_" + std::to_string(n);
    return id;
  }

  void append(const std::string &id, LayerKind kind, const std::string &from) {
    nodes_.push_back(LayerNode{id, std::move(kind), 0});
    edges_.push_back(Edge{from, id});
  }

  ArchGraph build() const {
    auto nodes = nodes_;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      nodes[i].declaration_index = static_cast<std::int64_t>(i);
    return ArchGraph(name_, input_, std::move(nodes), edges_);
  }

private:
  std::string name_;
  InputSpec input_;
  std::vector<LayerNode> nodes_;
  std::vector<Edge> edges_;
};

ArchGraph checked(ArchGraph graph, const std::string &pass) {
  auto verdict = validate(graph);
  if (!verdict.ok())
    throw TransformError(pass + " produced an invalid graph:\n" +
                         verdict.to_string());
  return graph;
}

Analysis analyze_after(const ArchGraph &graph, const std::string &pass) {
  try {
    return analyze(graph);
  } catch (const ShapeError &e) {
    throw TransformError(pass + " produced a graph with inconsistent shapes: " +
                         e.what());
  }
}

std::vector<std::string> in_declaration_order(const ArchGraph &graph,
                                              const std::set<std::string> &ids) {
  std::vector<std::string> out(ids.begin(), ids.end());
  std::sort(out.begin(), out.end(), [&](const auto &a, const auto &b) {
    return graph.node(a).declaration_index < graph.node(b).declaration_index;
  });
  return out;
}

} // namespace

Analysis analyze(const ArchGraph &graph, const CostOptions &options) {
  return Analysis{classify(graph), estimate_cost(graph, options)};
}

TransformResult truncate_at_border(const ArchGraph &graph,
                                   std::int64_t num_classes) {
  const std::string pass = "truncate";
  if (num_classes < 2)
    throw TransformError("truncate needs num_classes >= 2");

  TransformDelta delta;
  delta.pass = pass;
  delta.before = analyze(graph);
  if (!delta.before.border.border_min) {
    delta.after = delta.before;
    return {graph, std::move(delta)};
  }

  const auto order = topological_order(graph);
  auto doomed = unproductive_tail(graph, delta.before.border);
  for (const auto &id : order) {
    const auto &preds = graph.predecessors(id);
    bool fed_only_by_doomed =
        !preds.empty() && std::all_of(preds.begin(), preds.end(), [&](auto &p) {
          return doomed.count(p) != 0;
        });
    if (is_head(graph.node(id).kind) || fed_only_by_doomed)
      doomed.insert(id);
  }

  GraphEditor editor(graph);
  std::set<std::string> removed = doomed;
  for (const auto &id : doomed)
    editor.remove(id);

  // Merges that lost inputs collapse to pass-through.
  for (bool again = true; again;) {
    again = false;
    for (const auto &id : order) {
      if (removed.count(id) || !is_merge(graph.node(id).kind))
        continue;
      if (editor.predecessors(id).size() < 2) {
        editor.bypass(id);
        removed.insert(id);
        again = true;
      }
    }
  }

  std::string attach;
  for (const auto &id : order)
    if (!removed.count(id))
      attach = id;

  // Drop branches that no longer reach the attachment point.
  std::set<std::string> reaching{attach};
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (removed.count(*it) || reaching.count(*it))
      continue;
    auto succ = editor.successors(*it);
    if (std::any_of(succ.begin(), succ.end(),
                    [&](auto &s) { return reaching.count(s) != 0; }))
      reaching.insert(*it);
  }
  for (const auto &id : order) {
    if (!removed.count(id) && !reaching.count(id)) {
      editor.remove(id);
      removed.insert(id);
    }
  }

  auto gap = editor.fresh_id("head_gap");
  editor.append(gap, GlobalAvgPool{}, attach);
  auto fc = editor.fresh_id("head_fc");
  editor.append(fc, Dense{num_classes, true}, gap);
  auto softmax = editor.fresh_id("head_softmax");
  editor.append(softmax, Softmax{}, fc);

  auto result = checked(editor.build(), pass);
  delta.after = analyze_after(result, pass);
  delta.removed_node_ids = in_declaration_order(graph, removed);
  delta.added_node_ids = {gap, fc, softmax};

  if (delta.after.border.unproductive_count() != 0)
    throw TransformError("truncate left unproductive convs behind");
  return {std::move(result), std::move(delta)};
}

TransformResult remove_stem_downsampling(const ArchGraph &graph,
                                         std::int64_t count) {
  const std::string pass = "remove-stem-downsampling";
  if (count < 1)
    throw TransformError("remove-stem-downsampling needs count >= 1");

  std::vector<std::string> targets;
  for (const auto &id : topological_order(graph))
    if (layer_stride(graph.node(id).kind) > 1)
      targets.push_back(id);
  if (static_cast<std::int64_t>(targets.size()) < count)
    throw TransformError("graph has " + std::to_string(targets.size()) +
                         " downsampling layers, cannot neutralize " +
                         std::to_string(count));
  targets.resize(static_cast<std::size_t>(count));

  TransformDelta delta;
  delta.pass = pass;
  delta.before = analyze(graph);

  GraphEditor editor(graph);
  for (const auto &id : targets) {
    auto &node = editor.node(id);
    if (auto *conv = std::get_if<Conv2d>(&node.kind)) {
      conv->stride = 1;
      delta.modified_node_ids.push_back(id);
    } else {
      editor.bypass(id);
      delta.removed_node_ids.push_back(id);
    }
  }

  auto result = checked(editor.build(), pass);
  delta.after = analyze_after(result, pass);
  return {std::move(result), std::move(delta)};
}

Comparison compare(const ArchGraph &a, const ArchGraph &b) {
  if (!(a.input() == b.input()))
    throw TransformError("cannot compare graphs with different input specs");
  Comparison c;
  c.a = analyze(a);
  c.b = analyze(b);
  c.params_delta = c.b.cost.total_params - c.a.cost.total_params;
  c.macs_delta = c.b.cost.total_macs - c.a.cost.total_macs;
  if (c.a.cost.total_params != 0)
    c.params_relative = static_cast<double>(c.params_delta) /
                        static_cast<double>(c.a.cost.total_params);
  if (c.a.cost.total_macs != 0)
    c.macs_relative = static_cast<double>(c.macs_delta) /
                      static_cast<double>(c.a.cost.total_macs);
  return c;
}

} // namespace rfscope
