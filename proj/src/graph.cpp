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

#include "rfscope/graph.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <queue>
#include <set>
#include <sstream>

namespace rfscope {

namespace {

template <class... Ts> struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts> Overloaded(Ts...) -> Overloaded<Ts...>;

const std::vector<std::string> kNoNeighbours;

} // namespace

std::string_view kind_name(const LayerKind &kind) {
  return std::visit(
      Overloaded{[](const Input &) { return std::string_view("input"); },
                 [](const Conv2d &) { return std::string_view("conv2d"); },
                 [](const Pool &) { return std::string_view("pool"); },
                 [](const GlobalAvgPool &) {
                   return std::string_view("global_avg_pool");
                 },
                 [](const Dense &) { return std::string_view("dense"); },
                 [](const Add &) { return std::string_view("add"); },
                 [](const Concat &) { return std::string_view("concat"); },
                 [](const BatchNorm &) { return std::string_view("batch_norm"); },
                 [](const Activation &) { return std::string_view("activation"); },
                 [](const Attention &) { return std::string_view("attention"); },
                 [](const Softmax &) { return std::string_view("softmax"); }},
      kind);
}

std::int64_t layer_stride(const LayerKind &kind) {
  if (const auto *conv = std::get_if<Conv2d>(&kind))
    return conv->stride;
  if (const auto *pool = std::get_if<Pool>(&kind))
    return pool->stride;
  return 1;
}

ArchGraph::ArchGraph(std::string name, InputSpec input,
                     std::vector<LayerNode> nodes, std::vector<Edge> edges)
    : name_(std::move(name)), input_(input), nodes_(std::move(nodes)),
      edges_(std::move(edges)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    index_.emplace(nodes_[i].id, i); // first occurrence wins on duplicates
  preds_.resize(nodes_.size());
  succs_.resize(nodes_.size());
  for (const auto &edge : edges_) {
    auto src = index_.find(edge.source);
    auto dst = index_.find(edge.target);
    if (src == index_.end() || dst == index_.end())
      continue;
    succs_[src->second].push_back(edge.target);
    preds_[dst->second].push_back(edge.source);
  }
}

std::size_t ArchGraph::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end())
    throw GraphError("unknown node '" + std::string(id) + "'");
  return it->second;
}

bool ArchGraph::contains(std::string_view id) const {
  return index_.count(std::string(id)) != 0;
}

const LayerNode &ArchGraph::node(std::string_view id) const {
  return nodes_[index_of(id)];
}

const std::vector<std::string> &
ArchGraph::predecessors(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? kNoNeighbours : preds_[it->second];
}

const std::vector<std::string> &ArchGraph::successors(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? kNoNeighbours : succs_[it->second];
}

ArchGraph ArchGraph::with_input(InputSpec input) const {
  return ArchGraph(name_, input, nodes_, edges_);
}

std::string GraphBuilder::add(std::string id, LayerKind kind) {
  auto index = static_cast<std::int64_t>(nodes_.size());
  nodes_.push_back(LayerNode{id, std::move(kind), index});
  return id;
}

std::string GraphBuilder::add(std::string id, LayerKind kind,
                              const std::string &from) {
  add(id, std::move(kind));
  connect(from, id);
  return id;
}

void GraphBuilder::connect(const std::string &from, const std::string &to) {
  edges_.push_back(Edge{from, to});
}

ArchGraph GraphBuilder::build() const {
  return ArchGraph(name_, input_, nodes_, edges_);
}

std::string ValidationResult::to_string() const {
  std::ostringstream os;
  for (const auto &v : violations)
    os << v.rule << " [" << v.subject << "]: " << v.message << "\n";
  return os.str();
}

namespace {

class Validator {
public:
  explicit Validator(const ArchGraph &graph) : graph_(graph) {}

  ValidationResult run() {
    check_input_spec();
    check_ids();
    check_parameters();
    check_edges();
    check_arity();
    bool acyclic = check_cycles();
    check_reachability();
    if (acyclic && result_.ok())
      check_channels();
    return std::move(result_);
  }

private:
  void report(std::string rule, std::string subject, std::string message) {
    result_.violations.push_back(
        {std::move(rule), std::move(subject), std::move(message)});
  }

  void check_input_spec() {
    const auto &in = graph_.input();
    if (in.height < 1 || in.width < 1 || in.channels < 1)
      report("input-spec", "input",
             "height, width and channels must all be >= 1");
  }

  void check_ids() {
    std::set<std::string> seen;
    std::set<std::int64_t> indices;
    for (const auto &node : graph_.nodes()) {
      if (node.id.empty())
        report("empty-id", "", "node id must be non-empty");
      if (!seen.insert(node.id).second)
        report("duplicate-id", node.id, "node id '" + node.id + "' is not unique");
      if (!indices.insert(node.declaration_index).second)
        report("declaration-index", node.id,
               "declaration_index " + std::to_string(node.declaration_index) +
                   " is not unique");
    }
    auto n = static_cast<std::int64_t>(graph_.nodes().size());
    if (!indices.empty() && (*indices.begin() != 0 || *indices.rbegin() != n - 1))
      report("declaration-index", "graph",
             "declaration indices must be contiguous from 0");
  }

  void check_parameters() {
    for (const auto &node : graph_.nodes()) {
      auto bad = [&](const std::string &what) {
        report("parameter", node.id, what);
      };
      std::visit(
          Overloaded{
              [&](const Conv2d &c) {
                if (c.kernel < 1) bad("conv kernel must be >= 1");
                if (c.stride < 1) bad("conv stride must be >= 1");
                if (c.dilation < 1) bad("conv dilation must be >= 1");
                if (c.filters < 1) bad("conv filters must be >= 1");
                if (c.padding.mode == PaddingMode::Explicit && c.padding.amount < 0)
                  bad("conv padding must be >= 0");
              },
              [&](const Pool &p) {
                if (p.kernel < 1) bad("pool kernel must be >= 1");
                if (p.stride < 1) bad("pool stride must be >= 1");
                if (p.padding < 0) bad("pool padding must be >= 0");
              },
              [&](const Dense &d) {
                if (d.units < 1) bad("dense units must be >= 1");
              },
              [](const auto &) {}},
          node.kind);
    }
  }

  void check_edges() {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto &e : graph_.edges()) {
      std::string subject = e.source + "->" + e.target;
      if (!graph_.contains(e.source))
        report("unknown-node", subject, "unknown node '" + e.source + "'");
      if (!graph_.contains(e.target))
        report("unknown-node", subject, "unknown node '" + e.target + "'");
      if (!seen.emplace(e.source, e.target).second)
        report("duplicate-edge", subject, "edge listed more than once");
    }
  }

  void check_arity() {
    std::vector<std::string> inputs, sinks;
    for (const auto &node : graph_.nodes()) {
      auto in = graph_.predecessors(node.id).size();
      if (is_kind<Input>(node.kind)) {
        inputs.push_back(node.id);
        if (in != 0)
          report("input-arity", node.id, "Input node must have no predecessors");
      } else if (is_merge(node.kind)) {
        if (in < 2)
          report("merge-arity", node.id,
                 "merge arity < 2 (" + std::to_string(in) + " input)");
      } else if (in != 1) {
        report("arity", node.id,
               std::string(kind_name(node.kind)) + " node must have exactly 1 "
               "predecessor, found " + std::to_string(in));
      }
      if (graph_.successors(node.id).empty())
        sinks.push_back(node.id);
    }
    if (inputs.size() != 1)
      report("input-count", "graph",
             "expected exactly one Input node, found " +
                 std::to_string(inputs.size()));
    if (sinks.size() != 1) {
      std::string list;
      for (const auto &s : sinks)
        list += (list.empty() ? "" : ",") + s;
      report("sink-count", "graph",
             "expected exactly one sink, found " + std::to_string(sinks.size()) +
                 (list.empty() ? "" : " {" + list + "}"));
    }
  }

  // Tarjan SCC; every component of size > 1 (or self loop) is one cycle report.
  bool check_cycles() {
    const auto &nodes = graph_.nodes();
    std::unordered_map<std::string, int> index, low;
    std::unordered_map<std::string, bool> on_stack;
    std::vector<std::string> stack;
    int counter = 0;
    bool acyclic = true;

    std::function<void(const std::string &)> strongconnect =
        [&](const std::string &v) {
          index[v] = low[v] = counter++;
          stack.push_back(v);
          on_stack[v] = true;
          for (const auto &w : graph_.successors(v)) {
            if (!index.count(w)) {
              strongconnect(w);
              low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
              low[v] = std::min(low[v], index[w]);
            }
          }
          if (low[v] != index[v])
            return;
          std::vector<std::string> component;
          std::string w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            component.push_back(w);
          } while (w != v);
          const auto &succ = graph_.successors(v);
          bool self_loop = std::find(succ.begin(), succ.end(), v) != succ.end();
          if (component.size() > 1 || self_loop) {
            acyclic = false;
            std::sort(component.begin(), component.end(),
                      [&](const std::string &a, const std::string &b) {
                        return graph_.node(a).declaration_index <
                               graph_.node(b).declaration_index;
                      });
            std::string list;
            for (const auto &c : component)
              list += (list.empty() ? "" : ",") + c;
            report("cycle", list, "cycle through {" + list + "}");
          }
        };
    for (const auto &node : nodes)
      if (!index.count(node.id))
        strongconnect(node.id);
    return acyclic;
  }

  void check_reachability() {
    std::optional<std::string> input;
    std::vector<std::string> sinks;
    for (const auto &node : graph_.nodes()) {
      if (is_kind<Input>(node.kind) && !input)
        input = node.id;
      if (graph_.successors(node.id).empty())
        sinks.push_back(node.id);
    }
    auto flood = [&](const std::string &start, bool forward) {
      std::set<std::string> seen{start};
      std::vector<std::string> work{start};
      while (!work.empty()) {
        auto v = work.back();
        work.pop_back();
        for (const auto &w :
             forward ? graph_.successors(v) : graph_.predecessors(v))
          if (seen.insert(w).second)
            work.push_back(w);
      }
      return seen;
    };
    if (input) {
      auto reached = flood(*input, true);
      for (const auto &node : graph_.nodes())
        if (!reached.count(node.id))
          report("unreachable", node.id, "node not reachable from Input");
    }
    if (sinks.size() == 1) {
      auto reaching = flood(sinks.front(), false);
      for (const auto &node : graph_.nodes())
        if (!reaching.count(node.id))
          report("dead-end", node.id, "sink not reachable from node");
    }
  }

  void check_channels() {
    std::unordered_map<std::string, std::int64_t> channels;
    for (const auto &id : topological_order_unchecked()) {
      const auto &node = graph_.node(id);
      const auto &preds = graph_.predecessors(id);
      std::int64_t c = preds.empty() ? graph_.input().channels : channels[preds[0]];
      if (const auto *conv = std::get_if<Conv2d>(&node.kind)) {
        c = conv->filters;
      } else if (const auto *dense = std::get_if<Dense>(&node.kind)) {
        c = dense->units;
      } else if (is_kind<Concat>(node.kind)) {
        c = 0;
        for (const auto &p : preds)
          c += channels[p];
      } else if (is_kind<Add>(node.kind)) {
        for (const auto &p : preds) {
          if (channels[p] != c) {
            report("channel-mismatch", id,
                   "Add inputs carry different channel counts (" +
                       std::to_string(c) + " from '" + preds[0] + "' vs " +
                       std::to_string(channels[p]) + " from '" + p + "')");
            break;
          }
        }
      }
      channels[id] = c;
    }
  }

  std::vector<std::string> topological_order_unchecked() const;

  const ArchGraph &graph_;
  ValidationResult result_;
};

std::vector<std::string> kahn(const ArchGraph &graph) {
  using Entry = std::pair<std::int64_t, std::string>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> ready;
  std::unordered_map<std::string, std::size_t> remaining;
  for (const auto &node : graph.nodes()) {
    remaining[node.id] = graph.predecessors(node.id).size();
    if (remaining[node.id] == 0)
      ready.emplace(node.declaration_index, node.id);
  }
  std::vector<std::string> order;
  order.reserve(graph.nodes().size());
  while (!ready.empty()) {
    auto id = ready.top().second;
    ready.pop();
    order.push_back(id);
    for (const auto &succ : graph.successors(id))
      if (--remaining[succ] == 0)
        ready.emplace(graph.node(succ).declaration_index, succ);
  }
  return order;
}

std::vector<std::string> Validator::topological_order_unchecked() const {
  return kahn(graph_);
}

} // namespace

ValidationResult validate(const ArchGraph &graph) {
  return Validator(graph).run();
}

void require_valid(const ArchGraph &graph) {
  auto verdict = validate(graph);
  if (!verdict.ok())
    throw GraphError("invalid graph '" + graph.name() + "':\n" +
                     verdict.to_string());
}

std::string input_node(const ArchGraph &graph) {
  for (const auto &node : graph.nodes())
    if (is_kind<Input>(node.kind))
      return node.id;
  throw GraphError("graph has no Input node");
}

std::string sink_node(const ArchGraph &graph) {
  for (const auto &node : graph.nodes())
    if (graph.successors(node.id).empty())
      return node.id;
  throw GraphError("graph has no sink");
}

std::vector<std::string> topological_order(const ArchGraph &graph) {
  require_valid(graph);
  return kahn(graph);
}

std::map<std::string, std::int64_t> conv_index(const ArchGraph &graph) {
  std::map<std::string, std::int64_t> ordinals;
  std::int64_t next = 1;
  for (const auto &id : topological_order(graph))
    if (is_kind<Conv2d>(graph.node(id).kind))
      ordinals.emplace(id, next++);
  return ordinals;
}

} // namespace rfscope
