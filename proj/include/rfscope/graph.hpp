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

#ifndef RFSCOPE_GRAPH_HPP
#define RFSCOPE_GRAPH_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace rfscope {

/// Input tensor geometry. The analysis resolution is max(height, width).
struct InputSpec {
  std::int64_t height = 1;
  std::int64_t width = 1;
  std::int64_t channels = 1;

  std::int64_t resolution() const { return height > width ? height : width; }

  bool operator==(const InputSpec &) const = default;
};

enum class PaddingMode { Same, Valid, Explicit };

struct Padding {
  PaddingMode mode = PaddingMode::Same;
  std::int64_t amount = 0; // only meaningful for Explicit

  static Padding same() { return {PaddingMode::Same, 0}; }
  static Padding valid() { return {PaddingMode::Valid, 0}; }
  static Padding explicitly(std::int64_t p) { return {PaddingMode::Explicit, p}; }

  bool operator==(const Padding &) const = default;
};

struct Input {
  bool operator==(const Input &) const = default;
};

struct Conv2d {
  std::int64_t kernel = 3;
  std::int64_t stride = 1;
  std::int64_t dilation = 1;
  Padding padding = Padding::same();
  std::int64_t filters = 1;
  bool bias = true;

  bool operator==(const Conv2d &) const = default;
};

enum class PoolMode { Max, Avg };

struct Pool {
  PoolMode mode = PoolMode::Max;
  std::int64_t kernel = 2;
  std::int64_t stride = 2;
  std::int64_t padding = 0;

  bool operator==(const Pool &) const = default;
};

struct GlobalAvgPool {
  bool operator==(const GlobalAvgPool &) const = default;
};

struct Dense {
  std::int64_t units = 1;
  bool bias = true;

  bool operator==(const Dense &) const = default;
};

struct Add {
  bool operator==(const Add &) const = default;
};

struct Concat {
  bool operator==(const Concat &) const = default;
};

struct BatchNorm {
  bool operator==(const BatchNorm &) const = default;
};

struct Activation {
  std::string name = "relu";

  bool operator==(const Activation &) const = default;
};

enum class AttentionVariant { SE, Spatial, CBAM };

/// Attention add-on (squeeze-excitation, spatial, or both). Receptive-field
/// neutral; only the cost model looks inside.
struct Attention {
  AttentionVariant variant = AttentionVariant::SE;

  bool operator==(const Attention &) const = default;
};

struct Softmax {
  bool operator==(const Softmax &) const = default;
};

using LayerKind = std::variant<Input, Conv2d, Pool, GlobalAvgPool, Dense, Add,
                               Concat, BatchNorm, Activation, Attention,
                               Softmax>;

/// Stable lower-case tag used in documents and reports ("conv2d", "pool", ...).
std::string_view kind_name(const LayerKind &kind);

template <typename T> bool is_kind(const LayerKind &kind) {
  return std::holds_alternative<T>(kind);
}

inline bool is_merge(const LayerKind &kind) {
  return is_kind<Add>(kind) || is_kind<Concat>(kind);
}

/// GlobalAvgPool, Dense and Softmax form the classifier head and are never
/// classified by the border rule.
inline bool is_head(const LayerKind &kind) {
  return is_kind<GlobalAvgPool>(kind) || is_kind<Dense>(kind) ||
         is_kind<Softmax>(kind);
}

/// Stride of a layer that can downsample, 1 otherwise.
std::int64_t layer_stride(const LayerKind &kind);

struct LayerNode {
  std::string id;
  LayerKind kind;
  std::int64_t declaration_index = 0;

  bool operator==(const LayerNode &) const = default;
};

struct Edge {
  std::string source;
  std::string target;

  bool operator==(const Edge &) const = default;
};

/// Thrown by operations whose precondition is a valid graph.
class GraphError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Immutable layer DAG. Construction never fails; validity is checked by
/// validate() so that arbitrary candidate graphs can be inspected.
class ArchGraph {
public:
  ArchGraph() = default;
  ArchGraph(std::string name, InputSpec input, std::vector<LayerNode> nodes,
            std::vector<Edge> edges);

  const std::string &name() const { return name_; }
  const InputSpec &input() const { return input_; }
  const std::vector<LayerNode> &nodes() const { return nodes_; }
  const std::vector<Edge> &edges() const { return edges_; }

  bool contains(std::string_view id) const;
  /// Throws GraphError for unknown ids.
  const LayerNode &node(std::string_view id) const;
  /// Ids of direct predecessors / successors, in edge-list order. Edges that
  /// reference unknown ids are ignored here and reported by validate().
  const std::vector<std::string> &predecessors(std::string_view id) const;
  const std::vector<std::string> &successors(std::string_view id) const;

  /// Copy with a different input geometry.
  ArchGraph with_input(InputSpec input) const;

  bool operator==(const ArchGraph &other) const {
    return name_ == other.name_ && input_ == other.input_ &&
           nodes_ == other.nodes_ && edges_ == other.edges_;
  }

private:
  std::size_t index_of(std::string_view id) const;

  std::string name_;
  InputSpec input_;
  std::vector<LayerNode> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> preds_;
  std::vector<std::vector<std::string>> succs_;
};

/// Incremental construction helper; declaration indices follow call order.
class GraphBuilder {
public:
  GraphBuilder(std::string name, InputSpec input)
      : name_(std::move(name)), input_(input) {}

  /// Adds a node and returns its id.
  std::string add(std::string id, LayerKind kind);
  /// Adds a node fed by `from` and returns its id.
  std::string add(std::string id, LayerKind kind, const std::string &from);
  void connect(const std::string &from, const std::string &to);

  ArchGraph build() const;

private:
  std::string name_;
  InputSpec input_;
  std::vector<LayerNode> nodes_;
  std::vector<Edge> edges_;
};

struct Violation {
  std::string rule;    // short machine tag, e.g. "cycle", "merge-arity"
  std::string subject; // offending node id or "a->b" edge
  std::string message;
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationResult validate(const ArchGraph &graph);

/// Throws GraphError listing every violation unless the graph is valid.
void require_valid(const ArchGraph &graph);

/// Id of the unique Input node of a valid graph.
std::string input_node(const ArchGraph &graph);
/// Id of the unique sink of a valid graph.
std::string sink_node(const ArchGraph &graph);

/// Kahn order; incomparable nodes come out by ascending declaration_index.
std::vector<std::string> topological_order(const ArchGraph &graph);

/// 1-based ordinal of every Conv2d node following topological_order.
/// Projection convs on skip paths are counted like any other conv.
std::map<std::string, std::int64_t> conv_index(const ArchGraph &graph);

} // namespace rfscope

#endif // RFSCOPE_GRAPH_HPP
