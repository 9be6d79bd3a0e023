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

#ifndef RFSCOPE_TRANSFORMS_HPP
#define RFSCOPE_TRANSFORMS_HPP

#include "rfscope/border.hpp"
#include "rfscope/cost_model.hpp"

namespace rfscope {

struct Analysis {
  BorderReport border;
  CostReport cost;
};

Analysis analyze(const ArchGraph &graph, const CostOptions &options = {});

struct TransformDelta {
  std::string pass;
  Analysis before;
  Analysis after;
  std::vector<std::string> removed_node_ids;
  std::vector<std::string> modified_node_ids;
  std::vector<std::string> added_node_ids;

  bool changed() const {
    return !removed_node_ids.empty() || !modified_node_ids.empty() ||
           !added_node_ids.empty();
  }
};

struct TransformResult {
  ArchGraph graph;
  TransformDelta delta;
};

class TransformError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Replaces the unproductive tail and the old classifier head with
/// GlobalAvgPool -> Dense(num_classes) -> Softmax attached to the last
/// remaining node. Merges left with a single input are bypassed and branches
/// that no longer reach the attachment point are dropped. Without a border
/// the graph is returned unchanged and the delta is empty.
TransformResult truncate_at_border(const ArchGraph &graph,
                                   std::int64_t num_classes);

/// Neutralizes the first `count` downsampling layers in topological order:
/// strided convs get stride 1, strided pools are removed. Throws
/// TransformError when fewer than `count` exist or the result does not
/// propagate shapes.
TransformResult remove_stem_downsampling(const ArchGraph &graph,
                                         std::int64_t count);

struct Comparison {
  Analysis a;
  Analysis b;
  std::int64_t params_delta = 0; // b - a
  std::int64_t macs_delta = 0;
  double params_relative = 0.0; // delta / a, 0 when a is 0
  double macs_relative = 0.0;
};

/// Side-by-side analysis. Throws TransformError on differing input specs.
Comparison compare(const ArchGraph &a, const ArchGraph &b);

} // namespace rfscope

#endif // RFSCOPE_TRANSFORMS_HPP
