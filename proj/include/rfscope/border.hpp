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

#ifndef RFSCOPE_BORDER_HPP
#define RFSCOPE_BORDER_HPP

#include "rfscope/graph.hpp"
#include "rfscope/receptive_field.hpp"

#include <optional>
#include <set>

namespace rfscope {

enum class Productivity { Productive, Unproductive };

std::string_view to_string(Productivity p);

struct ConvClassification {
  std::int64_t ordinal = 0;
  std::string node_id;
  RFSize r_in_min, r_in_max;
  /// Receptive field of the preceding conv layer(s), min/max over paths.
  RFSize r_prev_min, r_prev_max;
  Productivity classification = Productivity::Productive;
};

/// Border layers of a graph at its input resolution.
///
/// A conv is unproductive when even the smallest receptive field among the
/// conv layers feeding it already exceeds the resolution: it can no longer
/// integrate new input pixels into a single position. border_min is the
/// first such conv (the operative border); border_max applies the same test
/// to the largest receptive field and is diagnostic only.
struct BorderReport {
  std::int64_t resolution = 0;
  std::vector<ConvClassification> per_conv; // ascending ordinal
  std::optional<std::int64_t> border_min;
  std::optional<std::int64_t> border_max;

  std::size_t unproductive_count() const;
  /// Node id of the conv with the given ordinal.
  const ConvClassification &conv(std::int64_t ordinal) const;
};

BorderReport classify(const ArchGraph &graph,
                      const PropagationOptions &options = {});
BorderReport classify(const ArchGraph &graph, const RFAnnotations &annotations);

/// Nodes (excluding head kinds) every one of whose Input-to-node paths
/// contains an unproductive conv, the node itself included. This is the
/// removal set for truncation; empty when the graph has no border.
std::set<std::string> unproductive_tail(const ArchGraph &graph);
std::set<std::string> unproductive_tail(const ArchGraph &graph,
                                        const BorderReport &report);

} // namespace rfscope

#endif // RFSCOPE_BORDER_HPP
