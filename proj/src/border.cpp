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

#include "rfscope/border.hpp"

#include <algorithm>

namespace rfscope {

std::string_view to_string(Productivity p) {
  return p == Productivity::Productive ? "productive" : "unproductive";
}

std::size_t BorderReport::unproductive_count() const {
  return static_cast<std::size_t>(
      std::count_if(per_conv.begin(), per_conv.end(), [](const auto &c) {
        return c.classification == Productivity::Unproductive;
      }));
}

const ConvClassification &BorderReport::conv(std::int64_t ordinal) const {
  if (ordinal < 1 || ordinal > static_cast<std::int64_t>(per_conv.size()))
    throw GraphError("no conv with ordinal " + std::to_string(ordinal));
  return per_conv[static_cast<std::size_t>(ordinal - 1)];
}

BorderReport classify(const ArchGraph &graph, const PropagationOptions &options) {
  return classify(graph, propagate_dag(graph, options));
}

BorderReport classify(const ArchGraph &graph, const RFAnnotations &annotations) {
  BorderReport report;
  report.resolution = graph.input().resolution();

  std::vector<std::pair<std::int64_t, std::string>> convs;
  for (const auto &[id, ordinal] : conv_index(graph))
    convs.emplace_back(ordinal, id);
  std::sort(convs.begin(), convs.end());

  for (const auto &[ordinal, id] : convs) {
    const auto &ann = annotations.at(id);
    ConvClassification c;
    c.ordinal = ordinal;
    c.node_id = id;
    c.r_in_min = ann.r_in_min;
    c.r_in_max = ann.r_in_max;
    c.r_prev_min = ann.conv_r_in_min;
    c.r_prev_max = ann.conv_r_in_max;
    c.classification = c.r_prev_min.exceeds(report.resolution)
                           ? Productivity::Unproductive
                           : Productivity::Productive;
    if (!report.border_min && c.r_prev_min.exceeds(report.resolution))
      report.border_min = ordinal;
    if (!report.border_max && c.r_prev_max.exceeds(report.resolution))
      report.border_max = ordinal;
    report.per_conv.push_back(std::move(c));
  }
  return report;
}

std::set<std::string> unproductive_tail(const ArchGraph &graph) {
  return unproductive_tail(graph, classify(graph));
}

std::set<std::string> unproductive_tail(const ArchGraph &graph,
                                        const BorderReport &report) {
  std::set<std::string> tail;
  if (!report.border_min)
    return tail;

  std::set<std::string> unproductive;
  for (const auto &c : report.per_conv)
    if (c.classification == Productivity::Unproductive)
      unproductive.insert(c.node_id);

  // tainted(v): every Input->v path meets an unproductive conv.
  std::set<std::string> tainted;
  for (const auto &id : topological_order(graph)) {
    const auto &preds = graph.predecessors(id);
    bool all_paths = unproductive.count(id) != 0 ||
                     (!preds.empty() &&
                      std::all_of(preds.begin(), preds.end(), [&](const auto &p) {
                        return tainted.count(p) != 0;
                      }));
    if (!all_paths)
      continue;
    tainted.insert(id);
    if (!is_head(graph.node(id).kind))
      tail.insert(id);
  }
  return tail;
}

} // namespace rfscope
