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

#ifndef RFSCOPE_REPORT_HPP
#define RFSCOPE_REPORT_HPP

#include "rfscope/transforms.hpp"

#include <optional>

namespace rfscope {

enum class Format { Text, Json, Csv };

std::optional<Format> format_from_name(std::string_view name);

/// One row of the per-layer table, in topological order.
struct LayerRow {
  std::optional<std::int64_t> conv_ordinal;
  std::string node_id;
  std::string kind;
  RFSize r_in_min, r_in_max;
  std::int64_t j_min = 1, j_max = 1;
  RFSize r_prev_min, r_prev_max;
  std::int64_t params = 0;
  std::int64_t macs = 0;
  Shape out;
  std::optional<Productivity> classification; // convs only
};

struct AnalysisView {
  std::string name;
  InputSpec input;
  Analysis analysis;
  std::vector<LayerRow> rows;
};

AnalysisView make_view(const ArchGraph &graph, const CostOptions &options = {});

std::string render_analysis(const AnalysisView &view, Format format);
std::string render_delta(const TransformDelta &delta, Format format);
std::string render_comparison(const Comparison &cmp, const std::string &name_a,
                              const std::string &name_b, Format format);

} // namespace rfscope

#endif // RFSCOPE_REPORT_HPP
