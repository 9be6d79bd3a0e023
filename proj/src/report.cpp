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

#include "rfscope/report.hpp"

#include "rfscope/version.hpp"

#include <json.hpp>

#include <cstdio>
#include <iomanip>
#include <sstream>

namespace rfscope {

namespace {

using json = nlohmann::ordered_json;

json to_json(const RFSize &s) {
  if (s.is_global())
    return "global";
  return s.pixels();
}

json to_json(const std::optional<std::int64_t> &v) {
  return v ? json(*v) : json(nullptr);
}

std::string opt_text(const std::optional<std::int64_t> &v, const char *prefix) {
  return v ? prefix + std::to_string(*v) : std::string("none");
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

json summary_json(const Analysis &a) {
  json j;
  j["resolution"] = a.border.resolution;
  j["border_min"] = to_json(a.border.border_min);
  j["border_max"] = to_json(a.border.border_max);
  j["unproductive_convs"] = a.border.unproductive_count();
  j["total_params"] = a.cost.total_params;
  j["total_macs"] = a.cost.total_macs;
  j["total_flops"] = a.cost.total_flops;
  j["reported_gflops_mac1"] = a.cost.reported_gflops_mac1();
  return j;
}

void summary_text(std::ostream &os, const std::string &label, const Analysis &a) {
  os << label << "border_min=" << opt_text(a.border.border_min, "conv")
     << " border_max=" << opt_text(a.border.border_max, "conv")
     << " unproductive=" << a.border.unproductive_count()
     << " params=" << a.cost.total_params << " macs=" << a.cost.total_macs
     << " gflops(mac=1)=" << fixed(a.cost.reported_gflops_mac1()) << "\n";
}

void csv_summary_rows(std::ostream &os, const Analysis &before, const Analysis &after) {
  auto opt = [](const std::optional<std::int64_t> &v) {
    return v ? std::to_string(*v) : std::string();
  };
  os << "metric,before,after,delta\n";
  os << "border_min," << opt(before.border.border_min) << ","
     << opt(after.border.border_min) << ",\n";
  os << "border_max," << opt(before.border.border_max) << ","
     << opt(after.border.border_max) << ",\n";
  auto row = [&](const char *name, std::int64_t b, std::int64_t a) {
    os << name << "," << b << "," << a << "," << (a - b) << "\n";
  };
  row("unproductive_convs", static_cast<std::int64_t>(before.border.unproductive_count()),
      static_cast<std::int64_t>(after.border.unproductive_count()));
  row("total_params", before.cost.total_params, after.cost.total_params);
  row("total_macs", before.cost.total_macs, after.cost.total_macs);
  row("total_flops", before.cost.total_flops, after.cost.total_flops);
}

double relative(std::int64_t delta, std::int64_t base) {
  return base == 0 ? 0.0 : static_cast<double>(delta) / static_cast<double>(base);
}

json id_list(const std::vector<std::string> &ids) {
  json j = json::array();
  for (const auto &id : ids)
    j.push_back(id);
  return j;
}

} // namespace

std::optional<Format> format_from_name(std::string_view name) {
  if (name == "text")
    return Format::Text;
  if (name == "json")
    return Format::Json;
  if (name == "csv")
    return Format::Csv;
  return std::nullopt;
}

AnalysisView make_view(const ArchGraph &graph, const CostOptions &options) {
  AnalysisView view;
  view.name = graph.name();
  view.input = graph.input();
  auto annotations = propagate_dag(graph);
  view.analysis.border = classify(graph, annotations);
  view.analysis.cost = estimate_cost(graph, options);

  std::unordered_map<std::string, const ConvClassification *> convs;
  for (const auto &c : view.analysis.border.per_conv)
    convs.emplace(c.node_id, &c);

  for (const auto &cost : view.analysis.cost.per_layer) {
    const auto &ann = annotations.at(cost.node_id);
    LayerRow row;
    row.node_id = cost.node_id;
    row.kind = std::string(kind_name(graph.node(cost.node_id).kind));
    row.r_in_min = ann.r_in_min;
    row.r_in_max = ann.r_in_max;
    row.j_min = ann.j_in_min;
    row.j_max = ann.j_in_max;
    row.r_prev_min = ann.conv_r_in_min;
    row.r_prev_max = ann.conv_r_in_max;
    row.params = cost.params;
    row.macs = cost.macs;
    row.out = cost.out;
    if (auto it = convs.find(cost.node_id); it != convs.end()) {
      row.conv_ordinal = it->second->ordinal;
      row.classification = it->second->classification;
    }
    view.rows.push_back(std::move(row));
  }
  return view;
}

std::string render_analysis(const AnalysisView &view, Format format) {
  const auto &a = view.analysis;
  std::ostringstream os;
  if (format == Format::Json) {
    json j;
    j["name"] = view.name;
    j["input"] = {{"height", view.input.height},
                  {"width", view.input.width},
                  {"channels", view.input.channels}};
    j["resolution"] = a.border.resolution;
    j["border_min"] = to_json(a.border.border_min);
    j["border_max"] = to_json(a.border.border_max);
    j["unproductive_convs"] = a.border.unproductive_count();
    j["cost"] = {{"total_params", a.cost.total_params},
                 {"total_macs", a.cost.total_macs},
                 {"total_flops", a.cost.total_flops},
                 {"reported_gflops_mac1", a.cost.reported_gflops_mac1()}};
    json layers = json::array();
    for (const auto &r : view.rows) {
      json l;
      l["conv_ordinal"] = to_json(r.conv_ordinal);
      l["id"] = r.node_id;
      l["kind"] = r.kind;
      l["r_in_min"] = to_json(r.r_in_min);
      l["r_in_max"] = to_json(r.r_in_max);
      l["j_min"] = r.j_min;
      l["j_max"] = r.j_max;
      l["r_prev_min"] = to_json(r.r_prev_min);
      l["r_prev_max"] = to_json(r.r_prev_max);
      l["params"] = r.params;
      l["macs"] = r.macs;
      l["out_shape"] = json::array({r.out.height, r.out.width, r.out.channels});
      l["classification"] = r.classification
                                ? json(std::string(to_string(*r.classification)))
                                : json(nullptr);
      layers.push_back(std::move(l));
    }
    j["layers"] = std::move(layers);
    os << j.dump(2) << "\n";
    return os.str();
  }

  if (format == Format::Csv) {
    os << "conv_ordinal,id,kind,r_in_min,r_in_max,j_min,j_max,r_prev_min,"
          "r_prev_max,params,macs,out_h,out_w,out_c,classification\n";
    for (const auto &r : view.rows) {
      os << (r.conv_ordinal ? std::to_string(*r.conv_ordinal) : "") << ","
         << r.node_id << "," << r.kind << "," << r.r_in_min.to_string() << ","
         << r.r_in_max.to_string() << "," << r.j_min << "," << r.j_max << ","
         << r.r_prev_min.to_string() << "," << r.r_prev_max.to_string() << ","
         << r.params << "," << r.macs << "," << r.out.height << ","
         << r.out.width << "," << r.out.channels << ","
         << (r.classification ? to_string(*r.classification) : "") << "\n";
    }
    return os.str();
  }

  os << "rfscope " << kVersion << "\n";
  os << "architecture: " << view.name << " (" << view.input.height << "x"
     << view.input.width << "x" << view.input.channels << ")\n";
  os << "resolution i = " << a.border.resolution << "\n";
  os << "border_min: " << opt_text(a.border.border_min, "conv")
     << "   border_max: " << opt_text(a.border.border_max, "conv") << "\n";
  os << "unproductive convs: " << a.border.unproductive_count() << " of "
     << a.border.per_conv.size() << "\n";
  os << "params: " << a.cost.total_params << "   MACs: " << a.cost.total_macs
     << "   FLOPs (2*MAC): " << a.cost.total_flops
     << "   GFLOPs (MAC=1): " << fixed(a.cost.reported_gflops_mac1()) << "\n\n";

  os << std::left << std::setw(6) << "conv" << std::setw(24) << "id"
     << std::setw(16) << "kind" << std::right << std::setw(9) << "r_in_min"
     << std::setw(9) << "r_in_max" << std::setw(7) << "j_min" << std::setw(7)
     << "j_max" << std::setw(10) << "r_prv_min" << std::setw(10) << "r_prv_max"
     << std::setw(11) << "params" << std::setw(13) << "macs" << "  "
     << "class\n";
  for (const auto &r : view.rows) {
    os << std::left << std::setw(6)
       << (r.conv_ordinal ? std::to_string(*r.conv_ordinal) : "-")
       << std::setw(24) << r.node_id << std::setw(16) << r.kind << std::right
       << std::setw(9) << r.r_in_min.to_string() << std::setw(9)
       << r.r_in_max.to_string() << std::setw(7) << r.j_min << std::setw(7)
       << r.j_max << std::setw(10) << r.r_prev_min.to_string() << std::setw(10)
       << r.r_prev_max.to_string() << std::setw(11) << r.params << std::setw(13)
       << r.macs << "  "
       << (r.classification ? to_string(*r.classification) : "-") << "\n";
  }
  return os.str();
}

std::string render_delta(const TransformDelta &delta, Format format) {
  const auto &b = delta.before;
  const auto &a = delta.after;
  const auto dp = a.cost.total_params - b.cost.total_params;
  const auto dm = a.cost.total_macs - b.cost.total_macs;
  std::ostringstream os;
  if (format == Format::Json) {
    json j;
    j["pass"] = delta.pass;
    j["changed"] = delta.changed();
    j["removed"] = id_list(delta.removed_node_ids);
    j["modified"] = id_list(delta.modified_node_ids);
    j["added"] = id_list(delta.added_node_ids);
    j["before"] = summary_json(b);
    j["after"] = summary_json(a);
    j["delta"] = {{"params", dp},
                  {"macs", dm},
                  {"params_relative", relative(dp, b.cost.total_params)},
                  {"macs_relative", relative(dm, b.cost.total_macs)}};
    os << j.dump(2) << "\n";
  } else if (format == Format::Csv) {
    csv_summary_rows(os, b, a);
  } else {
    os << "pass: " << delta.pass << (delta.changed() ? "" : " (no-op)") << "\n";
    summary_text(os, "before: ", b);
    summary_text(os, "after:  ", a);
    os << "delta:  params=" << std::showpos << dp << " macs=" << dm
       << std::noshowpos << " (" << fixed(100.0 * relative(dm, b.cost.total_macs), 2)
       << "% macs)\n";
    auto list = [&](const char *label, const std::vector<std::string> &ids) {
      if (ids.empty())
        return;
      os << label << ":";
      for (const auto &id : ids)
        os << " " << id;
      os << "\n";
    };
    list("removed", delta.removed_node_ids);
    list("modified", delta.modified_node_ids);
    list("added", delta.added_node_ids);
  }
  return os.str();
}

std::string render_comparison(const Comparison &cmp, const std::string &name_a,
                              const std::string &name_b, Format format) {
  std::ostringstream os;
  if (format == Format::Json) {
    json j;
    j["a"] = summary_json(cmp.a);
    j["a"]["name"] = name_a;
    j["b"] = summary_json(cmp.b);
    j["b"]["name"] = name_b;
    j["delta"] = {{"params", cmp.params_delta},
                  {"macs", cmp.macs_delta},
                  {"params_relative", cmp.params_relative},
                  {"macs_relative", cmp.macs_relative}};
    os << j.dump(2) << "\n";
  } else if (format == Format::Csv) {
    csv_summary_rows(os, cmp.a, cmp.b);
  } else {
    summary_text(os, "a (" + name_a + "): ", cmp.a);
    summary_text(os, "b (" + name_b + "): ", cmp.b);
    os << "delta: params=" << std::showpos << cmp.params_delta
       << " macs=" << cmp.macs_delta << std::noshowpos << " ("
       << fixed(100.0 * cmp.params_relative, 2) << "% params, "
       << fixed(100.0 * cmp.macs_relative, 2) << "% macs)\n";
  }
  return os.str();
}

} // namespace rfscope
