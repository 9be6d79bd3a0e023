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

#include "rfscope/arch_json.hpp"

#include <json.hpp>

#include <set>

namespace rfscope {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void schema_error(const std::string &path, const std::string &what) {
  throw DocumentError(DocumentError::Kind::Schema, path + ": " + what);
}

void reject_unknown_keys(const json &object, const std::string &path,
                         const std::set<std::string> &allowed) {
  for (const auto &[key, _] : object.items())
    if (!allowed.count(key))
      schema_error(path + "." + key, "unknown key");
}

const json &require(const json &object, const std::string &key,
                    const std::string &path, const std::string &context) {
  if (!object.contains(key))
    schema_error(path + "." + key, "missing required key" + context);
  return object.at(key);
}

std::int64_t as_int(const json &value, const std::string &path) {
  if (!value.is_number_integer())
    schema_error(path, "expected an integer");
  return value.get<std::int64_t>();
}

std::string as_string(const json &value, const std::string &path) {
  if (!value.is_string())
    schema_error(path, "expected a string");
  return value.get<std::string>();
}

bool as_bool(const json &value, const std::string &path) {
  if (!value.is_boolean())
    schema_error(path, "expected a boolean");
  return value.get<bool>();
}

// Integer or [n, n]; kernels and strides must be square.
std::int64_t as_square(const json &value, const std::string &path) {
  if (value.is_array()) {
    if (value.size() != 2)
      schema_error(path, "expected an integer or a pair of integers");
    auto a = as_int(value[0], path + "[0]");
    auto b = as_int(value[1], path + "[1]");
    if (a != b)
      schema_error(path, "non-square value [" + std::to_string(a) + ", " +
                             std::to_string(b) + "] is not supported");
    return a;
  }
  return as_int(value, path);
}

template <typename T>
T optional_field(const json &layer, const std::string &key, const std::string &path,
                 T fallback, T (*convert)(const json &, const std::string &)) {
  if (!layer.contains(key))
    return fallback;
  return convert(layer.at(key), path + "." + key);
}

LayerKind parse_kind(const json &layer, const std::string &path,
                     const std::string &id) {
  const std::string kind = as_string(require(layer, "kind", path, ""), path + ".kind");
  const std::string ctx = " on layer '" + id + "'";
  auto keys = [&](std::set<std::string> extra) {
    extra.insert({"id", "kind"});
    reject_unknown_keys(layer, path, extra);
  };

  if (kind == "input") {
    keys({});
    return Input{};
  }
  if (kind == "conv2d") {
    keys({"kernel", "stride", "dilation", "padding", "filters", "bias"});
    Conv2d c;
    c.kernel = as_square(require(layer, "kernel", path, ctx), path + ".kernel");
    c.filters = as_int(require(layer, "filters", path, ctx), path + ".filters");
    c.stride = optional_field<std::int64_t>(layer, "stride", path, 1, as_square);
    c.dilation = optional_field<std::int64_t>(layer, "dilation", path, 1, as_square);
    c.bias = optional_field<bool>(layer, "bias", path, true, as_bool);
    if (layer.contains("padding")) {
      const auto &p = layer.at("padding");
      if (p.is_string()) {
        auto mode = p.get<std::string>();
        if (mode == "same")
          c.padding = Padding::same();
        else if (mode == "valid")
          c.padding = Padding::valid();
        else
          schema_error(path + ".padding", "expected \"same\", \"valid\" or an integer");
      } else {
        c.padding = Padding::explicitly(as_int(p, path + ".padding"));
      }
    }
    return c;
  }
  if (kind == "pool") {
    keys({"mode", "kernel", "stride", "padding"});
    Pool p;
    auto mode = as_string(require(layer, "mode", path, ctx), path + ".mode");
    if (mode == "max")
      p.mode = PoolMode::Max;
    else if (mode == "avg")
      p.mode = PoolMode::Avg;
    else
      schema_error(path + ".mode", "expected \"max\" or \"avg\"");
    p.kernel = as_square(require(layer, "kernel", path, ctx), path + ".kernel");
    p.stride = optional_field<std::int64_t>(layer, "stride", path, p.kernel, as_square);
    p.padding = optional_field<std::int64_t>(layer, "padding", path, 0, as_int);
    return p;
  }
  if (kind == "global_avg_pool") {
    keys({});
    return GlobalAvgPool{};
  }
  if (kind == "dense") {
    keys({"units", "bias"});
    Dense d;
    d.units = as_int(require(layer, "units", path, ctx), path + ".units");
    d.bias = optional_field<bool>(layer, "bias", path, true, as_bool);
    return d;
  }
  if (kind == "add") {
    keys({});
    return Add{};
  }
  if (kind == "concat") {
    keys({});
    return Concat{};
  }
  if (kind == "batch_norm") {
    keys({});
    return BatchNorm{};
  }
  if (kind == "activation") {
    keys({"name"});
    return Activation{optional_field<std::string>(layer, "name", path, "relu", as_string)};
  }
  if (kind == "attention") {
    keys({"variant"});
    auto v = as_string(require(layer, "variant", path, ctx), path + ".variant");
    if (v == "se")
      return Attention{AttentionVariant::SE};
    if (v == "spatial")
      return Attention{AttentionVariant::Spatial};
    if (v == "cbam")
      return Attention{AttentionVariant::CBAM};
    schema_error(path + ".variant", "expected \"se\", \"spatial\" or \"cbam\"");
  }
  if (kind == "softmax") {
    keys({});
    return Softmax{};
  }
  schema_error(path + ".kind", "unknown layer kind '" + kind + "'");
}

std::string position_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

std::string_view attention_name(AttentionVariant v) {
  switch (v) {
  case AttentionVariant::SE: return "se";
  case AttentionVariant::Spatial: return "spatial";
  case AttentionVariant::CBAM: return "cbam";
  }
  return "se";
}

} // namespace

ArchGraph parse_architecture(std::string_view document) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error &e) {
    throw DocumentError(DocumentError::Kind::Syntax,
                        "syntax error at " + position_of(document, e.byte) +
                            ": " + e.what());
  }

  if (!root.is_object())
    schema_error("$", "expected an object");
  reject_unknown_keys(root, "$", {"name", "input", "layers", "edges"});

  auto name = as_string(require(root, "name", "$", ""), "$.name");

  const auto &in = require(root, "input", "$", "");
  if (!in.is_object())
    schema_error("$.input", "expected an object");
  reject_unknown_keys(in, "$.input", {"height", "width", "channels"});
  InputSpec input{as_int(require(in, "height", "$.input", ""), "$.input.height"),
                  as_int(require(in, "width", "$.input", ""), "$.input.width"),
                  as_int(require(in, "channels", "$.input", ""), "$.input.channels")};

  const auto &layers = require(root, "layers", "$", "");
  if (!layers.is_array())
    schema_error("$.layers", "expected an array");
  std::vector<LayerNode> nodes;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string path = "$.layers[" + std::to_string(i) + "]";
    const auto &layer = layers[i];
    if (!layer.is_object())
      schema_error(path, "expected an object");
    auto id = as_string(require(layer, "id", path, ""), path + ".id");
    nodes.push_back(LayerNode{id, parse_kind(layer, path, id),
                              static_cast<std::int64_t>(i)});
  }

  const auto &edge_list = require(root, "edges", "$", "");
  if (!edge_list.is_array())
    schema_error("$.edges", "expected an array");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < edge_list.size(); ++i) {
    const std::string path = "$.edges[" + std::to_string(i) + "]";
    const auto &e = edge_list[i];
    if (!e.is_array() || e.size() != 2)
      schema_error(path, "expected [source_id, target_id]");
    edges.push_back(Edge{as_string(e[0], path + "[0]"), as_string(e[1], path + "[1]")});
  }

  ArchGraph graph(std::move(name), input, std::move(nodes), std::move(edges));
  auto verdict = validate(graph);
  if (!verdict.ok())
    throw DocumentError(DocumentError::Kind::Semantic, verdict.to_string());
  return graph;
}

std::string serialize_architecture(const ArchGraph &graph) {
  json root;
  root["name"] = graph.name();
  root["input"] = {{"height", graph.input().height},
                   {"width", graph.input().width},
                   {"channels", graph.input().channels}};
  json layers = json::array();
  auto nodes = graph.nodes();
  std::sort(nodes.begin(), nodes.end(), [](const auto &a, const auto &b) {
    return a.declaration_index < b.declaration_index;
  });
  for (const auto &node : nodes) {
    json layer;
    layer["id"] = node.id;
    layer["kind"] = std::string(kind_name(node.kind));
    if (const auto *c = std::get_if<Conv2d>(&node.kind)) {
      layer["kernel"] = c->kernel;
      layer["stride"] = c->stride;
      layer["dilation"] = c->dilation;
      switch (c->padding.mode) {
      case PaddingMode::Same: layer["padding"] = "same"; break;
      case PaddingMode::Valid: layer["padding"] = "valid"; break;
      case PaddingMode::Explicit: layer["padding"] = c->padding.amount; break;
      }
      layer["filters"] = c->filters;
      layer["bias"] = c->bias;
    } else if (const auto *p = std::get_if<Pool>(&node.kind)) {
      layer["mode"] = p->mode == PoolMode::Max ? "max" : "avg";
      layer["kernel"] = p->kernel;
      layer["stride"] = p->stride;
      layer["padding"] = p->padding;
    } else if (const auto *d = std::get_if<Dense>(&node.kind)) {
      layer["units"] = d->units;
      layer["bias"] = d->bias;
    } else if (const auto *a = std::get_if<Activation>(&node.kind)) {
      layer["name"] = a->name;
    } else if (const auto *att = std::get_if<Attention>(&node.kind)) {
      layer["variant"] = std::string(attention_name(att->variant));
    }
    layers.push_back(std::move(layer));
  }
  root["layers"] = std::move(layers);
  json edges = json::array();
  for (const auto &e : graph.edges())
    edges.push_back(json::array({e.source, e.target}));
  root["edges"] = std::move(edges);
  return root.dump(2) + "\n";
}

} // namespace rfscope
