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
#include "rfscope/transforms.hpp"
#include "rfscope/zoo.hpp"

#include <doctest.h>

using namespace rfscope;

namespace {

// Returns the message of the DocumentError raised by `doc`, checking its kind.
std::string failure(std::string_view doc, DocumentError::Kind kind) {
  try {
    parse_architecture(doc);
  } catch (const DocumentError &e) {
    CHECK(e.kind() == kind);
    return e.what();
  }
  FAIL("document was accepted");
  return {};
}

bool contains(const std::string &haystack, const std::string &needle) {
  return haystack.find(needle) != std::string::npos;
}

constexpr std::string_view kSmall = R"({
  "name": "small",
  "input": {"height": 16, "width": 16, "channels": 3},
  "layers": [
    {"id": "in", "kind": "input"},
    {"id": "c1", "kind": "conv2d", "kernel": 3, "filters": 8},
    {"id": "att", "kind": "attention", "variant": "cbam"},
    {"id": "p1", "kind": "pool", "mode": "avg", "kernel": [2, 2]},
    {"id": "c2", "kind": "conv2d", "kernel": [1, 1], "filters": 8, "padding": "valid"},
    {"id": "cat", "kind": "concat"},
    {"id": "gap", "kind": "global_avg_pool"},
    {"id": "fc", "kind": "dense", "units": 4, "bias": false}
  ],
  "edges": [["in", "c1"], ["c1", "att"], ["att", "p1"], ["p1", "c2"],
            ["p1", "cat"], ["c2", "cat"], ["cat", "gap"], ["gap", "fc"]]
})";

} // namespace

TEST_CASE("round trip on every zoo model") {
  for (auto f : zoo::all_families()) {
    CAPTURE(zoo::family_name(f));
    auto g = zoo::build(f);
    auto text = serialize_architecture(g);
    auto back = parse_architecture(text);
    CHECK(back == g);
    CHECK(serialize_architecture(back) == text);
  }
  auto dilated = zoo::build(zoo::Family::VGG19, {32, 32, 3}, 10, {3, true, true});
  CHECK(parse_architecture(serialize_architecture(dilated)) == dilated);
  auto truncated = truncate_at_border(zoo::build(zoo::Family::MPNet18), 10).graph;
  CHECK(parse_architecture(serialize_architecture(truncated)) == truncated);
}

TEST_CASE("defaults and shorthands") {
  auto g = parse_architecture(kSmall);
  const auto &c1 = std::get<Conv2d>(g.node("c1").kind);
  CHECK(c1.stride == 1);
  CHECK(c1.dilation == 1);
  CHECK(c1.padding == Padding::same());
  CHECK(c1.bias);
  const auto &p1 = std::get<Pool>(g.node("p1").kind);
  CHECK(p1.mode == PoolMode::Avg);
  CHECK(p1.kernel == 2);
  CHECK(p1.stride == 2);
  CHECK(p1.padding == 0);
  CHECK(std::get<Conv2d>(g.node("c2").kind).padding == Padding::valid());
  CHECK(std::get<Attention>(g.node("att").kind).variant == AttentionVariant::CBAM);
  CHECK_FALSE(std::get<Dense>(g.node("fc").kind).bias);
  CHECK(g.node("fc").declaration_index == 7);
  CHECK(parse_architecture(serialize_architecture(g)) == g);
}

TEST_CASE("schema errors name the offending location") {
  SUBCASE("missing filters") {
    auto msg = failure(R"({"name": "x", "input": {"height": 8, "width": 8, "channels": 3},
      "layers": [{"id": "in", "kind": "input"}, {"id": "c", "kind": "conv2d", "kernel": 3}],
      "edges": [["in", "c"]]})",
                       DocumentError::Kind::Schema);
    CHECK(contains(msg, "$.layers[1].filters"));
    CHECK(contains(msg, "'c'"));
  }
  SUBCASE("unknown key") {
    auto msg = failure(R"({"name": "x", "input": {"height": 8, "width": 8, "channels": 3},
      "layers": [{"id": "in", "kind": "input", "color": "red"}], "edges": []})",
                       DocumentError::Kind::Schema);
    CHECK(contains(msg, "$.layers[0].color"));
  }
  SUBCASE("unknown kind") {
    auto msg = failure(R"({"name": "x", "input": {"height": 8, "width": 8, "channels": 3},
      "layers": [{"id": "in", "kind": "lstm"}], "edges": []})",
                       DocumentError::Kind::Schema);
    CHECK(contains(msg, "$.layers[0].kind"));
  }
  SUBCASE("non-square kernel") {
    auto msg = failure(R"({"name": "x", "input": {"height": 8, "width": 8, "channels": 3},
      "layers": [{"id": "in", "kind": "input"},
                 {"id": "c", "kind": "conv2d", "kernel": [3, 5], "filters": 4}],
      "edges": [["in", "c"]]})",
                       DocumentError::Kind::Schema);
    CHECK(contains(msg, "$.layers[1].kernel"));
  }
  SUBCASE("wrong value type") {
    auto msg = failure(R"({"name": "x", "input": {"height": "8", "width": 8, "channels": 3},
      "layers": [], "edges": []})",
                       DocumentError::Kind::Schema);
    CHECK(contains(msg, "$.input.height"));
  }
  SUBCASE("malformed edge") {
    auto msg = failure(R"({"name": "x", "input": {"height": 8, "width": 8, "channels": 3},
      "layers": [{"id": "in", "kind": "input"}], "edges": [["in"]]})",
                       DocumentError::Kind::Schema);
    CHECK(contains(msg, "$.edges[0]"));
  }
}

TEST_CASE("semantic errors come from validation") {
  SUBCASE("edge to an unknown node") {
    auto msg = failure(R"({"name": "x", "input": {"height": 8, "width": 8, "channels": 3},
      "layers": [{"id": "in", "kind": "input"}, {"id": "c", "kind": "conv2d", "kernel": 3, "filters": 4}],
      "edges": [["in", "c"], ["c", "ghost"]]})",
                       DocumentError::Kind::Semantic);
    CHECK(contains(msg, "unknown node 'ghost'"));
  }
  SUBCASE("cycle") {
    auto msg = failure(R"({"name": "x", "input": {"height": 8, "width": 8, "channels": 3},
      "layers": [{"id": "in", "kind": "input"}, {"id": "A", "kind": "add"},
                 {"id": "B", "kind": "conv2d", "kernel": 3, "filters": 3},
                 {"id": "out", "kind": "softmax"}],
      "edges": [["in", "A"], ["A", "B"], ["B", "A"], ["B", "out"]]})",
                       DocumentError::Kind::Semantic);
    CHECK(contains(msg, "cycle through {A,B}"));
  }
}

TEST_CASE("syntax errors carry line and column") {
  auto msg = failure("{\n  \"name\": \"x\",\n  \"input\": {,}\n}", DocumentError::Kind::Syntax);
  CHECK(contains(msg, "line 3"));
  CHECK(contains(msg, "column"));
  failure("", DocumentError::Kind::Syntax);
  failure("[1, 2]", DocumentError::Kind::Schema);
}
