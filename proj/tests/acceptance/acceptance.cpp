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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "rfscope/arch_json.hpp"
#include "rfscope/transforms.hpp"
#include "rfscope/zoo.hpp"
#include "support/path_oracle.hpp"
#include "support/random_dag.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>

using namespace rfscope;
using zoo::Family;

namespace {

constexpr double kCostTolerance = 0.20;
constexpr std::uint64_t kOracleSeeds = 100;

class Criterion {
public:
  explicit Criterion(std::string title) : title_(std::move(title)) {}

  void expect(bool ok, const std::string &what) {
    if (!ok) {
      ok_ = false;
      if (failures_.size() < 5)
        failures_.push_back(what);
    }
  }
  void note(const std::string &text) { notes_.push_back(text); }

  bool report(std::ostream &out) const {
    out << (ok_ ? "PASS " : "FAIL ") << title_;
    for (const auto &n : notes_)
      out << " | " << n;
    for (const auto &f : failures_)
      out << " | failed: " << f;
    out << "\n";
    return ok_;
  }

private:
  std::string title_;
  bool ok_ = true;
  std::vector<std::string> notes_;
  std::vector<std::string> failures_;
};

std::string ordinal(const std::optional<std::int64_t> &b) {
  return b ? "conv" + std::to_string(*b) : "none";
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream ss;
  ss.precision(digits);
  ss << std::fixed << v;
  return ss.str();
}

bool within(double value, double target) {
  return std::abs(value - target) <= kCostTolerance * target;
}

std::optional<std::int64_t> pixels(const RFSize &r) {
  return r.is_global() ? std::nullopt : std::optional<std::int64_t>(r.pixels());
}

Criterion border_goldens() {
  Criterion c("1 border goldens @32");
  struct Golden {
    std::string label;
    ArchGraph graph;
    std::int64_t b_min;
    std::optional<std::int64_t> b_max;
  };
  std::vector<Golden> goldens{
      {"vgg11", zoo::build(Family::VGG11), 6, {}},
      {"vgg13", zoo::build(Family::VGG13), 8, {}},
      {"vgg16", zoo::build(Family::VGG16), 8, {}},
      {"vgg19", zoo::build(Family::VGG19), 8, {}},
      {"resnet18-noskip", zoo::build(Family::ResNet18, {32, 32, 3}, 10, {1, false, true}), 5, {}},
      {"vgg19-dil3", zoo::build(Family::VGG19, {32, 32, 3}, 10, {3, true, true}), 5, {}},
      {"mpnet18", zoo::build(Family::MPNet18), 11, 7},
  };
  for (const auto &g : goldens) {
    auto report = classify(g.graph);
    c.expect(report.border_min == g.b_min,
             g.label + " b_min " + ordinal(report.border_min) + " != conv" +
                 std::to_string(g.b_min));
    if (g.b_max)
      c.expect(report.border_max == g.b_max,
               g.label + " b_max " + ordinal(report.border_max) + " != conv" +
                   std::to_string(*g.b_max));
    std::string text = g.label + "=" + ordinal(report.border_min);
    if (g.b_max)
      text += "/" + ordinal(report.border_max);
    c.note(text);
  }
  return c;
}

Criterion not_reproduced_ledger() {
  Criterion c("2 not-reproduced ledger (documented, not targets)");
  struct Entry {
    std::string label;
    Family family;
    std::string reference;
  };
  for (const auto &e : std::vector<Entry>{{"resnet18", Family::ResNet18, "conv11"},
                                          {"resnet34", Family::ResNet34, "conv17"},
                                          {"mpnet36", Family::MPNet36, "conv22"}}) {
    auto report = classify(zoo::build(e.family));
    c.note(e.label + " b_min=" + ordinal(report.border_min) + " b_max=" +
           ordinal(report.border_max) + " (reference " + e.reference + ")");
  }
  return c;
}

Criterion cost_reproduction() {
  Criterion c("3 cost model, MAC=1 GFLOPs, +-20%");
  auto r18 = remove_stem_downsampling(zoo::build(Family::ResNet18), 2).delta;
  auto r34 = remove_stem_downsampling(zoo::build(Family::ResNet34), 2).delta;
  struct Check {
    std::string label;
    double value, target;
  };
  for (const auto &k : std::vector<Check>{
           {"resnet18 before", r18.before.cost.reported_gflops_mac1(), 0.04},
           {"resnet18 after", r18.after.cost.reported_gflops_mac1(), 0.56},
           {"resnet34 before", r34.before.cost.reported_gflops_mac1(), 0.076},
           {"resnet34 after", r34.after.cost.reported_gflops_mac1(), 1.16}}) {
    c.expect(within(k.value, k.target),
             k.label + " " + fixed(k.value) + " vs " + fixed(k.target, 3));
    c.note(k.label + "=" + fixed(k.value) + " (target " + fixed(k.target, 3) + ")");
  }
  return c;
}

Criterion oracle_equivalence() {
  Criterion c("4 oracle equivalence, 100 random DAGs");
  std::size_t nodes = 0;
  std::uint64_t paths = 0;
  for (std::uint64_t seed = 0; seed < kOracleSeeds; ++seed) {
    auto g = testing::random_dag(seed, {12, 2, false});
    auto ann = propagate_dag(g);
    for (const auto &node : g.nodes()) {
      auto oracle = testing::path_enumeration_oracle(g, node.id);
      const auto &a = ann.at(node.id);
      c.expect(pixels(a.r_in_min) == oracle.r_min && pixels(a.r_in_max) == oracle.r_max,
               "seed " + std::to_string(seed) + " node " + node.id);
      ++nodes;
      paths += oracle.paths;
    }
  }
  c.note(std::to_string(nodes) + " nodes, " + std::to_string(paths) + " paths");
  return c;
}

ArchGraph with_head(const ArchGraph &g) {
  auto nodes = g.nodes();
  auto edges = g.edges();
  auto sink = sink_node(g);
  auto n = static_cast<std::int64_t>(nodes.size());
  nodes.push_back(LayerNode{"gap", GlobalAvgPool{}, n});
  nodes.push_back(LayerNode{"fc", Dense{10, true}, n + 1});
  nodes.push_back(LayerNode{"softmax", Softmax{}, n + 2});
  edges.push_back(Edge{sink, "gap"});
  edges.push_back(Edge{"gap", "fc"});
  edges.push_back(Edge{"fc", "softmax"});
  return ArchGraph(g.name(), g.input(), std::move(nodes), std::move(edges));
}

ArchGraph insert_after(const ArchGraph &g, const std::string &after, LayerKind kind) {
  auto nodes = g.nodes();
  nodes.push_back(LayerNode{"inserted", std::move(kind),
                            static_cast<std::int64_t>(nodes.size())});
  std::vector<Edge> edges;
  for (const auto &e : g.edges())
    edges.push_back(e.source == after ? Edge{"inserted", e.target} : e);
  edges.push_back(Edge{after, "inserted"});
  return ArchGraph(g.name(), g.input(), std::move(nodes), std::move(edges));
}

Criterion properties() {
  Criterion c("5 property suites");
  int monotone = 0, neutral = 0, truncations = 0, stems = 0;
  const std::vector<LayerKind> neutral_kinds{
      BatchNorm{}, Activation{"relu"}, Attention{AttentionVariant::CBAM},
      Conv2d{1, 1, 1, Padding::same(), 8, true}};

  for (std::uint64_t seed = 0; seed < kOracleSeeds; ++seed) {
    const std::string tag = "seed " + std::to_string(seed);
    auto g = testing::random_dag(seed);
    auto ann = propagate_dag(g);

    // monotonicity along every path, j = product of strides
    for (const auto &node : g.nodes()) {
      for (const auto &path : testing::enumerate_paths(g, node.id)) {
        RFState s;
        std::int64_t product = 1;
        for (const auto &id : path) {
          auto next = layer_rf_transfer(s, g.node(id).kind);
          product *= layer_stride(g.node(id).kind);
          c.expect(s.r <= next.r && next.j == product, tag + " path to " + node.id);
          s = next;
        }
        ++monotone;
      }
    }

    // neutral insertion
    const auto &target = g.nodes()[1 + seed % (g.nodes().size() - 1)].id;
    for (const auto &kind : neutral_kinds) {
      auto h = propagate_dag(insert_after(g, target, kind));
      for (const auto &node : g.nodes())
        c.expect(h.at(node.id).r_in_min == ann.at(node.id).r_in_min &&
                     h.at(node.id).r_in_max == ann.at(node.id).r_in_max &&
                     h.at(node.id).j_in_min == ann.at(node.id).j_in_min,
                 tag + " neutral insertion at " + target);
      ++neutral;
    }

    // truncation: idempotent, zero unproductive convs, MACs never grow
    for (std::int64_t i : {8, 16, 32}) {
      auto blocks = with_head(testing::random_block_dag(seed).with_input({i, i, 8}));
      auto first = truncate_at_border(blocks, 10);
      auto second = truncate_at_border(first.graph, 10);
      c.expect(validate(first.graph).ok() &&
                   classify(first.graph).unproductive_count() == 0 &&
                   second.graph == first.graph && !second.delta.changed() &&
                   first.delta.after.cost.total_macs <= first.delta.before.cost.total_macs,
               tag + " truncation @" + std::to_string(i));
      truncations += first.delta.changed();
    }

    // stem removal on chains: j / 4 after two stride-2 layers, r never grows,
    // strictly smaller once a later window grows it; conv MACs never shrink
    auto chain = testing::random_chain(seed, 10);
    int downsampling = 0;
    for (const auto &n : chain.nodes())
      downsampling += layer_stride(n.kind) > 1;
    if (downsampling >= 2) {
      auto [h, delta] = remove_stem_downsampling(chain, 2);
      std::set<std::string> gone(delta.modified_node_ids.begin(), delta.modified_node_ids.end());
      gone.insert(delta.removed_node_ids.begin(), delta.removed_node_ids.end());
      auto before = propagate_dag(chain);
      auto after = propagate_dag(h);
      std::int64_t divisor = 1;
      bool armed = false, shrinking = false;
      for (const auto &id : topological_order(chain)) {
        const auto &kind = chain.node(id).kind;
        if (h.contains(id)) {
          const auto &a = before.at(id), &b = after.at(id);
          c.expect(b.j_in_min * divisor == a.j_in_min, tag + " jump at " + id);
          c.expect(shrinking ? b.r_in_min < a.r_in_min : b.r_in_min == a.r_in_min,
                   tag + " rf at " + id);
        }
        std::int64_t grows = 0;
        if (const auto *cv = std::get_if<Conv2d>(&kind))
          grows = effective_kernel(cv->kernel, cv->dilation) - 1;
        else if (const auto *p = std::get_if<Pool>(&kind))
          grows = p->kernel - 1;
        if (armed && grows > 0 && h.contains(id))
          shrinking = true;
        if (gone.count(id)) {
          divisor *= layer_stride(kind);
          if (!h.contains(id) && grows > 0)
            shrinking = true;
          armed = true;
        }
      }
      c.expect(divisor == 4, tag + " divisor " + std::to_string(divisor));
      c.expect(count_macs(h, {false, 16}) >= count_macs(chain, {false, 16}),
               tag + " stem conv MACs");
      ++stems;
    }
  }
  for (auto f : zoo::all_families()) {
    auto t = truncate_at_border(zoo::build(f), 10).delta;
    c.expect(t.after.cost.total_macs <= t.before.cost.total_macs,
             std::string(zoo::family_name(f)) + " truncation MACs");
  }
  for (auto f : {Family::ResNet18, Family::ResNet34, Family::VGG16, Family::MPNet18}) {
    auto s = remove_stem_downsampling(zoo::build(f), 2).delta;
    c.expect(s.after.cost.total_macs >= s.before.cost.total_macs,
             std::string(zoo::family_name(f)) + " stem MACs");
  }
  c.note(std::to_string(monotone) + " paths, " + std::to_string(neutral) +
         " insertions, " + std::to_string(truncations) + " truncations, " +
         std::to_string(stems) + " stem removals");
  return c;
}

std::string capture(const std::string &command) {
  std::string output;
  FILE *pipe = ::popen(command.c_str(), "r");
  if (!pipe)
    return output;
  char buffer[4096];
  std::size_t n;
  while ((n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0)
    output.append(buffer, n);
  ::pclose(pipe);
  return output;
}

Criterion round_trip() {
  Criterion c("6 round trip and deterministic output");
  for (auto f : zoo::all_families()) {
    auto g = zoo::build(f);
    auto text = serialize_architecture(g);
    auto back = parse_architecture(text);
    c.expect(back == g && serialize_architecture(back) == text,
             std::string(zoo::family_name(f)) + " round trip");
  }
  c.note("8 zoo models round-trip");
  int runs = 0;
  for (const char *model : {"zoo:vgg16", "zoo:resnet34", "zoo:mpnet18"}) {
    for (const char *fmt : {"json", "csv"}) {
      auto cmd = std::string(RFSCOPE_CLI_PATH) + " analyze " + model + " --format " + fmt;
      auto a = capture(cmd), b = capture(cmd);
      c.expect(!a.empty() && a == b, cmd);
      ++runs;
    }
  }
  c.note(std::to_string(runs) + " CLI outputs byte-identical across runs");
  return c;
}

} // namespace

int main() {
  bool ok = true;
  ok &= border_goldens().report(std::cout);
  ok &= not_reproduced_ledger().report(std::cout);
  ok &= cost_reproduction().report(std::cout);
  ok &= oracle_equivalence().report(std::cout);
  ok &= properties().report(std::cout);
  ok &= round_trip().report(std::cout);
  std::cout << (ok ? "acceptance: all criteria pass\n" : "acceptance: FAILED\n");
  return ok ? 0 : 1;
}
