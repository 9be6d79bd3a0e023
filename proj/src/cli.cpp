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

#include "rfscope/cli.hpp"

#include "rfscope/arch_json.hpp"
#include "rfscope/report.hpp"
#include "rfscope/version.hpp"
#include "rfscope/zoo.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace rfscope::cli {

namespace {

constexpr std::string_view kZooPrefix = "zoo:";

zoo::ZooSpec parse_zoo_ref(std::string_view name) {
  zoo::ZooSpec spec;
  auto dash = name.find('-');
  auto base = name.substr(0, dash);
  auto family = zoo::family_from_name(base);
  if (!family)
    throw InputError("unknown zoo model '" + std::string(base) + "'");
  spec.family = *family;
  while (dash != std::string_view::npos) {
    auto next = name.find('-', dash + 1);
    auto suffix = name.substr(dash + 1, next == std::string_view::npos
                                            ? std::string_view::npos
                                            : next - dash - 1);
    if (suffix == "noskip") {
      spec.options.skips_enabled = false;
    } else if (suffix == "nostem") {
      spec.options.stem_downsampling = false;
    } else if (suffix.starts_with("dil") && suffix.size() > 3) {
      try {
        spec.options.dilation = std::stoll(std::string(suffix.substr(3)));
      } catch (const std::exception &) {
        throw InputError("bad dilation suffix '" + std::string(suffix) + "'");
      }
    } else {
      throw InputError("unknown zoo variant '" + std::string(suffix) + "'");
    }
    dash = next;
  }
  return spec;
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content))
    throw InputError("cannot write '" + path + "'");
}

struct CommonOptions {
  std::vector<std::int64_t> input_size;
  std::string format = "text";

  std::optional<std::pair<std::int64_t, std::int64_t>> size() const {
    if (input_size.empty())
      return std::nullopt;
    return std::make_pair(input_size[0], input_size[1]);
  }
};

void add_common(CLI::App *cmd, CommonOptions &opts) {
  cmd->add_option("--input-size", opts.input_size, "Override input height and width")
      ->expected(2)
      ->check(CLI::PositiveNumber);
  cmd->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}));
}

struct PassSpec {
  std::string name;
  std::int64_t count = 2;
};

PassSpec parse_pass(const std::string &text) {
  if (text == "truncate")
    return {"truncate", 0};
  const std::string stem = "remove-stem-downsampling";
  if (text == stem)
    return {stem, 2};
  if (text.rfind(stem + ":", 0) == 0) {
    auto n = text.substr(stem.size() + 1);
    std::size_t used = 0;
    std::int64_t count = 0;
    try {
      count = std::stoll(n, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used != n.size() || count < 1)
      throw CLI::ValidationError("--pass", "bad downsampling count '" + n + "'");
    return {stem, count};
  }
  throw CLI::ValidationError("--pass", "unknown pass '" + text + "'");
}

} // namespace

ArchGraph load_architecture(const std::string &ref,
                            std::optional<std::pair<std::int64_t, std::int64_t>> size,
                            std::int64_t num_classes) {
  if (ref.rfind(kZooPrefix, 0) == 0) {
    auto spec = parse_zoo_ref(std::string_view(ref).substr(kZooPrefix.size()));
    spec.num_classes = num_classes;
    if (size)
      spec.input = InputSpec{size->first, size->second, spec.input.channels};
    return zoo::build(spec);
  }
  auto graph = parse_architecture(read_file(ref));
  if (size)
    graph = graph.with_input(
        InputSpec{size->first, size->second, graph.input().channels});
  return graph;
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Receptive-field analysis and border-layer optimization for CNN "
               "architectures",
               "rfscope"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOptions analyze_opts;
  std::string analyze_arch;
  auto *analyze_cmd = app.add_subcommand("analyze", "Border and cost report");
  analyze_cmd->add_option("arch", analyze_arch, "Document path or zoo:NAME")->required();
  add_common(analyze_cmd, analyze_opts);

  CommonOptions optimize_opts;
  std::string optimize_arch, pass_text, emit_path;
  std::int64_t classes = 10;
  auto *optimize_cmd = app.add_subcommand("optimize", "Apply a rewrite pass");
  optimize_cmd->add_option("arch", optimize_arch, "Document path or zoo:NAME")->required();
  optimize_cmd
      ->add_option("--pass", pass_text,
                   "truncate | remove-stem-downsampling[:N]")
      ->required();
  optimize_cmd->add_option("--classes", classes, "Classes of the new head")
      ->check(CLI::Range(static_cast<std::int64_t>(2),
                         std::numeric_limits<std::int64_t>::max()));
  optimize_cmd->add_option("--emit", emit_path, "Write the rewritten document");
  add_common(optimize_cmd, optimize_opts);

  auto *zoo_cmd = app.add_subcommand("zoo", "Built-in architectures");
  zoo_cmd->require_subcommand(1);
  auto *zoo_list = zoo_cmd->add_subcommand("list", "List zoo models");
  std::string emit_name, emit_out;
  std::vector<std::int64_t> emit_size;
  auto *zoo_emit = zoo_cmd->add_subcommand("emit", "Write a zoo model document");
  zoo_emit->add_option("name", emit_name, "Zoo model, e.g. vgg16 or resnet18-noskip")
      ->required();
  zoo_emit->add_option("--out", emit_out, "Output file (default: stdout)");
  zoo_emit->add_option("--input-size", emit_size, "Input height and width")
      ->expected(2)
      ->check(CLI::PositiveNumber);

  CommonOptions compare_opts;
  std::string compare_a, compare_b;
  auto *compare_cmd = app.add_subcommand("compare", "Compare two architectures");
  compare_cmd->add_option("a", compare_a)->required();
  compare_cmd->add_option("b", compare_b)->required();
  add_common(compare_cmd, compare_opts);

  std::string validate_arch;
  auto *validate_cmd = app.add_subcommand("validate", "Check an architecture");
  validate_cmd->add_option("arch", validate_arch)->required();

  PassSpec pass;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (optimize_cmd->parsed())
      pass = parse_pass(pass_text);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion &) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError &e) {
    err << "rfscope: " << e.what() << "\n";
    return kUsage;
  }

  auto fmt = [](const CommonOptions &o) { return *format_from_name(o.format); };

  try {
    if (analyze_cmd->parsed()) {
      auto graph = load_architecture(analyze_arch, analyze_opts.size());
      out << render_analysis(make_view(graph), fmt(analyze_opts));
      return kOk;
    }

    if (optimize_cmd->parsed()) {
      auto graph = load_architecture(optimize_arch, optimize_opts.size(), classes);
      auto result = pass.name == "truncate"
                        ? truncate_at_border(graph, classes)
                        : remove_stem_downsampling(graph, pass.count);
      out << render_delta(result.delta, fmt(optimize_opts));
      if (!emit_path.empty())
        write_file(emit_path, serialize_architecture(result.graph));
      return result.delta.changed() ? kOk : kNoOp;
    }

    if (zoo_cmd->parsed()) {
      if (zoo_list->parsed()) {
        for (auto f : zoo::all_families())
          out << zoo::family_name(f) << "\n";
        out << "variants: -noskip -nostem (resnet), -dilN (vgg)\n";
        return kOk;
      }
      std::optional<std::pair<std::int64_t, std::int64_t>> size;
      if (!emit_size.empty())
        size = std::make_pair(emit_size[0], emit_size[1]);
      auto ref = emit_name.rfind(kZooPrefix, 0) == 0 ? emit_name
                                                     : std::string(kZooPrefix) + emit_name;
      auto doc = serialize_architecture(load_architecture(ref, size));
      if (emit_out.empty())
        out << doc;
      else
        write_file(emit_out, doc);
      return kOk;
    }

    if (compare_cmd->parsed()) {
      auto a = load_architecture(compare_a, compare_opts.size());
      auto b = load_architecture(compare_b, compare_opts.size());
      out << render_comparison(compare(a, b), a.name(), b.name(), fmt(compare_opts));
      return kOk;
    }

    if (validate_cmd->parsed()) {
      auto graph = load_architecture(validate_arch, std::nullopt);
      auto verdict = validate(graph);
      if (!verdict.ok()) {
        err << verdict.to_string();
        return kInvalid;
      }
      out << graph.name() << ": ok\n";
      return kOk;
    }
  } catch (const InputError &e) {
    err << "rfscope: " << e.what() << "\n";
    return kNoInput;
  } catch (const zoo::ZooError &e) {
    err << "rfscope: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception &e) {
    // document, graph, shape, frontier and transform failures
    err << "rfscope: " << e.what() << "\n";
    return kInvalid;
  }
  return kUsage;
}

} // namespace rfscope::cli
