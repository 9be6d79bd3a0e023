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
#include "rfscope/cli.hpp"
#include "rfscope/zoo.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace rfscope;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("rfscope_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }

  std::string file(const std::string &name, const std::string &content = {}) const {
    auto p = path_ / name;
    if (!content.empty())
      std::ofstream(p, std::ios::binary) << content;
    return p.string();
  }

private:
  fs::path path_;
};

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string &line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep))
    fields.push_back(field);
  if (!line.empty() && line.back() == sep)
    fields.emplace_back();
  return fields;
}

} // namespace

TEST_CASE("analyze") {
  SUBCASE("json carries the border") {
    auto r = invoke({"analyze", "zoo:vgg16", "--format", "json"});
    REQUIRE(r.code == cli::kOk);
    auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["border_min"] == 8);
    CHECK(doc["border_max"] == 8);
    CHECK(doc["unproductive_convs"] == 6);
    CHECK(doc["cost"]["total_params"] == 14719818);
  }
  SUBCASE("no border is null") {
    auto r = invoke({"analyze", "zoo:vgg16", "--input-size", "224", "224", "--format", "json"});
    REQUIRE(r.code == cli::kOk);
    auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["border_min"].is_null());
    CHECK(doc["resolution"] == 224);
  }
  SUBCASE("variants") {
    auto r = invoke({"analyze", "zoo:resnet18-noskip", "--format", "json"});
    REQUIRE(r.code == cli::kOk);
    CHECK(nlohmann::json::parse(r.out)["border_min"] == 5);
    r = invoke({"analyze", "zoo:vgg19-dil3", "--format", "json"});
    REQUIRE(r.code == cli::kOk);
    CHECK(nlohmann::json::parse(r.out)["border_min"] == 5);
  }
  SUBCASE("text mentions the border") {
    auto r = invoke({"analyze", "zoo:mpnet18"});
    REQUIRE(r.code == cli::kOk);
    CHECK(r.out.find("conv11") != std::string::npos);
  }
  SUBCASE("machine formats are byte-identical across runs") {
    for (const char *fmt : {"json", "csv"})
      for (const char *model : {"zoo:mpnet36", "zoo:resnet34", "zoo:vgg11"})
        CHECK(invoke({"analyze", model, "--format", fmt}).out ==
              invoke({"analyze", model, "--format", fmt}).out);
  }
  SUBCASE("csv and json agree") {
    auto json = nlohmann::json::parse(invoke({"analyze", "zoo:resnet18", "--format", "json"}).out);
    auto csv = invoke({"analyze", "zoo:resnet18", "--format", "csv"}).out;
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    auto header = split(line, ',');
    std::size_t row = 0;
    while (std::getline(lines, line)) {
      auto fields = split(line, ',');
      REQUIRE(fields.size() == header.size());
      const auto &layer = json["layers"][row++];
      CHECK(layer["id"] == fields[1]);
      for (std::size_t c = 0; c < header.size(); ++c) {
        const auto &key = header[c];
        if (!layer.contains(key) || key == "id" || key == "kind")
          continue;
        const auto &v = layer[key];
        if (v.is_null())
          CHECK(fields[c].empty());
        else if (v.is_string())
          CHECK(v.get<std::string>() == fields[c]);
        else
          CHECK(v.dump() == fields[c]);
      }
      CHECK(layer["out_shape"][0].dump() == fields[11]);
      CHECK(layer["out_shape"][2].dump() == fields[13]);
    }
    CHECK(row == json["layers"].size());
  }
}

TEST_CASE("optimize") {
  TempDir dir;
  SUBCASE("truncate emits a document that round-trips") {
    auto path = dir.file("trunc.json");
    auto r = invoke({"optimize", "zoo:vgg16", "--pass", "truncate", "--emit", path});
    REQUIRE(r.code == cli::kOk);
    auto g = parse_architecture(slurp(path));
    CHECK(conv_index(g).size() == 7);
    CHECK(invoke({"analyze", path, "--format", "json"}).code == cli::kOk);
    // a second truncation has nothing left to do
    CHECK(invoke({"optimize", path, "--pass", "truncate"}).code == cli::kNoOp);
  }
  SUBCASE("stem removal reports the MAC increase") {
    auto r = invoke({"optimize", "zoo:resnet18", "--pass", "remove-stem-downsampling:2",
                     "--format", "json"});
    REQUIRE(r.code == cli::kOk);
    auto doc = nlohmann::json::parse(r.out);
    double delta = doc["delta"]["macs"].get<double>() / 1e9;
    CHECK(delta == doctest::Approx(0.52).epsilon(0.2));
  }
  SUBCASE("bad pass names are usage errors") {
    CHECK(invoke({"optimize", "zoo:vgg16", "--pass", "shrink"}).code == cli::kUsage);
    CHECK(invoke({"optimize", "zoo:vgg16", "--pass", "remove-stem-downsampling:x"}).code ==
          cli::kUsage);
  }
  SUBCASE("too many downsampling layers requested") {
    auto r = invoke({"optimize", "zoo:vgg16", "--pass", "remove-stem-downsampling:9"});
    CHECK(r.code == cli::kInvalid);
    CHECK_FALSE(r.err.empty());
  }
}

TEST_CASE("validate") {
  TempDir dir;
  auto cyclic = dir.file("cyclic.json", R"({"name": "cyc",
    "input": {"height": 8, "width": 8, "channels": 3},
    "layers": [{"id": "in", "kind": "input"}, {"id": "A", "kind": "add"},
               {"id": "B", "kind": "conv2d", "kernel": 3, "filters": 3},
               {"id": "out", "kind": "softmax"}],
    "edges": [["in", "A"], ["A", "B"], ["B", "A"], ["B", "out"]]})");
  auto r = invoke({"validate", cyclic});
  CHECK(r.code == cli::kInvalid);
  CHECK(r.err.find("cycle through {A,B}") != std::string::npos);

  auto broken = dir.file("broken.json", "{\"name\": ");
  r = invoke({"validate", broken});
  CHECK(r.code == cli::kInvalid);
  CHECK(r.err.find("line 1") != std::string::npos);

  CHECK(invoke({"validate", "zoo:mpnet18"}).code == cli::kOk);
}

TEST_CASE("zoo and compare") {
  TempDir dir;
  auto r = invoke({"zoo", "list"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("mpnet36") != std::string::npos);

  auto path = dir.file("r18.json");
  CHECK(invoke({"zoo", "emit", "resnet18-nostem", "--out", path}).code == cli::kOk);
  CHECK(parse_architecture(slurp(path)) ==
        zoo::build(zoo::Family::ResNet18, {32, 32, 3}, 10, {1, true, false}));
  CHECK(invoke({"zoo", "emit", "vgg16"}).out ==
        serialize_architecture(zoo::build(zoo::Family::VGG16)));

  r = invoke({"compare", "zoo:resnet18", path, "--format", "json"});
  REQUIRE(r.code == cli::kOk);
  CHECK(nlohmann::json::parse(r.out)["delta"]["macs"].get<std::int64_t>() > 0);
}

TEST_CASE("exit codes") {
  CHECK(invoke({"--bogus"}).code == cli::kUsage);
  CHECK(invoke({}).code == cli::kUsage);
  CHECK(invoke({"analyze"}).code == cli::kUsage);
  CHECK(invoke({"analyze", "zoo:vgg16", "--format", "xml"}).code == cli::kUsage);
  CHECK(invoke({"analyze", "/nonexistent/model.json"}).code == cli::kNoInput);
  CHECK(invoke({"analyze", "zoo:alexnet"}).code == cli::kNoInput);
  CHECK(invoke({"analyze", "zoo:vgg16-noskip"}).code == cli::kUsage);
  CHECK(invoke({"--help"}).code == cli::kOk);
  auto v = invoke({"--version"});
  CHECK(v.code == cli::kOk);
  CHECK(v.out.find("0.1.0") != std::string::npos);
}
