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

#include "rfscope/zoo.hpp"

#include <array>

namespace rfscope::zoo {

namespace {

constexpr std::int64_t kPool = 0; // marker in VGG configurations

const std::vector<std::int64_t> &vgg_config(Family family) {
  static const std::vector<std::int64_t> vgg11{
      64, kPool, 128, kPool, 256, 256, kPool, 512, 512, kPool, 512, 512, kPool};
  static const std::vector<std::int64_t> vgg13{
      64, 64, kPool, 128, 128, kPool, 256, 256, kPool,
      512, 512, kPool, 512, 512, kPool};
  static const std::vector<std::int64_t> vgg16{
      64, 64, kPool, 128, 128, kPool, 256, 256, 256, kPool,
      512, 512, 512, kPool, 512, 512, 512, kPool};
  static const std::vector<std::int64_t> vgg19{
      64, 64, kPool, 128, 128, kPool, 256, 256, 256, 256, kPool,
      512, 512, 512, 512, kPool, 512, 512, 512, 512, kPool};
  switch (family) {
  case Family::VGG11: return vgg11;
  case Family::VGG13: return vgg13;
  case Family::VGG16: return vgg16;
  default: return vgg19;
  }
}

bool is_vgg(Family f) {
  return f == Family::VGG11 || f == Family::VGG13 || f == Family::VGG16 ||
         f == Family::VGG19;
}

bool is_resnet(Family f) { return f == Family::ResNet18 || f == Family::ResNet34; }

std::string head(GraphBuilder &b, const std::string &from, std::int64_t classes) {
  auto gap = b.add("gap", GlobalAvgPool{}, from);
  auto fc = b.add("fc", Dense{classes, true}, gap);
  return b.add("softmax", Softmax{}, fc);
}

ArchGraph build_vgg(const ZooSpec &spec) {
  std::string name(family_name(spec.family));
  if (spec.options.dilation != 1)
    name += "-dil" + std::to_string(spec.options.dilation);
  GraphBuilder b(name, spec.input);
  std::string prev = b.add("input", Input{});
  int conv = 0, pool = 0;
  for (auto filters : vgg_config(spec.family)) {
    if (filters == kPool) {
      prev = b.add("pool" + std::to_string(++pool),
                   Pool{PoolMode::Max, 2, 2, 0}, prev);
      continue;
    }
    auto n = std::to_string(++conv);
    prev = b.add("conv" + n,
                 Conv2d{3, 1, spec.options.dilation, Padding::same(), filters, true},
                 prev);
    prev = b.add("relu" + n, Activation{"relu"}, prev);
  }
  head(b, prev, spec.num_classes);
  return b.build();
}

ArchGraph build_resnet(const ZooSpec &spec) {
  const bool deep = spec.family == Family::ResNet34;
  const std::array<int, 4> blocks = deep ? std::array<int, 4>{3, 4, 6, 3}
                                         : std::array<int, 4>{2, 2, 2, 2};
  const auto &opt = spec.options;
  std::string name(family_name(spec.family));
  if (!opt.skips_enabled)
    name += "-noskip";
  if (!opt.stem_downsampling)
    name += "-nostem";

  GraphBuilder b(name, spec.input);
  std::string prev = b.add("input", Input{});
  prev = b.add("stem_conv",
               Conv2d{7, opt.stem_downsampling ? 2 : 1, 1, Padding::explicitly(3),
                      64, false},
               prev);
  prev = b.add("stem_bn", BatchNorm{}, prev);
  prev = b.add("stem_relu", Activation{"relu"}, prev);
  if (opt.stem_downsampling)
    prev = b.add("stem_pool", Pool{PoolMode::Max, 3, 2, 1}, prev);

  std::int64_t channels = 64;
  for (int stage = 0; stage < 4; ++stage) {
    const std::int64_t filters = 64LL << stage;
    for (int block = 0; block < blocks[stage]; ++block) {
      const std::int64_t stride = (stage > 0 && block == 0) ? 2 : 1;
      const std::string p = "layer" + std::to_string(stage + 1) + "_" +
                            std::to_string(block) + "_";
      const std::string block_in = prev;
      auto x = b.add(p + "conv1",
                     Conv2d{3, stride, 1, Padding::explicitly(1), filters, false},
                     block_in);
      x = b.add(p + "bn1", BatchNorm{}, x);
      x = b.add(p + "relu1", Activation{"relu"}, x);
      x = b.add(p + "conv2",
                Conv2d{3, 1, 1, Padding::explicitly(1), filters, false}, x);
      x = b.add(p + "bn2", BatchNorm{}, x);
      if (opt.skips_enabled) {
        std::string skip = block_in;
        if (stride != 1 || channels != filters) {
          skip = b.add(p + "proj",
                       Conv2d{1, stride, 1, Padding::explicitly(0), filters, false},
                       block_in);
          skip = b.add(p + "proj_bn", BatchNorm{}, skip);
        }
        auto add = b.add(p + "add", Add{}, x);
        b.connect(skip, add);
        x = add;
      }
      prev = b.add(p + "relu2", Activation{"relu"}, x);
      channels = filters;
    }
  }
  head(b, prev, spec.num_classes);
  return b.build();
}

std::string conv_bn_relu(GraphBuilder &b, const std::string &id,
                         std::int64_t kernel, std::int64_t filters,
                         const std::string &from) {
  auto x = b.add(id, Conv2d{kernel, 1, 1, Padding::same(), filters, false}, from);
  x = b.add(id + "_bn", BatchNorm{}, x);
  return b.add(id + "_relu", Activation{"relu"}, x);
}

ArchGraph build_mpnet(const ZooSpec &spec) {
  const bool deep = spec.family == Family::MPNet36;
  GraphBuilder b(std::string(family_name(spec.family)), spec.input);
  std::string prev = b.add("input", Input{});
  for (int stage = 0; stage < 4; ++stage) {
    const std::int64_t filters = 64LL << stage;
    const std::string s = "s" + std::to_string(stage + 1) + "_";
    prev = b.add(s + "pool", Pool{PoolMode::Max, 2, 2, 0}, prev);
    const int modules = deep ? 4 : 2;
    for (int m = 0; m < modules; ++m) {
      const std::string p = s + "m" + std::to_string(m + 1) + "_";
      std::string short_path, long_path;
      if (!deep) {
        short_path = conv_bn_relu(b, p + "conv3", 3, filters, prev);
        long_path = conv_bn_relu(b, p + "conv7", 7, filters, prev);
      } else {
        short_path = conv_bn_relu(b, p + "conv3", 3, filters, prev);
        long_path = conv_bn_relu(b, p + "conv7a", 7, filters, prev);
        long_path = conv_bn_relu(b, p + "conv7b", 7, filters, long_path);
      }
      auto add = b.add(p + "add", Add{}, short_path);
      b.connect(long_path, add);
      prev = add;
    }
  }
  head(b, prev, spec.num_classes);
  return b.build();
}

} // namespace

std::string_view family_name(Family family) {
  switch (family) {
  case Family::VGG11: return "vgg11";
  case Family::VGG13: return "vgg13";
  case Family::VGG16: return "vgg16";
  case Family::VGG19: return "vgg19";
  case Family::ResNet18: return "resnet18";
  case Family::ResNet34: return "resnet34";
  case Family::MPNet18: return "mpnet18";
  case Family::MPNet36: return "mpnet36";
  }
  return "unknown";
}

const std::vector<Family> &all_families() {
  static const std::vector<Family> families{
      Family::VGG11,    Family::VGG13,    Family::VGG16,   Family::VGG19,
      Family::ResNet18, Family::ResNet34, Family::MPNet18, Family::MPNet36};
  return families;
}

std::optional<Family> family_from_name(std::string_view name) {
  for (auto f : all_families())
    if (family_name(f) == name)
      return f;
  return std::nullopt;
}

ArchGraph build(const ZooSpec &spec) {
  const auto &opt = spec.options;
  if (opt.dilation < 1)
    throw ZooError("dilation must be >= 1");
  if (opt.dilation != 1 && !is_vgg(spec.family))
    throw ZooError("dilation option applies to VGG models only");
  if (!opt.skips_enabled && !is_resnet(spec.family))
    throw ZooError("skips_enabled option applies to ResNet models only");
  if (!opt.stem_downsampling && !is_resnet(spec.family))
    throw ZooError("stem_downsampling option applies to ResNet models only");
  if (spec.num_classes < 1)
    throw ZooError("num_classes must be >= 1");

  if (is_vgg(spec.family))
    return build_vgg(spec);
  if (is_resnet(spec.family))
    return build_resnet(spec);
  return build_mpnet(spec);
}

} // namespace rfscope::zoo
