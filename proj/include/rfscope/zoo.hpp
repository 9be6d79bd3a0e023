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

#ifndef RFSCOPE_ZOO_HPP
#define RFSCOPE_ZOO_HPP

#include "rfscope/graph.hpp"

#include <optional>

namespace rfscope::zoo {

enum class Family { VGG11, VGG13, VGG16, VGG19, ResNet18, ResNet34, MPNet18, MPNet36 };

struct Options {
  std::int64_t dilation = 1;     // VGG only
  bool skips_enabled = true;     // ResNet only
  bool stem_downsampling = true; // ResNet only
};

struct ZooSpec {
  Family family = Family::VGG16;
  InputSpec input{32, 32, 3};
  std::int64_t num_classes = 10;
  Options options;
};

class ZooError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

std::string_view family_name(Family family);
std::optional<Family> family_from_name(std::string_view name);
const std::vector<Family> &all_families();

/// Deterministic builder. Throws ZooError for options that do not apply to
/// the requested family.
///
/// - VGG: 3x3 same-padded convs (bias) + ReLU, 2x2/2 max-pools; head is
///   GlobalAvgPool -> Dense -> Softmax.
/// - ResNet18/34: 7x7/2 stem conv + 3x3/2 max-pool, basic blocks with
///   BatchNorm, 1x1/2 projection convs on downsampling skips, Add merges.
///   Without skips the blocks are plain chains (no projections, no Add).
/// - MPNet18: four stages of [2x2/2 max-pool, 2 x ModuleA], where ModuleA is
///   a 3x3 conv path and a 7x7 conv path merged by Add; filters 64..512.
///   The 3x3 path is declared first. This is a reconstruction that reproduces
///   the reference borders (b_min conv11, b_max conv7 at 32x32).
/// - MPNet36: same stages with four ModuleB blocks each; ModuleB pairs one
///   3x3 conv with a chain of two 7x7 convs. Best guess only.
ArchGraph build(const ZooSpec &spec);

inline ArchGraph build(Family family, InputSpec input = {32, 32, 3},
                       std::int64_t num_classes = 10, Options options = {}) {
  return build(ZooSpec{family, input, num_classes, options});
}

} // namespace rfscope::zoo

#endif // RFSCOPE_ZOO_HPP
