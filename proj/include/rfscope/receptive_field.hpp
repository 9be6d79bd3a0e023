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

#ifndef RFSCOPE_RECEPTIVE_FIELD_HPP
#define RFSCOPE_RECEPTIVE_FIELD_HPP

#include "rfscope/graph.hpp"

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace rfscope {

/// Receptive-field extent in input pixels, or "global" once a layer has
/// pooled over the whole map (GlobalAvgPool, Dense). Global compares greater
/// than every finite size.
class RFSize {
public:
  constexpr RFSize() = default;
  constexpr explicit RFSize(std::int64_t pixels) : pixels_(pixels) {}

  static constexpr RFSize global() {
    RFSize s;
    s.global_ = true;
    return s;
  }

  constexpr bool is_global() const { return global_; }
  /// Throws GraphError on a global size.
  std::int64_t pixels() const;

  /// True iff this extent covers more than `resolution` pixels.
  constexpr bool exceeds(std::int64_t resolution) const {
    return global_ || pixels_ > resolution;
  }

  std::string to_string() const;

  constexpr std::strong_ordering operator<=>(const RFSize &o) const {
    if (global_ || o.global_)
      return global_ <=> o.global_;
    return pixels_ <=> o.pixels_;
  }
  constexpr bool operator==(const RFSize &o) const {
    return (*this <=> o) == std::strong_ordering::equal;
  }

private:
  std::int64_t pixels_ = 1;
  bool global_ = false;
};

/// Path state: receptive field r, jump j (product of strides so far), and
/// the receptive field at the output of the last conv on the path (1 before
/// the first conv). The border rule compares the latter against the input
/// resolution.
struct RFState {
  RFSize r{1};
  std::int64_t j = 1;
  RFSize conv_r{1};

  bool operator==(const RFState &) const = default;
};

/// dilation * (kernel - 1) + 1
std::int64_t effective_kernel(std::int64_t kernel, std::int64_t dilation);

/// One step of the receptive-field recurrence: conv and pool grow r by
/// (k_eff - 1) * j and multiply j by the stride; GlobalAvgPool and Dense make
/// the state global; every other kind is the identity.
RFState layer_rf_transfer(const RFState &state, const LayerKind &kind);

/// Fold of layer_rf_transfer from the initial state; element t is the state
/// after layers[t].
std::vector<RFState> propagate_sequential(std::span<const LayerKind> layers);

/// Pareto frontier of path states: the minimal and the maximal elements under
/// componentwise order on (r, j, conv_r). Every transfer is monotone in each
/// coordinate, so min/max of any downstream quantity is attained on a
/// frontier member.
struct Frontier {
  std::vector<RFState> minimal;
  std::vector<RFState> maximal;

  std::size_t size() const { return minimal.size() + maximal.size(); }
};

struct RFAnnotation {
  std::string node_id;
  Frontier in_frontier;
  Frontier out_frontier;

  RFSize r_in_min, r_in_max;
  RFSize r_out_min, r_out_max;
  std::int64_t j_in_min = 1, j_in_max = 1;
  /// Extremes of conv_r over incoming paths (the border-rule quantity).
  RFSize conv_r_in_min, conv_r_in_max;
};

struct PropagationOptions {
  /// Upper bound on frontier members per node; exceeding it is an error.
  std::size_t frontier_cap = 4096;
};

class FrontierOverflow : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using RFAnnotations = std::unordered_map<std::string, RFAnnotation>;

/// Exact per-node extremes over all Input-to-node paths.
RFAnnotations propagate_dag(const ArchGraph &graph,
                            const PropagationOptions &options = {});

} // namespace rfscope

#endif // RFSCOPE_RECEPTIVE_FIELD_HPP
