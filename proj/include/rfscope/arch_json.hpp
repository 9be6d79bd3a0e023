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

#ifndef RFSCOPE_ARCH_JSON_HPP
#define RFSCOPE_ARCH_JSON_HPP

#include "rfscope/graph.hpp"

namespace rfscope {

/// Failure while reading an architecture document.
class DocumentError : public std::runtime_error {
public:
  enum class Kind { Syntax, Schema, Semantic };

  DocumentError(Kind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

/// Parses and validates an architecture document. declaration_index follows
/// the position in "layers". Unknown keys are rejected.
ArchGraph parse_architecture(std::string_view document);

/// Canonical document: every kind-specific key written explicitly.
std::string serialize_architecture(const ArchGraph &graph);

} // namespace rfscope

#endif // RFSCOPE_ARCH_JSON_HPP
