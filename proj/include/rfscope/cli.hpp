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

#ifndef RFSCOPE_CLI_HPP
#define RFSCOPE_CLI_HPP

#include "rfscope/graph.hpp"

#include <iosfwd>
#include <optional>

namespace rfscope::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kInvalid = 2,  // validation / analysis failure
  kNoOp = 3,     // optimize pass changed nothing
  kUsage = 64,   // bad command line
  kNoInput = 66, // unreadable/unwritable file or unknown zoo model
};

class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Resolves "zoo:NAME[-noskip][-nostem][-dilN]" or a document path. An input
/// size override replaces height and width. Throws InputError for missing
/// files and unknown zoo names, DocumentError for bad documents.
ArchGraph load_architecture(const std::string &ref,
                            std::optional<std::pair<std::int64_t, std::int64_t>> size,
                            std::int64_t num_classes = 10);

/// Entry point; args excludes the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace rfscope::cli

#endif // RFSCOPE_CLI_HPP
