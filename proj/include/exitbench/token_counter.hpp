// Copyright 2026 The exitbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

namespace exitbench {

// Byte ranges [first, second) of the tokens the default counter sees.
using TokenSpans = std::vector<std::pair<std::size_t, std::size_t>>;

// Default deterministic approximation of a subword tokenizer:
//  - `<|im_start|>` and `<|im_end|>` are one token each;
//  - a run of word characters (ASCII alphanumerics, `_`, and non-ASCII code
//    points outside the Unicode punctuation blocks) is one token;
//  - every other non-space character is its own token;
//  - whitespace separates tokens and is not counted.
TokenSpans default_token_spans(std::string_view text);

std::size_t default_token_count(std::string_view text);

}  // namespace exitbench
