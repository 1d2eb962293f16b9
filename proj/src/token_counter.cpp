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

#include "exitbench/token_counter.hpp"

#include <cctype>
#include <cstdint>

namespace exitbench {
namespace {

constexpr std::string_view kStartMarker = "<|im_start|>";
constexpr std::string_view kEndMarker = "<|im_end|>";

// Decodes the code point at `i`; returns its byte length (1 on bad input).
std::size_t decode(std::string_view s, std::size_t i, std::uint32_t& cp) {
  const auto c = static_cast<unsigned char>(s[i]);
  std::size_t len = 1;
  if (c >= 0xF0) {
    len = 4;
    cp = c & 0x07;
  } else if (c >= 0xE0) {
    len = 3;
    cp = c & 0x0F;
  } else if (c >= 0xC0) {
    len = 2;
    cp = c & 0x1F;
  } else {
    cp = c;
    return 1;
  }
  if (i + len > s.size()) {
    cp = 0xFFFD;
    return 1;
  }
  for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
  return len;
}

enum class CharClass { kSpace, kWord, kPunct };

CharClass classify(std::uint32_t cp) {
  if (cp < 0x80) {
    const auto c = static_cast<unsigned char>(cp);
    if (std::isspace(c)) return CharClass::kSpace;
    if (std::isalnum(c) || c == '_') return CharClass::kWord;
    return CharClass::kPunct;
  }
  if (cp == 0x00A0 || cp == 0x3000 || (cp >= 0x2000 && cp <= 0x200A)) return CharClass::kSpace;
  if ((cp >= 0x2000 && cp <= 0x206F) || (cp >= 0x3000 && cp <= 0x303F)) return CharClass::kPunct;
  return CharClass::kWord;
}

}  // namespace

TokenSpans default_token_spans(std::string_view text) {
  TokenSpans spans;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text.substr(i, kStartMarker.size()) == kStartMarker) {
      spans.emplace_back(i, i + kStartMarker.size());
      i += kStartMarker.size();
      continue;
    }
    if (text.substr(i, kEndMarker.size()) == kEndMarker) {
      spans.emplace_back(i, i + kEndMarker.size());
      i += kEndMarker.size();
      continue;
    }
    std::uint32_t cp = 0;
    const auto len = decode(text, i, cp);
    const auto cls = classify(cp);
    if (cls == CharClass::kSpace) {
      i += len;
      continue;
    }
    if (cls == CharClass::kPunct) {
      spans.emplace_back(i, i + len);
      i += len;
      continue;
    }
    const std::size_t start = i;
    i += len;
    while (i < text.size()) {
      std::uint32_t next = 0;
      const auto nlen = decode(text, i, next);
      if (classify(next) != CharClass::kWord) break;
      i += nlen;
    }
    spans.emplace_back(start, i);
  }
  return spans;
}

std::size_t default_token_count(std::string_view text) { return default_token_spans(text).size(); }

}  // namespace exitbench
