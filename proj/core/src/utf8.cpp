// Copyright 2026 The lrnmt Authors.
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

#include "lrnmt/utf8.hpp"

namespace lrnmt::utf8 {

namespace {
constexpr char32_t kReplacement = 0xFFFD;

inline bool is_cont(unsigned char b) { return (b & 0xC0) == 0x80; }
}  // namespace

char32_t decode_next(std::string_view s, size_t& i) {
  const unsigned char b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0 && i + 1 < s.size() &&
      is_cont(static_cast<unsigned char>(s[i + 1]))) {
    char32_t cp = (b0 & 0x1F) << 6 |
                  (static_cast<unsigned char>(s[i + 1]) & 0x3F);
    i += 2;
    return cp < 0x80 ? kReplacement : cp;
  }
  if ((b0 & 0xF0) == 0xE0 && i + 2 < s.size() &&
      is_cont(static_cast<unsigned char>(s[i + 1])) &&
      is_cont(static_cast<unsigned char>(s[i + 2]))) {
    char32_t cp = (b0 & 0x0F) << 12 |
                  (static_cast<unsigned char>(s[i + 1]) & 0x3F) << 6 |
                  (static_cast<unsigned char>(s[i + 2]) & 0x3F);
    i += 3;
    return cp < 0x800 ? kReplacement : cp;
  }
  if ((b0 & 0xF8) == 0xF0 && i + 3 < s.size() &&
      is_cont(static_cast<unsigned char>(s[i + 1])) &&
      is_cont(static_cast<unsigned char>(s[i + 2])) &&
      is_cont(static_cast<unsigned char>(s[i + 3]))) {
    char32_t cp = (b0 & 0x07) << 18 |
                  (static_cast<unsigned char>(s[i + 1]) & 0x3F) << 12 |
                  (static_cast<unsigned char>(s[i + 2]) & 0x3F) << 6 |
                  (static_cast<unsigned char>(s[i + 3]) & 0x3F);
    i += 4;
    return (cp < 0x10000 || cp > 0x10FFFF) ? kReplacement : cp;
  }
  ++i;
  return kReplacement;
}

std::vector<char32_t> to_codepoints(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) out.push_back(decode_next(s, i));
  return out;
}

void append_codepoint(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string from_codepoints(const std::vector<char32_t>& cps) {
  std::string out;
  out.reserve(cps.size() * 3);
  for (char32_t cp : cps) append_codepoint(out, cp);
  return out;
}

size_t length(std::string_view s) {
  size_t n = 0, i = 0;
  while (i < s.size()) {
    decode_next(s, i);
    ++n;
  }
  return n;
}

}  // namespace lrnmt::utf8
