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

#ifndef LRNMT_UTF8_HPP_
#define LRNMT_UTF8_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace lrnmt::utf8 {

// Decodes the code point starting at s[i]; advances i past it. Malformed
// bytes decode as U+FFFD and consume one byte, so iteration always makes
// progress.
char32_t decode_next(std::string_view s, size_t& i);

std::vector<char32_t> to_codepoints(std::string_view s);

void append_codepoint(std::string& out, char32_t cp);

std::string from_codepoints(const std::vector<char32_t>& cps);

// Unicode scalar count, counting each malformed byte as one replacement.
size_t length(std::string_view s);

}  // namespace lrnmt::utf8

#endif  // LRNMT_UTF8_HPP_
