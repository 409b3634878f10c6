// Copyright 2026 The subvoc Authors.
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

#ifndef SUBVOC_TEXT_H_
#define SUBVOC_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers shared by every module. All functions taking text assume
// valid UTF-8 unless stated otherwise; use require_utf8() at input borders.
namespace subvoc::text {

bool is_valid_utf8(std::string_view s);

// Throws EncodingError naming `line` (1-based, 0 = unknown) on ill-formed input.
void require_utf8(std::string_view s, std::size_t line = 0);

std::u32string decode(std::string_view s);
std::string encode(std::u32string_view s);

// Same set as Python's str.isspace(), which is what the reference scorers use.
bool is_space(char32_t c);

// Splits on runs of whitespace; leading/trailing runs produce nothing.
std::vector<std::string> split_whitespace(std::string_view s);

// One element per code point.
std::vector<std::string> split_chars(std::string_view s);

// Full Unicode lowercase mapping, root locale.
std::string lowercase(std::string_view s);

// Canonical composition (NFC).
std::string nfc(std::string_view s);

}  // namespace subvoc::text

#endif  // SUBVOC_TEXT_H_
