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

#include "subvoc/vocab.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <unordered_map>

#include "subvoc/error.h"
#include "subvoc/text.h"

namespace subvoc {

namespace {

bool canonical_less(const VocabEntry& a, const VocabEntry& b) {
  if (a.count != b.count) return a.count > b.count;
  return a.token < b.token;
}

}  // namespace

Vocabulary::Vocabulary(Map entries) : entries_(std::move(entries)) {
  for (const auto& [token, count] : entries_) {
    if (count == 0) throw FormatError("zero count for token '" + token + "'", 0);
  }
}

std::uint64_t Vocabulary::count(std::string_view token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? 0 : it->second;
}

std::uint64_t Vocabulary::total_count() const {
  std::uint64_t n = 0;
  for (const auto& [token, count] : entries_) n += count;
  return n;
}

std::vector<VocabEntry> Vocabulary::ordered() const {
  std::vector<VocabEntry> out;
  out.reserve(entries_.size());
  for (const auto& [token, count] : entries_) out.push_back({token, count});
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

Vocabulary build_vocab(const SegmentedStream& segmented) {
  std::unordered_map<std::string_view, std::uint64_t> counts;
  for (const auto& sentence : segmented.sentences) {
    for (const auto& token : sentence) ++counts[token];
  }
  Vocabulary::Map entries;
  for (const auto& [token, count] : counts) entries.emplace(token, count);
  return Vocabulary(std::move(entries));
}

Vocabulary merge_vocab(const Vocabulary& a, const Vocabulary& b) {
  Vocabulary::Map entries = a.entries();
  for (const auto& [token, count] : b.entries()) entries[token] += count;
  return Vocabulary(std::move(entries));
}

Vocabulary filter_min_count(const Vocabulary& v, std::uint64_t min_count) {
  Vocabulary::Map entries;
  for (const auto& [token, count] : v.entries()) {
    if (count >= min_count) entries.emplace(token, count);
  }
  return Vocabulary(std::move(entries));
}

CoverageReport coverage(const Vocabulary& v, const SegmentedStream& segmented) {
  std::unordered_map<std::string_view, std::uint64_t> counts;
  CoverageReport report;
  for (const auto& sentence : segmented.sentences) {
    for (const auto& token : sentence) ++counts[token];
  }
  for (const auto& [token, count] : counts) {
    report.total_tokens += count;
    ++report.total_types;
    if (v.contains(token)) {
      report.covered_tokens += count;
      ++report.covered_types;
    } else {
      report.oov_types.push_back({std::string(token), count});
    }
  }
  std::sort(report.oov_types.begin(), report.oov_types.end(), canonical_less);
  if (report.total_tokens > 0) {
    report.token_coverage = static_cast<double>(report.covered_tokens) /
                            static_cast<double>(report.total_tokens);
    report.type_coverage = static_cast<double>(report.covered_types) /
                           static_cast<double>(report.total_types);
  }
  return report;
}

nlohmann::json to_json(const CoverageReport& report) {
  nlohmann::json oov = nlohmann::json::array();
  for (const auto& e : report.oov_types) {
    oov.push_back({{"token", e.token}, {"count", e.count}});
  }
  return {
      {"token_coverage", report.token_coverage},
      {"type_coverage", report.type_coverage},
      {"total_tokens", report.total_tokens},
      {"covered_tokens", report.covered_tokens},
      {"total_types", report.total_types},
      {"covered_types", report.covered_types},
      {"oov_types", std::move(oov)},
  };
}

void write_vocab(std::ostream& out, const Vocabulary& v) {
  for (const auto& e : v.ordered()) out << e.token << '\t' << e.count << '\n';
  if (!out) throw IoFailure("write failed");
}

Vocabulary read_vocab(std::istream& in) {
  Vocabulary::Map entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 ||
        line.find('\t', tab + 1) != std::string::npos) {
      throw FormatError("expected 'token<TAB>count'", line_no);
    }
    std::string token = line.substr(0, tab);
    if (!text::is_valid_utf8(token) ||
        text::split_whitespace(token) != std::vector<std::string>{token}) {
      throw FormatError("token must be non-empty UTF-8 without whitespace",
                        line_no);
    }
    const char* first = line.data() + tab + 1;
    const char* last = line.data() + line.size();
    std::uint64_t count = 0;
    auto [ptr, ec] = std::from_chars(first, last, count);
    if (ec != std::errc() || ptr != last || first == last || count == 0) {
      throw FormatError("count must be a positive integer", line_no);
    }
    if (!entries.emplace(std::move(token), count).second) {
      throw DuplicateToken(line.substr(0, tab), line_no);
    }
  }
  if (in.bad()) throw IoFailure("read failed");
  return Vocabulary(std::move(entries));
}

void save_vocab(const Vocabulary& v, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open '" + path.string() + "' for writing");
  write_vocab(out, v);
  out.close();
  if (!out) throw IoFailure("write failed for '" + path.string() + "'");
}

Vocabulary load_vocab(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open '" + path.string() + "' for reading");
  try {
    return read_vocab(in);
  } catch (const FormatError& e) {
    throw e.prefixed(path.string() + ": ");
  }
}

}  // namespace subvoc
