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

#ifndef SUBVOC_VOCAB_H_
#define SUBVOC_VOCAB_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "subvoc/bpe.h"

namespace subvoc {

struct VocabEntry {
  std::string token;
  std::uint64_t count = 0;

  bool operator==(const VocabEntry&) const = default;
};

// Subword token -> occurrence count. Canonical order is descending count,
// then ascending token (byte order).
class Vocabulary {
 public:
  using Map = std::map<std::string, std::uint64_t, std::less<>>;

  Vocabulary() = default;
  // Throws FormatError if any count is zero.
  explicit Vocabulary(Map entries);

  const Map& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool contains(std::string_view token) const {
    return entries_.find(token) != entries_.end();
  }
  std::uint64_t count(std::string_view token) const;
  std::uint64_t total_count() const;

  std::vector<VocabEntry> ordered() const;

  bool operator==(const Vocabulary&) const = default;

 private:
  Map entries_;
};

Vocabulary build_vocab(const SegmentedStream& segmented);

// Union of tokens with added counts.
Vocabulary merge_vocab(const Vocabulary& a, const Vocabulary& b);

// Drops entries below `min_count`. Not used by any planned configuration.
Vocabulary filter_min_count(const Vocabulary& v, std::uint64_t min_count);

struct CoverageReport {
  double token_coverage = 1.0;
  double type_coverage = 1.0;
  std::uint64_t total_tokens = 0;
  std::uint64_t covered_tokens = 0;
  std::uint64_t total_types = 0;
  std::uint64_t covered_types = 0;
  // Uncovered distinct tokens, canonical order.
  std::vector<VocabEntry> oov_types;
};

// An empty stream is fully covered (both fractions 1.0, no OOV types).
CoverageReport coverage(const Vocabulary& v, const SegmentedStream& segmented);

nlohmann::json to_json(const CoverageReport& report);

// "token<TAB>count" per line in canonical order.
void write_vocab(std::ostream& out, const Vocabulary& v);
Vocabulary read_vocab(std::istream& in);
void save_vocab(const Vocabulary& v, const std::filesystem::path& path);
Vocabulary load_vocab(const std::filesystem::path& path);

}  // namespace subvoc

#endif  // SUBVOC_VOCAB_H_
