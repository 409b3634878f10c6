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

#ifndef SUBVOC_BPE_H_
#define SUBVOC_BPE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "subvoc/corpus_io.h"

namespace subvoc {

// Appended to every word while learning; never emitted.
inline constexpr std::string_view kEndOfWord = "</w>";
// Suffix on every subword that does not close its word.
inline constexpr std::string_view kContinuationMarker = "@@";
// First line of a serialized model.
inline constexpr std::string_view kBpeHeader = "#subvoc bpe v1";

// Words are escaped before learning or segmentation so that the reserved
// texts above cannot occur inside them. Only '@' runs of length >= 2, the
// sequence "</w>", and '&' introducing one of the entity spellings are
// rewritten; everything else passes through unchanged.
std::string escape_word(std::string_view word);
std::string unescape_word(std::string_view escaped);

struct MergeRule {
  std::string left;
  std::string right;
  std::uint32_t rank = 0;

  bool operator==(const MergeRule&) const = default;
};

// An ordered list of merge rules. Ranks are the list positions.
class BpeModel {
 public:
  BpeModel() = default;
  // Throws FormatError on an empty/whitespace-bearing symbol, a rule that
  // would produce the bare end-of-word symbol, or a repeated pair.
  explicit BpeModel(std::vector<std::pair<std::string, std::string>> merges);

  std::span<const MergeRule> merges() const { return merges_; }
  std::size_t size() const { return merges_.size(); }
  bool empty() const { return merges_.empty(); }

  std::optional<std::uint32_t> rank(std::string_view left,
                                    std::string_view right) const;

  // The model made of the first `k` rules.
  BpeModel prefix(std::size_t k) const;

  bool operator==(const BpeModel& other) const {
    return merges_ == other.merges_;
  }

 private:
  std::vector<MergeRule> merges_;
  std::unordered_map<std::string, std::uint32_t> ranks_;
};

// Escaped word -> occurrence count.
using WordCounts = std::map<std::string, std::uint64_t>;

WordCounts count_words(const TokenStream& tokens);

// Greedy learning: the most frequent adjacent symbol pair becomes the next
// rule; ties go to the lexicographically smallest (left, right). Stops after
// `num_merges` rules or when no pair occurs at least twice.
// Throws EmptyInput when the stream holds no tokens.
BpeModel learn_bpe(const TokenStream& tokens, std::size_t num_merges);
BpeModel learn_bpe(const WordCounts& words, std::size_t num_merges);

// Segments one (unescaped) word. Non-final subwords carry the marker.
std::vector<std::string> apply_bpe_word(const BpeModel& model,
                                        std::string_view word);

// Subword sequences per sentence, marker convention as above.
struct SegmentedStream {
  std::vector<Sentence> sentences;

  std::size_t token_count() const;
  bool operator==(const SegmentedStream&) const = default;
};

// Memoizing wrapper around apply_bpe_word. Not thread-safe; use one per
// thread.
class Segmenter {
 public:
  explicit Segmenter(const BpeModel& model) : model_(&model) {}

  const std::vector<std::string>& segment_word(const std::string& word);
  Sentence segment(const Sentence& words);

 private:
  const BpeModel* model_;
  std::unordered_map<std::string, std::vector<std::string>> cache_;
};

// Sentences are segmented in parallel chunks when `threads` > 1; the result
// does not depend on the thread count.
SegmentedStream apply_bpe_corpus(const BpeModel& model,
                                 const TokenStream& tokens,
                                 unsigned threads = 1);

// Joins marked subwords back into (unescaped) words. Throws DanglingMarker
// when the last subword still carries the marker.
Sentence desegment(std::span<const std::string> subwords);

void write_bpe(std::ostream& out, const BpeModel& model);
BpeModel read_bpe(std::istream& in);
void save_bpe(const BpeModel& model, const std::filesystem::path& path);
BpeModel load_bpe(const std::filesystem::path& path);

}  // namespace subvoc

#endif  // SUBVOC_BPE_H_
