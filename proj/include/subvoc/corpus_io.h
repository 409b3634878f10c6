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

#ifndef SUBVOC_CORPUS_IO_H_
#define SUBVOC_CORPUS_IO_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace subvoc {

enum class Side { kSource, kTarget };

inline constexpr Side kBothSides[] = {Side::kSource, Side::kTarget};

std::string_view side_name(Side side);

// Line-aligned source/target text. Immutable once constructed; the
// constructor enforces equal side lengths and the absence of line breaks.
class ParallelCorpus {
 public:
  ParallelCorpus() = default;
  ParallelCorpus(std::string name, std::vector<std::string> source_lines,
                 std::vector<std::string> target_lines);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& source_lines() const { return source_; }
  const std::vector<std::string>& target_lines() const { return target_; }
  const std::vector<std::string>& lines(Side side) const {
    return side == Side::kSource ? source_ : target_;
  }
  std::size_t size() const { return source_.size(); }
  bool empty() const { return source_.empty(); }

 private:
  std::string name_;
  std::vector<std::string> source_;
  std::vector<std::string> target_;
};

struct LoadOptions {
  // Off by default; raw bytes are kept as-is otherwise.
  bool nfc = false;
};

// Reads one sentence per line. A single trailing newline is tolerated, a
// carriage return is rejected, and ill-formed UTF-8 is a hard error.
std::vector<std::string> read_lines(const std::filesystem::path& path,
                                    const LoadOptions& options = {});
std::vector<std::string> read_lines(std::istream& in,
                                    const LoadOptions& options = {});

// Writes every line followed by '\n'.
void write_lines(const std::filesystem::path& path,
                 std::span<const std::string> lines);
void write_lines(std::ostream& out, std::span<const std::string> lines);

ParallelCorpus load_corpus(const std::filesystem::path& source_path,
                           const std::filesystem::path& target_path,
                           std::string name, const LoadOptions& options = {});

ParallelCorpus concat_corpora(const ParallelCorpus& a, const ParallelCorpus& b);

// Blank and duplicate lines are kept (they preserve alignment); this only
// counts them so callers can warn.
struct CorpusStats {
  std::size_t pairs = 0;
  std::size_t empty_source = 0;
  std::size_t empty_target = 0;
  std::size_t duplicate_pairs = 0;
};

CorpusStats validate_corpus(const ParallelCorpus& corpus);

using Sentence = std::vector<std::string>;

// Whitespace-delimited words, one Sentence per input line.
struct TokenStream {
  std::vector<Sentence> sentences;

  std::size_t token_count() const;
  bool operator==(const TokenStream&) const = default;
};

TokenStream whitespace_tokenize(const ParallelCorpus& corpus, Side side);
TokenStream tokenize_lines(std::span<const std::string> lines);

}  // namespace subvoc

#endif  // SUBVOC_CORPUS_IO_H_
