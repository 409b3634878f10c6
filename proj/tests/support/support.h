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

#ifndef SUBVOC_TESTS_SUPPORT_SUPPORT_H_
#define SUBVOC_TESTS_SUPPORT_SUPPORT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "subvoc/bpe.h"
#include "subvoc/metrics.h"
#include "subvoc/significance.h"

namespace subvoc::testing {

// ---- scratch files ----

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

void write_file(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

// ---- synthetic text ----

struct SyntheticOptions {
  std::size_t vocabulary = 20000;  // distinct word types
  std::size_t min_words = 10;
  std::size_t max_words = 30;
  double zipf = 1.05;
};

// Pseudo-words built from syllables, drawn with Zipfian frequencies.
// Fully determined by `seed`.
std::vector<std::string> synthetic_lines(std::size_t lines, std::uint64_t seed,
                                         const SyntheticOptions& options = {});

// Random word table: up to `max_words` words over a small alphabet.
WordCounts random_word_table(std::mt19937_64& rng, std::size_t max_words);

// ---- brute-force references ----

// Learns merges by recounting every adjacent pair after each merge.
std::vector<std::pair<std::string, std::string>> brute_force_bpe(
    const WordCounts& words, std::size_t num_merges);

// Applies each rule in rank order to the whole word.
std::vector<std::string> rank_order_apply(const BpeModel& model,
                                          std::string_view word);

// Minimum of (shifts + edit distance) over every sequence reachable by
// arbitrary block moves. Exponential; meant for six words or fewer.
std::size_t exhaustive_ter_edits(const std::vector<std::string>& hyp,
                                 const std::vector<std::string>& ref);

// chrF from direct n-gram counting on code points, whitespace removed.
double direct_chrf(std::string_view hyp, std::string_view ref, int order = 6,
                   double beta = 2.0);

// Paired bootstrap written without the library's sampler: 32-bit Mersenne
// twister and std::uniform_int_distribution. Returns the sign-fraction
// p-value for BLEU or chrF computed from the same per-segment statistics.
double independent_bootstrap_p(const std::vector<SegmentStats>& a,
                               const std::vector<SegmentStats>& b, Metric metric,
                               std::size_t iterations, std::size_t sample_size,
                               std::uint32_t seed);

// Per-segment statistics for hypothesis/reference lines.
std::vector<SegmentStats> segment_stats(const std::vector<EvalPair>& pairs);

// A pair of systems where A is much better than B on 95% of segments.
void planted_margin_systems(std::size_t segments, std::uint64_t seed,
                            std::vector<EvalPair>* a, std::vector<EvalPair>* b);

// ---- published results ----

// Scores for C1..C11 under two models and two test sets (12 columns).
RankInput published_rank_input();
extern const char* const kPublishedOrder[11];

}  // namespace subvoc::testing

#endif  // SUBVOC_TESTS_SUPPORT_SUPPORT_H_
