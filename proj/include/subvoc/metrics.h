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

#ifndef SUBVOC_METRICS_H_
#define SUBVOC_METRICS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace subvoc {

enum class Metric { kBleu, kTer, kChrf };

std::string_view metric_name(Metric metric);  // "bleu", "ter", "chrf2"
Metric parse_metric(std::string_view name);   // throws std::invalid_argument
inline bool higher_is_better(Metric metric) { return metric != Metric::kTer; }

struct EvalPair {
  std::string hypothesis;
  std::string reference;
};

inline constexpr int kBleuOrder = 4;

// Sufficient statistics for BLEU; add them up to get corpus statistics.
struct NGramStats {
  std::array<std::uint64_t, kBleuOrder> matches{};
  std::array<std::uint64_t, kBleuOrder> totals{};
  std::uint64_t hyp_len = 0;
  std::uint64_t ref_len = 0;

  NGramStats& operator+=(const NGramStats& o);
  bool operator==(const NGramStats&) const = default;
};

struct TerStats {
  std::uint64_t edits = 0;
  std::uint64_t ref_words = 0;
  std::uint64_t shifts = 0;

  TerStats& operator+=(const TerStats& o);
  bool operator==(const TerStats&) const = default;
};

// Per-order character n-gram counts; index 0 holds unigrams.
struct ChrfStats {
  std::vector<std::uint64_t> hyp;
  std::vector<std::uint64_t> ref;
  std::vector<std::uint64_t> match;

  ChrfStats& operator+=(const ChrfStats& o);
  bool operator==(const ChrfStats&) const = default;
};

struct SegmentStats {
  NGramStats bleu;
  TerStats ter;
  ChrfStats chrf;

  bool operator==(const SegmentStats&) const = default;
};

struct MetricOptions {
  bool lowercase = true;
  int char_order = 6;
  double beta = 2.0;
  // Upper bound on greedy shift iterations per segment.
  int ter_max_shifts = 10;

  bool operator==(const MetricOptions&) const = default;
};

// Punctuation-splitting tokenizer of the "13a" convention (mteval-v13a as
// reimplemented by sacreBLEU): unescapes &quot; &amp; &lt; &gt;, pads
// punctuation/symbols with spaces, splits '.' and ',' unless adjacent to a
// digit, splits '-' after a digit, then splits on whitespace.
std::vector<std::string> tokenize_13a(std::string_view line);

// Lowercases (optionally) and tokenizes one line for BLEU/TER.
std::vector<std::string> metric_tokens(std::string_view line, bool lowercase);

// ---- BLEU ----

NGramStats bleu_segment(std::span<const std::string> hyp,
                        std::span<const std::string> ref);

// Corpus BLEU in [0,100] from summed statistics: brevity penalty times the
// geometric mean of the clipped precisions, no smoothing. Orders for which
// the corpus holds no hypothesis n-grams at all are left out of the mean.
double bleu_from_stats(const NGramStats& stats);

// Per-segment BLEU for display: add-one smoothing of orders >= 2 whose
// match count is zero.
double sentence_bleu(const NGramStats& stats);

// ---- TER ----

std::size_t word_edit_distance(std::span<const std::string> hyp,
                               std::span<const std::string> ref);

// Greedy block-shift search followed by word-level edit distance.
TerStats ter_segment(std::span<const std::string> hyp,
                     std::span<const std::string> ref, int max_shifts = 10);

// Throws EmptyReference when stats.ref_words == 0.
double ter_from_stats(const TerStats& stats);

// ---- chrF ----

ChrfStats chrf_segment(std::string_view hyp, std::string_view ref,
                       int char_order = 6);
double chrf_from_stats(const ChrfStats& stats, double beta = 2.0);

// ---- corpus scoring ----

template <typename Stats>
struct MetricResult {
  double score = 0;
  Stats total;
  std::vector<Stats> segments;
};

// Each throws EmptyTestSet on an empty pair list.
MetricResult<NGramStats> bleu(std::span<const EvalPair> pairs,
                              bool lowercase = true);
MetricResult<TerStats> ter(std::span<const EvalPair> pairs,
                           bool lowercase = true, int max_shifts = 10);
MetricResult<ChrfStats> chrf(std::span<const EvalPair> pairs,
                             int char_order = 6, double beta = 2.0,
                             bool lowercase = true);

struct ScoreReport {
  std::string label;
  std::string test_set;
  MetricOptions options;
  double bleu = 0;
  double ter = 0;
  double chrf2 = 0;
  std::vector<SegmentStats> segments;

  double score(Metric metric) const;
};

ScoreReport score_pairs(std::span<const EvalPair> pairs,
                        const MetricOptions& options = {});

std::vector<EvalPair> load_eval_pairs(const std::filesystem::path& hyp_path,
                                      const std::filesystem::path& ref_path);

// Summed statistics over a subset of segments (indices may repeat) and the
// corpus score they imply.
SegmentStats sum_segments(std::span<const SegmentStats> segments,
                          std::span<const std::uint32_t> indices);
SegmentStats sum_segments(std::span<const SegmentStats> segments);
double score_from_stats(Metric metric, const SegmentStats& total,
                        const MetricOptions& options);

// Rounded to one decimal for display.
double display_score(double value);

nlohmann::json to_json(const ScoreReport& report);
ScoreReport score_report_from_json(const nlohmann::json& j);
void save_score_report(const ScoreReport& report,
                       const std::filesystem::path& path);
ScoreReport load_score_report(const std::filesystem::path& path);

}  // namespace subvoc

#endif  // SUBVOC_METRICS_H_
