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

#ifndef SUBVOC_SIGNIFICANCE_H_
#define SUBVOC_SIGNIFICANCE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "subvoc/metrics.h"

namespace subvoc {

// Written into every result so runs can be replicated elsewhere.
inline constexpr std::string_view kRngName = "mt19937_64";
inline constexpr double kAlpha = 0.05;

struct BootstrapOptions {
  std::size_t iterations = 1000;
  std::size_t sample_size = 300;
  std::uint64_t seed = 12345;
  unsigned threads = 1;
};

struct BootstrapResult {
  Metric metric = Metric::kBleu;
  double score_a = 0;
  double score_b = 0;
  double delta = 0;  // score_a - score_b on the full test set
  double p_value = 1.0;
  bool significant = false;
  // True when delta is exactly zero; reported with p_value 1.0.
  bool degenerate = false;
  double ci_low = 0;
  double ci_high = 0;
  std::size_t iterations = 0;
  std::size_t sample_size = 0;
  std::uint64_t seed = 0;
  std::string rng{kRngName};

  bool operator==(const BootstrapResult&) const = default;
};

// iterations * sample_size segment indices in [0, segments), drawn
// uniformly with replacement; iteration i owns the i-th run of
// sample_size values.
std::vector<std::uint32_t> draw_indices(std::size_t segments,
                                        const BootstrapOptions& options);

// Paired sign-fraction test: p = min(1, 2 * fraction of iterations whose
// difference does not share the sign of the full-set difference). The
// interval spans the 2.5th and 97.5th percentiles of the resampled
// differences. Throws LineCountMismatch for unequal segment counts and
// EmptyTestSet when there are none.
BootstrapResult paired_bootstrap(std::span<const SegmentStats> a,
                                 std::span<const SegmentStats> b, Metric metric,
                                 const MetricOptions& metric_options = {},
                                 const BootstrapOptions& options = {});

// Same test with caller-supplied indices (size iterations * sample_size).
BootstrapResult bootstrap_with_indices(std::span<const SegmentStats> a,
                                       std::span<const SegmentStats> b,
                                       Metric metric,
                                       const MetricOptions& metric_options,
                                       std::span<const std::uint32_t> indices,
                                       const BootstrapOptions& options);

struct LabeledSystem {
  std::string label;
  std::vector<SegmentStats> segments;
};

struct SignificanceMatrix {
  Metric metric = Metric::kBleu;
  std::vector<std::string> labels;
  // cells[i][j] compares i (as A) with j (as B); empty on the diagonal.
  std::vector<std::vector<std::optional<BootstrapResult>>> cells;
};

// Every pair is tested with the same seed.
SignificanceMatrix significance_matrix(std::span<const LabeledSystem> systems,
                                       Metric metric,
                                       const MetricOptions& metric_options = {},
                                       const BootstrapOptions& options = {});

// ---- ranking ----

struct RankColumn {
  std::string name;
  Metric metric = Metric::kBleu;
};

struct RankRow {
  std::string label;
  std::map<std::string, double> scores;  // column name -> score
};

struct RankInput {
  std::vector<RankColumn> columns;
  std::vector<RankRow> rows;
};

struct RankTable {
  std::vector<RankColumn> columns;
  std::vector<std::string> labels;          // input order
  std::vector<std::vector<int>> ranks;      // [row][column], 1 = best
  std::vector<double> mean_rank;
  std::vector<double> mean_bleu;
  std::vector<std::string> ordering;        // best to worst
};

// Label order that compares digit runs numerically ("C2" < "C10").
bool natural_less(std::string_view a, std::string_view b);

// Per column, systems get ranks 1..n by score (higher is better except for
// TER); equal scores are separated by natural label order. Systems are
// ordered by mean rank, then by mean BLEU over the BLEU columns, then by
// label. Throws MissingCell when a row lacks a column.
RankTable rank_systems(const RankInput& input);

nlohmann::json to_json(const BootstrapResult& r);
nlohmann::json to_json(const SignificanceMatrix& m);
nlohmann::json to_json(const RankTable& t);

std::string render_bootstrap(const BootstrapResult& r, std::string_view label_a,
                             std::string_view label_b);
std::string render_matrix(const SignificanceMatrix& m);
std::string render_rank_table(const RankTable& t);

}  // namespace subvoc

#endif  // SUBVOC_SIGNIFICANCE_H_
