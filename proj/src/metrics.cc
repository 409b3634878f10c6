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

#include "subvoc/metrics.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string_view>
#include <tuple>
#include <unordered_map>

#include "subvoc/corpus_io.h"
#include "subvoc/error.h"
#include "subvoc/text.h"

namespace subvoc {

std::string_view metric_name(Metric metric) {
  switch (metric) {
    case Metric::kBleu: return "bleu";
    case Metric::kTer: return "ter";
    case Metric::kChrf: return "chrf2";
  }
  return "?";
}

Metric parse_metric(std::string_view name) {
  if (name == "bleu") return Metric::kBleu;
  if (name == "ter") return Metric::kTer;
  if (name == "chrf2" || name == "chrf") return Metric::kChrf;
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

NGramStats& NGramStats::operator+=(const NGramStats& o) {
  for (int n = 0; n < kBleuOrder; ++n) {
    matches[n] += o.matches[n];
    totals[n] += o.totals[n];
  }
  hyp_len += o.hyp_len;
  ref_len += o.ref_len;
  return *this;
}

TerStats& TerStats::operator+=(const TerStats& o) {
  edits += o.edits;
  ref_words += o.ref_words;
  shifts += o.shifts;
  return *this;
}

ChrfStats& ChrfStats::operator+=(const ChrfStats& o) {
  const std::size_t n = std::max(hyp.size(), o.hyp.size());
  hyp.resize(n);
  ref.resize(n);
  match.resize(n);
  for (std::size_t i = 0; i < o.hyp.size(); ++i) {
    hyp[i] += o.hyp[i];
    ref[i] += o.ref[i];
    match[i] += o.match[i];
  }
  return *this;
}

// ---- tokenization ----

namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

bool is_ascii_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

bool is_13a_symbol(char32_t c) {
  return (c >= U'{' && c <= U'~') || (c >= U'[' && c <= U'`') ||
         (c >= U' ' && c <= U'&') || (c >= U'(' && c <= U'+') ||
         (c >= U':' && c <= U'@') || c == U'/';
}

bool is_period_or_comma(char32_t c) { return c == U'.' || c == U','; }

}  // namespace

std::vector<std::string> tokenize_13a(std::string_view line) {
  std::string s(line);
  replace_all(s, "<skipped>", "");
  replace_all(s, "-\n", "");
  replace_all(s, "\n", " ");
  if (s.find('&') != std::string::npos) {
    replace_all(s, "&quot;", "\"");
    replace_all(s, "&amp;", "&");
    replace_all(s, "&lt;", "<");
    replace_all(s, "&gt;", ">");
  }
  std::u32string u = U" " + text::decode(s) + U" ";

  // Each pass mirrors one left-to-right, non-overlapping regex substitution.
  std::u32string out;
  out.reserve(u.size() * 2);
  for (char32_t c : u) {
    if (is_13a_symbol(c)) {
      out.push_back(U' ');
      out.push_back(c);
      out.push_back(U' ');
    } else {
      out.push_back(c);
    }
  }
  u.swap(out);

  out.clear();
  for (std::size_t i = 0; i < u.size();) {
    if (i + 1 < u.size() && !is_ascii_digit(u[i]) && is_period_or_comma(u[i + 1])) {
      out += {u[i], U' ', u[i + 1], U' '};
      i += 2;
    } else {
      out.push_back(u[i++]);
    }
  }
  u.swap(out);

  out.clear();
  for (std::size_t i = 0; i < u.size();) {
    if (i + 1 < u.size() && is_period_or_comma(u[i]) && !is_ascii_digit(u[i + 1])) {
      out += {U' ', u[i], U' ', u[i + 1]};
      i += 2;
    } else {
      out.push_back(u[i++]);
    }
  }
  u.swap(out);

  out.clear();
  for (std::size_t i = 0; i < u.size();) {
    if (i + 1 < u.size() && is_ascii_digit(u[i]) && u[i + 1] == U'-') {
      out += {u[i], U' ', u[i + 1], U' '};
      i += 2;
    } else {
      out.push_back(u[i++]);
    }
  }

  std::vector<std::string> tokens;
  std::u32string current;
  for (char32_t c : out) {
    if (text::is_space(c)) {
      if (!current.empty()) tokens.push_back(text::encode(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back(text::encode(current));
  return tokens;
}

std::vector<std::string> metric_tokens(std::string_view line, bool lowercase) {
  return lowercase ? tokenize_13a(text::lowercase(line)) : tokenize_13a(line);
}

// ---- BLEU ----

NGramStats bleu_segment(std::span<const std::string> hyp,
                        std::span<const std::string> ref) {
  NGramStats stats;
  stats.hyp_len = hyp.size();
  stats.ref_len = ref.size();
  for (int n = 1; n <= kBleuOrder; ++n) {
    std::unordered_map<std::string, std::uint64_t> ref_counts;
    auto join = [](std::span<const std::string> words, std::size_t at, int len) {
      std::string key;
      for (int k = 0; k < len; ++k) {
        key += words[at + k];
        key.push_back('\x1f');
      }
      return key;
    };
    if (ref.size() >= static_cast<std::size_t>(n)) {
      for (std::size_t i = 0; i + n <= ref.size(); ++i) ++ref_counts[join(ref, i, n)];
    }
    std::unordered_map<std::string, std::uint64_t> hyp_counts;
    if (hyp.size() >= static_cast<std::size_t>(n)) {
      for (std::size_t i = 0; i + n <= hyp.size(); ++i) ++hyp_counts[join(hyp, i, n)];
      stats.totals[n - 1] = hyp.size() - n + 1;
    }
    for (const auto& [gram, count] : hyp_counts) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) stats.matches[n - 1] += std::min(count, it->second);
    }
  }
  return stats;
}

double bleu_from_stats(const NGramStats& stats) {
  if (stats.hyp_len == 0) return 0.0;
  const double bp =
      stats.hyp_len < stats.ref_len
          ? std::exp(1.0 - static_cast<double>(stats.ref_len) /
                               static_cast<double>(stats.hyp_len))
          : 1.0;
  double log_sum = 0.0;
  int order = 0;
  for (int n = 0; n < kBleuOrder; ++n) {
    if (stats.totals[n] == 0) break;
    if (stats.matches[n] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(stats.matches[n]) /
                        static_cast<double>(stats.totals[n]));
    ++order;
  }
  if (order == 0) return 0.0;
  return 100.0 * bp * std::exp(log_sum / order);
}

double sentence_bleu(const NGramStats& stats) {
  if (stats.hyp_len == 0 || stats.matches[0] == 0) return 0.0;
  const double bp =
      stats.hyp_len < stats.ref_len
          ? std::exp(1.0 - static_cast<double>(stats.ref_len) /
                               static_cast<double>(stats.hyp_len))
          : 1.0;
  double log_sum = 0.0;
  int order = 0;
  for (int n = 0; n < kBleuOrder; ++n) {
    if (stats.totals[n] == 0) break;
    double m = static_cast<double>(stats.matches[n]);
    double t = static_cast<double>(stats.totals[n]);
    if (n > 0 && stats.matches[n] == 0) {
      m += 1.0;
      t += 1.0;
    }
    log_sum += std::log(m / t);
    ++order;
  }
  return 100.0 * bp * std::exp(log_sum / order);
}

// ---- TER ----

namespace {

constexpr int kMaxShiftSize = 10;
constexpr int kMaxShiftDistance = 50;

enum class EditOp { kMatch, kSubstitute, kHypExtra, kRefMissing };

// Levenshtein distance with a backtrace. On ties the trace prefers a
// diagonal step, then a missing reference word, then an extra hypothesis
// word.
std::size_t edit_distance_trace(std::span<const std::string> hyp,
                                std::span<const std::string> ref,
                                std::vector<EditOp>* trace) {
  const std::size_t n = hyp.size();
  const std::size_t m = ref.size();
  std::vector<std::size_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& {
    return d[i * (m + 1) + j];
  };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (hyp[i - 1] == ref[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i, j - 1) + 1, at(i - 1, j) + 1});
    }
  }
  if (trace) {
    trace->clear();
    std::size_t i = n, j = m;
    while (i > 0 || j > 0) {
      if (i > 0 && j > 0) {
        const bool same = hyp[i - 1] == ref[j - 1];
        if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
          trace->push_back(same ? EditOp::kMatch : EditOp::kSubstitute);
          --i;
          --j;
          continue;
        }
      }
      if (j > 0 && at(i, j) == at(i, j - 1) + 1) {
        trace->push_back(EditOp::kRefMissing);
        --j;
      } else {
        trace->push_back(EditOp::kHypExtra);
        --i;
      }
    }
    std::reverse(trace->begin(), trace->end());
  }
  return at(n, m);
}

std::vector<std::string> perform_shift(std::span<const std::string> words,
                                       std::size_t start, std::size_t length,
                                       std::size_t target) {
  std::vector<std::string> out;
  out.reserve(words.size());
  auto append = [&](std::size_t from, std::size_t to) {
    to = std::min(to, words.size());
    for (std::size_t k = from; k < to; ++k) out.push_back(words[k]);
  };
  if (target < start) {
    append(0, target);
    append(start, start + length);
    append(target, start);
    append(start + length, words.size());
  } else if (target > start + length) {
    append(0, start);
    append(start + length, target);
    append(start, start + length);
    append(target, words.size());
  } else {
    append(0, start);
    append(start + length, length + target);
    append(start, start + length);
    append(length + target, words.size());
  }
  return out;
}

// One round of the greedy search: the block shift with the largest edit
// distance reduction; ties prefer longer blocks, then earlier source
// positions, then earlier targets. Returns the gain (<= 0 means none).
long best_shift(const std::vector<std::string>& hyp,
                std::span<const std::string> ref,
                std::vector<std::string>* shifted) {
  std::vector<EditOp> trace;
  const std::size_t base = edit_distance_trace(hyp, ref, &trace);

  std::vector<int> hyp_err;
  std::vector<int> ref_err;
  std::vector<long> align(ref.size(), -1);
  long pos_h = -1, pos_r = -1;
  for (EditOp op : trace) {
    switch (op) {
      case EditOp::kMatch:
      case EditOp::kSubstitute: {
        const int err = op == EditOp::kSubstitute ? 1 : 0;
        ++pos_h;
        ++pos_r;
        align[pos_r] = pos_h;
        hyp_err.push_back(err);
        ref_err.push_back(err);
        break;
      }
      case EditOp::kHypExtra:
        ++pos_h;
        hyp_err.push_back(1);
        break;
      case EditOp::kRefMissing:
        ++pos_r;
        align[pos_r] = pos_h;
        ref_err.push_back(1);
        break;
    }
  }

  bool found = false;
  std::tuple<long, std::size_t, long, long> best_key{};
  for (std::size_t start_h = 0; start_h < hyp.size(); ++start_h) {
    for (std::size_t start_r = 0; start_r < ref.size(); ++start_r) {
      if (std::labs(static_cast<long>(start_r) - static_cast<long>(start_h)) >
          kMaxShiftDistance) {
        continue;
      }
      for (std::size_t length = 1;
           length <= static_cast<std::size_t>(kMaxShiftSize) &&
           start_h + length <= hyp.size() && start_r + length <= ref.size() &&
           hyp[start_h + length - 1] == ref[start_r + length - 1];
           ++length) {
        bool hyp_wrong = false, ref_wrong = false;
        for (std::size_t k = 0; k < length; ++k) {
          hyp_wrong |= hyp_err[start_h + k] != 0;
          ref_wrong |= ref_err[start_r + k] != 0;
        }
        if (!hyp_wrong || !ref_wrong) continue;
        const long aligned = align[start_r];
        if (aligned >= static_cast<long>(start_h) &&
            aligned < static_cast<long>(start_h + length)) {
          continue;
        }
        long prev_idx = -1;
        for (long offset = -1; offset < static_cast<long>(length); ++offset) {
          long idx;
          const long r = static_cast<long>(start_r) + offset;
          if (r == -1) {
            idx = 0;
          } else if (r < static_cast<long>(ref.size())) {
            idx = align[r] + 1;
          } else {
            break;
          }
          if (idx == prev_idx) continue;
          prev_idx = idx;
          auto candidate = perform_shift(hyp, start_h, length,
                                         static_cast<std::size_t>(idx));
          const long gain = static_cast<long>(base) -
                            static_cast<long>(edit_distance_trace(candidate, ref, nullptr));
          std::tuple<long, std::size_t, long, long> key{
              gain, length, -static_cast<long>(start_h), -idx};
          if (!found || key > best_key) {
            found = true;
            best_key = key;
            *shifted = std::move(candidate);
          }
        }
      }
    }
  }
  return found ? std::get<0>(best_key) : 0;
}

}  // namespace

std::size_t word_edit_distance(std::span<const std::string> hyp,
                               std::span<const std::string> ref) {
  return edit_distance_trace(hyp, ref, nullptr);
}

TerStats ter_segment(std::span<const std::string> hyp,
                     std::span<const std::string> ref, int max_shifts) {
  TerStats stats;
  stats.ref_words = ref.size();
  if (ref.empty()) {
    stats.edits = hyp.size();
    return stats;
  }
  std::vector<std::string> current(hyp.begin(), hyp.end());
  for (int round = 0; round < max_shifts; ++round) {
    std::vector<std::string> shifted;
    if (best_shift(current, ref, &shifted) <= 0) break;
    current = std::move(shifted);
    ++stats.shifts;
  }
  stats.edits = stats.shifts + word_edit_distance(current, ref);
  return stats;
}

double ter_from_stats(const TerStats& stats) {
  if (stats.ref_words == 0) {
    throw EmptyReference("TER undefined: references contain no words");
  }
  return 100.0 * static_cast<double>(stats.edits) /
         static_cast<double>(stats.ref_words);
}

// ---- chrF ----

namespace {

std::vector<std::map<std::u32string_view, std::uint64_t>> char_ngrams(
    const std::u32string& chars, int order) {
  std::vector<std::map<std::u32string_view, std::uint64_t>> grams(order);
  const std::u32string_view view(chars);
  for (int n = 1; n <= order; ++n) {
    for (std::size_t i = 0; i + n <= chars.size(); ++i) {
      ++grams[n - 1][view.substr(i, n)];
    }
  }
  return grams;
}

std::u32string strip_whitespace(std::string_view s) {
  std::u32string out;
  for (char32_t c : text::decode(s)) {
    if (!text::is_space(c)) out.push_back(c);
  }
  return out;
}

}  // namespace

ChrfStats chrf_segment(std::string_view hyp, std::string_view ref,
                       int char_order) {
  const std::u32string h = strip_whitespace(hyp);
  const std::u32string r = strip_whitespace(ref);
  const auto hyp_grams = char_ngrams(h, char_order);
  const auto ref_grams = char_ngrams(r, char_order);
  ChrfStats stats;
  stats.hyp.assign(char_order, 0);
  stats.ref.assign(char_order, 0);
  stats.match.assign(char_order, 0);
  for (int n = 0; n < char_order; ++n) {
    for (const auto& [gram, count] : hyp_grams[n]) {
      stats.hyp[n] += count;
      auto it = ref_grams[n].find(gram);
      if (it != ref_grams[n].end()) stats.match[n] += std::min(count, it->second);
    }
    for (const auto& [gram, count] : ref_grams[n]) stats.ref[n] += count;
  }
  return stats;
}

double chrf_from_stats(const ChrfStats& stats, double beta) {
  const double factor = beta * beta;
  double avg_prec = 0.0, avg_rec = 0.0;
  int effective_order = 0;
  for (std::size_t n = 0; n < stats.hyp.size(); ++n) {
    if (stats.hyp[n] > 0 && stats.ref[n] > 0) {
      avg_prec += static_cast<double>(stats.match[n]) / static_cast<double>(stats.hyp[n]);
      avg_rec += static_cast<double>(stats.match[n]) / static_cast<double>(stats.ref[n]);
      ++effective_order;
    }
  }
  if (effective_order == 0) return 0.0;
  avg_prec /= effective_order;
  avg_rec /= effective_order;
  if (avg_prec + avg_rec == 0.0) return 0.0;
  return 100.0 * (1 + factor) * avg_prec * avg_rec /
         (factor * avg_prec + avg_rec);
}

// ---- corpus scoring ----

namespace {

void require_pairs(std::span<const EvalPair> pairs) {
  if (pairs.empty()) throw EmptyTestSet("no hypothesis/reference pairs");
}

}  // namespace

MetricResult<NGramStats> bleu(std::span<const EvalPair> pairs, bool lowercase) {
  require_pairs(pairs);
  MetricResult<NGramStats> result;
  result.segments.reserve(pairs.size());
  for (const auto& p : pairs) {
    result.segments.push_back(bleu_segment(metric_tokens(p.hypothesis, lowercase),
                                           metric_tokens(p.reference, lowercase)));
    result.total += result.segments.back();
  }
  result.score = bleu_from_stats(result.total);
  return result;
}

MetricResult<TerStats> ter(std::span<const EvalPair> pairs, bool lowercase,
                           int max_shifts) {
  require_pairs(pairs);
  MetricResult<TerStats> result;
  result.segments.reserve(pairs.size());
  for (const auto& p : pairs) {
    result.segments.push_back(ter_segment(metric_tokens(p.hypothesis, lowercase),
                                          metric_tokens(p.reference, lowercase),
                                          max_shifts));
    result.total += result.segments.back();
  }
  result.score = ter_from_stats(result.total);
  return result;
}

MetricResult<ChrfStats> chrf(std::span<const EvalPair> pairs, int char_order,
                             double beta, bool lowercase) {
  require_pairs(pairs);
  MetricResult<ChrfStats> result;
  result.segments.reserve(pairs.size());
  result.total.hyp.assign(char_order, 0);
  result.total.ref.assign(char_order, 0);
  result.total.match.assign(char_order, 0);
  for (const auto& p : pairs) {
    if (lowercase) {
      result.segments.push_back(chrf_segment(text::lowercase(p.hypothesis),
                                             text::lowercase(p.reference),
                                             char_order));
    } else {
      result.segments.push_back(chrf_segment(p.hypothesis, p.reference, char_order));
    }
    result.total += result.segments.back();
  }
  result.score = chrf_from_stats(result.total, beta);
  return result;
}

double ScoreReport::score(Metric metric) const {
  switch (metric) {
    case Metric::kBleu: return bleu;
    case Metric::kTer: return ter;
    case Metric::kChrf: return chrf2;
  }
  return 0;
}

ScoreReport score_pairs(std::span<const EvalPair> pairs,
                        const MetricOptions& options) {
  auto b = subvoc::bleu(pairs, options.lowercase);
  auto t = subvoc::ter(pairs, options.lowercase, options.ter_max_shifts);
  auto c = subvoc::chrf(pairs, options.char_order, options.beta, options.lowercase);
  ScoreReport report;
  report.options = options;
  report.bleu = b.score;
  report.ter = t.score;
  report.chrf2 = c.score;
  report.segments.resize(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    report.segments[i].bleu = b.segments[i];
    report.segments[i].ter = t.segments[i];
    report.segments[i].chrf = std::move(c.segments[i]);
  }
  return report;
}

std::vector<EvalPair> load_eval_pairs(const std::filesystem::path& hyp_path,
                                      const std::filesystem::path& ref_path) {
  auto hyps = read_lines(hyp_path);
  auto refs = read_lines(ref_path);
  if (hyps.size() != refs.size()) throw LineCountMismatch(hyps.size(), refs.size());
  std::vector<EvalPair> pairs(hyps.size());
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    pairs[i].hypothesis = std::move(hyps[i]);
    pairs[i].reference = std::move(refs[i]);
  }
  return pairs;
}

SegmentStats sum_segments(std::span<const SegmentStats> segments,
                          std::span<const std::uint32_t> indices) {
  SegmentStats total;
  for (std::uint32_t i : indices) {
    total.bleu += segments[i].bleu;
    total.ter += segments[i].ter;
    total.chrf += segments[i].chrf;
  }
  return total;
}

SegmentStats sum_segments(std::span<const SegmentStats> segments) {
  SegmentStats total;
  for (const auto& s : segments) {
    total.bleu += s.bleu;
    total.ter += s.ter;
    total.chrf += s.chrf;
  }
  return total;
}

double score_from_stats(Metric metric, const SegmentStats& total,
                        const MetricOptions& options) {
  switch (metric) {
    case Metric::kBleu: return bleu_from_stats(total.bleu);
    case Metric::kTer: return ter_from_stats(total.ter);
    case Metric::kChrf: return chrf_from_stats(total.chrf, options.beta);
  }
  return 0;
}

double display_score(double value) { return std::round(value * 10.0) / 10.0; }

// ---- report serialization ----

namespace {

constexpr std::string_view kScoreReportFormat = "subvoc-score-report/1";

template <typename T>
T field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("missing field '") + key + "'", 0);
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad field '") + key + "': " + e.what(), 0);
  }
}

}  // namespace

nlohmann::json to_json(const ScoreReport& report) {
  nlohmann::json segments = nlohmann::json::array();
  for (const auto& s : report.segments) {
    segments.push_back({
        {"bleu", {{"matches", s.bleu.matches},
                  {"totals", s.bleu.totals},
                  {"hyp_len", s.bleu.hyp_len},
                  {"ref_len", s.bleu.ref_len},
                  {"sentence_bleu", sentence_bleu(s.bleu)}}},
        {"ter", {{"edits", s.ter.edits},
                 {"ref_words", s.ter.ref_words},
                 {"shifts", s.ter.shifts}}},
        {"chrf", {{"hyp", s.chrf.hyp}, {"ref", s.chrf.ref}, {"match", s.chrf.match}}},
    });
  }
  return {
      {"format", kScoreReportFormat},
      {"label", report.label},
      {"test_set", report.test_set},
      {"segments", report.segments.size()},
      {"settings", {{"lowercase", report.options.lowercase},
                    {"tokenizer", "13a"},
                    {"bleu_smoothing", "none"},
                    {"chrf_char_order", report.options.char_order},
                    {"chrf_beta", report.options.beta},
                    {"ter_shift_cap", report.options.ter_max_shifts}}},
      {"scores", {{"bleu", report.bleu}, {"ter", report.ter}, {"chrf2", report.chrf2}}},
      {"display", {{"bleu", display_score(report.bleu)},
                   {"ter", display_score(report.ter)},
                   {"chrf2", display_score(report.chrf2)}}},
      {"per_segment", std::move(segments)},
  };
}

ScoreReport score_report_from_json(const nlohmann::json& j) {
  if (!j.is_object() || field<std::string>(j, "format") != kScoreReportFormat) {
    throw FormatError("not a score report", 0);
  }
  ScoreReport report;
  report.label = field<std::string>(j, "label");
  report.test_set = field<std::string>(j, "test_set");
  const auto& settings = j.at("settings");
  report.options.lowercase = field<bool>(settings, "lowercase");
  report.options.char_order = field<int>(settings, "chrf_char_order");
  report.options.beta = field<double>(settings, "chrf_beta");
  report.options.ter_max_shifts = field<int>(settings, "ter_shift_cap");
  const auto& scores = j.at("scores");
  report.bleu = field<double>(scores, "bleu");
  report.ter = field<double>(scores, "ter");
  report.chrf2 = field<double>(scores, "chrf2");
  if (j.contains("per_segment")) {
    for (const auto& s : j.at("per_segment")) {
      SegmentStats seg;
      const auto& b = s.at("bleu");
      seg.bleu.matches = field<std::array<std::uint64_t, kBleuOrder>>(b, "matches");
      seg.bleu.totals = field<std::array<std::uint64_t, kBleuOrder>>(b, "totals");
      seg.bleu.hyp_len = field<std::uint64_t>(b, "hyp_len");
      seg.bleu.ref_len = field<std::uint64_t>(b, "ref_len");
      const auto& t = s.at("ter");
      seg.ter.edits = field<std::uint64_t>(t, "edits");
      seg.ter.ref_words = field<std::uint64_t>(t, "ref_words");
      seg.ter.shifts = field<std::uint64_t>(t, "shifts");
      const auto& c = s.at("chrf");
      seg.chrf.hyp = field<std::vector<std::uint64_t>>(c, "hyp");
      seg.chrf.ref = field<std::vector<std::uint64_t>>(c, "ref");
      seg.chrf.match = field<std::vector<std::uint64_t>>(c, "match");
      report.segments.push_back(std::move(seg));
    }
  }
  return report;
}

void save_score_report(const ScoreReport& report,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open '" + path.string() + "' for writing");
  out << to_json(report).dump(2) << '\n';
  out.close();
  if (!out) throw IoFailure("write failed for '" + path.string() + "'");
}

ScoreReport load_score_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open '" + path.string() + "' for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": invalid JSON: " + e.what(), 0);
  }
  try {
    return score_report_from_json(j);
  } catch (const FormatError& e) {
    throw e.prefixed(path.string() + ": ");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what(), 0);
  }
}

}  // namespace subvoc
