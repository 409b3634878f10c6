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

#include "support.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "subvoc/text.h"

namespace subvoc::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  std::random_device rd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    fs::path p = fs::temp_directory_path() / ("subvoc-test-" + std::to_string(rd()));
    if (fs::create_directory(p)) {
      path_ = p;
      return;
    }
  }
  throw std::runtime_error("cannot create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t below(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(unit(rng) * static_cast<double>(n));
}

const std::vector<std::string>& syllables() {
  static const std::vector<std::string> kSyllables = [] {
    std::vector<std::string> out;
    for (const char* c : {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s",
                          "t", "v", "z", "sh", "tr"}) {
      for (const char* v : {"a", "e", "i", "o", "u", "ei"}) {
        out.push_back(std::string(c) + v);
      }
    }
    return out;
  }();
  return kSyllables;
}

}  // namespace

std::vector<std::string> synthetic_lines(std::size_t lines, std::uint64_t seed,
                                         const SyntheticOptions& options) {
  std::mt19937_64 rng(seed);
  const auto& syl = syllables();
  std::vector<std::string> words;
  std::set<std::string> seen;
  while (words.size() < options.vocabulary) {
    const std::size_t parts = 1 + below(rng, 4);
    std::string w;
    for (std::size_t i = 0; i < parts; ++i) w += syl[below(rng, syl.size())];
    if (unit(rng) < 0.15) w += "s";
    if (seen.insert(w).second) words.push_back(w);
  }
  std::vector<double> cumulative(words.size());
  double total = 0;
  for (std::size_t r = 0; r < words.size(); ++r) {
    total += 1.0 / std::pow(static_cast<double>(r + 1), options.zipf);
    cumulative[r] = total;
  }
  std::vector<std::string> out;
  out.reserve(lines);
  for (std::size_t l = 0; l < lines; ++l) {
    const std::size_t n =
        options.min_words + below(rng, options.max_words - options.min_words + 1);
    std::string line;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = unit(rng) * total;
      std::size_t r = static_cast<std::size_t>(
          std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      r = std::min(r, words.size() - 1);
      if (i) line.push_back(' ');
      line += words[r];
    }
    if (unit(rng) < 0.5) line += " .";
    out.push_back(std::move(line));
  }
  return out;
}

WordCounts random_word_table(std::mt19937_64& rng, std::size_t max_words) {
  static const std::vector<std::string> kAlphabet = {"a", "b", "c", "d", "e",
                                                     "@", "&", "\xC3\xA9"};
  WordCounts table;
  const std::size_t n = 1 + below(rng, max_words);
  const std::size_t alphabet = 2 + below(rng, kAlphabet.size() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = 1 + below(rng, 8);
    std::string w;
    for (std::size_t k = 0; k < len; ++k) w += kAlphabet[below(rng, alphabet)];
    table[escape_word(w)] += 1 + below(rng, 20);
  }
  return table;
}

std::vector<std::pair<std::string, std::string>> brute_force_bpe(
    const WordCounts& words, std::size_t num_merges) {
  std::vector<std::pair<std::vector<std::string>, std::uint64_t>> table;
  for (const auto& [word, count] : words) {
    auto symbols = text::split_chars(word);
    symbols.emplace_back("</w>");
    table.emplace_back(std::move(symbols), count);
  }
  std::vector<std::pair<std::string, std::string>> rules;
  while (rules.size() < num_merges) {
    std::map<std::pair<std::string, std::string>, std::uint64_t> counts;
    for (const auto& [symbols, count] : table) {
      for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
        counts[{symbols[i], symbols[i + 1]}] += count;
      }
    }
    const std::pair<std::string, std::string>* best = nullptr;
    std::uint64_t best_count = 0;
    for (const auto& [pair, count] : counts) {
      if (count > best_count) {
        best = &pair;
        best_count = count;
      }
    }
    if (best == nullptr || best_count < 2) break;
    rules.push_back(*best);
    for (auto& [symbols, count] : table) {
      std::vector<std::string> next;
      for (std::size_t i = 0; i < symbols.size();) {
        if (i + 1 < symbols.size() && symbols[i] == rules.back().first &&
            symbols[i + 1] == rules.back().second) {
          next.push_back(symbols[i] + symbols[i + 1]);
          i += 2;
        } else {
          next.push_back(symbols[i++]);
        }
      }
      symbols = std::move(next);
    }
  }
  return rules;
}

std::vector<std::string> rank_order_apply(const BpeModel& model,
                                          std::string_view word) {
  auto symbols = text::split_chars(escape_word(word));
  symbols.emplace_back("</w>");
  for (const auto& rule : model.merges()) {
    std::vector<std::string> next;
    for (std::size_t i = 0; i < symbols.size();) {
      if (i + 1 < symbols.size() && symbols[i] == rule.left &&
          symbols[i + 1] == rule.right) {
        next.push_back(symbols[i] + symbols[i + 1]);
        i += 2;
      } else {
        next.push_back(symbols[i++]);
      }
    }
    symbols = std::move(next);
  }
  std::string& last = symbols.back();
  last.erase(last.size() - 4);
  if (last.empty()) symbols.pop_back();
  for (std::size_t i = 0; i + 1 < symbols.size(); ++i) symbols[i] += "@@";
  return symbols;
}

namespace {

std::size_t levenshtein(const std::vector<std::string>& a,
                        const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1,
                         prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

std::size_t exhaustive_ter_edits(const std::vector<std::string>& hyp,
                                 const std::vector<std::string>& ref) {
  std::map<std::vector<std::string>, std::size_t> depth{{hyp, 0}};
  std::queue<std::vector<std::string>> frontier;
  frontier.push(hyp);
  std::size_t best = levenshtein(hyp, ref);
  while (!frontier.empty()) {
    const auto cur = frontier.front();
    frontier.pop();
    const std::size_t d = depth[cur];
    best = std::min(best, d + levenshtein(cur, ref));
    if (d + 1 >= best) continue;
    const std::size_t n = cur.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t len = 1; i + len <= n; ++len) {
        std::vector<std::string> rest(cur.begin(), cur.begin() + i);
        rest.insert(rest.end(), cur.begin() + i + len, cur.end());
        for (std::size_t k = 0; k <= rest.size(); ++k) {
          std::vector<std::string> next(rest.begin(), rest.begin() + k);
          next.insert(next.end(), cur.begin() + i, cur.begin() + i + len);
          next.insert(next.end(), rest.begin() + k, rest.end());
          if (depth.emplace(next, d + 1).second) frontier.push(next);
        }
      }
    }
  }
  return best;
}

double direct_chrf(std::string_view hyp, std::string_view ref, int order,
                   double beta) {
  auto strip = [](std::string_view s) {
    std::u32string out;
    for (char32_t c : text::decode(s)) {
      if (!text::is_space(c)) out.push_back(c);
    }
    return out;
  };
  const std::u32string h = strip(hyp), r = strip(ref);
  double sum_p = 0, sum_r = 0;
  int effective = 0;
  for (int n = 1; n <= order; ++n) {
    std::multiset<std::u32string> hg, rg;
    for (std::size_t i = 0; i + n <= h.size(); ++i) hg.insert(h.substr(i, n));
    for (std::size_t i = 0; i + n <= r.size(); ++i) rg.insert(r.substr(i, n));
    if (hg.empty() || rg.empty()) continue;
    std::size_t match = 0;
    for (auto it = hg.begin(); it != hg.end(); it = hg.upper_bound(*it)) {
      match += std::min(hg.count(*it), rg.count(*it));
    }
    sum_p += static_cast<double>(match) / static_cast<double>(hg.size());
    sum_r += static_cast<double>(match) / static_cast<double>(rg.size());
    ++effective;
  }
  if (effective == 0) return 0.0;
  const double p = sum_p / effective, rc = sum_r / effective;
  if (p + rc == 0) return 0.0;
  const double b2 = beta * beta;
  return 100.0 * (1 + b2) * p * rc / (b2 * p + rc);
}

namespace {

double bleu_of(const NGramStats& s) {
  if (s.hyp_len == 0) return 0;
  double log_sum = 0;
  int order = 0;
  for (int n = 0; n < kBleuOrder && s.totals[n] > 0; ++n, ++order) {
    if (s.matches[n] == 0) return 0;
    log_sum += std::log(static_cast<double>(s.matches[n]) / static_cast<double>(s.totals[n]));
  }
  if (order == 0) return 0;
  const double ratio = static_cast<double>(s.ref_len) / static_cast<double>(s.hyp_len);
  const double bp = ratio > 1 ? std::exp(1 - ratio) : 1.0;
  return 100 * bp * std::exp(log_sum / order);
}

double chrf_of(const ChrfStats& s) {
  double sum_p = 0, sum_r = 0;
  int effective = 0;
  for (std::size_t n = 0; n < s.hyp.size(); ++n) {
    if (s.hyp[n] == 0 || s.ref[n] == 0) continue;
    sum_p += static_cast<double>(s.match[n]) / static_cast<double>(s.hyp[n]);
    sum_r += static_cast<double>(s.match[n]) / static_cast<double>(s.ref[n]);
    ++effective;
  }
  if (effective == 0) return 0;
  const double p = sum_p / effective, r = sum_r / effective;
  return p + r == 0 ? 0 : 100.0 * 5 * p * r / (4 * p + r);
}

}  // namespace

double independent_bootstrap_p(const std::vector<SegmentStats>& a,
                               const std::vector<SegmentStats>& b, Metric metric,
                               std::size_t iterations, std::size_t sample_size,
                               std::uint32_t seed) {
  auto score = [&](const std::vector<SegmentStats>& sys,
                   const std::vector<std::size_t>& idx) {
    if (metric == Metric::kBleu) {
      NGramStats t;
      for (auto i : idx) t += sys[i].bleu;
      return bleu_of(t);
    }
    ChrfStats t;
    for (auto i : idx) t += sys[i].chrf;
    return chrf_of(t);
  };
  std::vector<std::size_t> all(a.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const double full = score(a, all) - score(b, all);
  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, a.size() - 1);
  std::size_t contrary = 0;
  std::vector<std::size_t> idx(sample_size);
  for (std::size_t it = 0; it < iterations; ++it) {
    for (auto& v : idx) v = pick(rng);
    const double d = score(a, idx) - score(b, idx);
    if ((full > 0 && d <= 0) || (full < 0 && d >= 0)) ++contrary;
  }
  return std::min(1.0, 2.0 * static_cast<double>(contrary) / static_cast<double>(iterations));
}

std::vector<SegmentStats> segment_stats(const std::vector<EvalPair>& pairs) {
  return score_pairs(pairs).segments;
}

void planted_margin_systems(std::size_t segments, std::uint64_t seed,
                            std::vector<EvalPair>* a, std::vector<EvalPair>* b) {
  const auto refs = synthetic_lines(segments, seed, {2000, 8, 20, 1.05});
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  a->clear();
  b->clear();
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const auto words = text::split_whitespace(refs[i]);
    std::string good, bad;
    for (std::size_t k = 0; k < words.size(); ++k) {
      const bool keep_good = unit(rng) < 0.95;
      const bool keep_bad = unit(rng) < 0.35;
      const std::string filler = "x" + std::to_string(below(rng, 1000));
      good += (k ? " " : "") + (keep_good ? words[k] : filler);
      bad += (k ? " " : "") + (keep_bad ? words[k] : filler);
    }
    // One segment in twenty favours B.
    if (i % 20 == 19) std::swap(good, bad);
    a->push_back({good, refs[i]});
    b->push_back({bad, refs[i]});
  }
}

namespace {

struct PublishedRow {
  const char* label;
  double v[12];
};

// Columns: Top5<-ID 2010, Top5<-ID 2011, Top6<-ID 2010, Top6<-ID 2011, each
// with BLEU, TER, chrF2.
constexpr PublishedRow kPublished[] = {
    {"C1", {36.1, 52.4, 60.3, 43.7, 44.1, 66.1, 36.4, 52.3, 60.4, 44.1, 43.7, 66.4}},
    {"C2", {35.9, 52.5, 60.0, 42.8, 44.9, 65.2, 36.1, 52.5, 60.0, 44.0, 43.7, 65.8}},
    {"C3", {36.1, 52.4, 60.4, 44.0, 43.6, 66.6, 36.4, 52.2, 60.4, 44.4, 43.5, 66.4}},
    {"C4", {35.5, 52.8, 59.7, 43.3, 44.5, 65.6, 35.5, 53.0, 59.6, 43.6, 44.1, 65.7}},
    {"C5", {33.4, 53.8, 58.6, 40.7, 45.4, 64.2, 33.6, 53.3, 58.7, 40.9, 45.5, 64.2}},
    {"C6", {35.4, 53.0, 59.7, 43.5, 44.6, 65.5, 35.5, 53.6, 59.9, 43.3, 44.4, 65.7}},
    {"C7", {33.4, 53.3, 58.6, 40.9, 45.1, 64.2, 33.2, 53.4, 58.2, 40.2, 45.4, 64.0}},
    {"C8", {35.4, 52.8, 59.6, 42.8, 44.6, 65.1, 35.1, 53.1, 59.6, 43.3, 44.4, 65.7}},
    {"C9", {36.1, 52.4, 60.1, 44.0, 43.6, 66.4, 35.9, 52.6, 60.4, 44.3, 43.5, 66.6}},
    {"C10", {35.6, 52.7, 59.9, 43.0, 44.9, 65.2, 36.1, 52.3, 60.2, 44.0, 43.6, 66.0}},
    {"C11", {36.0, 52.5, 60.1, 44.1, 43.6, 65.9, 36.4, 52.3, 60.3, 44.0, 43.8, 66.4}},
};

}  // namespace

const char* const kPublishedOrder[11] = {"C3", "C1", "C9", "C11", "C2", "C10",
                                         "C4", "C8", "C6", "C7", "C5"};

RankInput published_rank_input() {
  RankInput input;
  const char* groups[] = {"top5.2010", "top5.2011", "top6.2010", "top6.2011"};
  const Metric metrics[] = {Metric::kBleu, Metric::kTer, Metric::kChrf};
  for (const char* g : groups) {
    for (Metric m : metrics) {
      input.columns.push_back({std::string(g) + "/" + std::string(metric_name(m)), m});
    }
  }
  for (const auto& row : kPublished) {
    RankRow r{row.label, {}};
    for (std::size_t k = 0; k < 12; ++k) r.scores[input.columns[k].name] = row.v[k];
    input.rows.push_back(std::move(r));
  }
  return input;
}

}  // namespace subvoc::testing
