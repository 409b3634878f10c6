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

#include "subvoc/bpe.h"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <thread>

#include "subvoc/error.h"
#include "subvoc/text.h"

namespace subvoc {

namespace {

constexpr std::string_view kAmpEntity = "&amp;";
constexpr std::string_view kAtEntity = "&#64;";
constexpr std::string_view kLtEntity = "&lt;";

bool starts_with_entity(std::string_view s) {
  return s.starts_with(kAmpEntity) || s.starts_with(kAtEntity) ||
         s.starts_with(kLtEntity);
}

std::string pair_key(std::string_view left, std::string_view right) {
  std::string key;
  key.reserve(left.size() + right.size() + 1);
  key.append(left);
  key.push_back(' ');
  key.append(right);
  return key;
}

bool has_space(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
           c == '\f';
  });
}

}  // namespace

std::string escape_word(std::string_view word) {
  std::string out;
  out.reserve(word.size());
  for (std::size_t i = 0; i < word.size(); ++i) {
    const char c = word[i];
    const std::string_view rest = word.substr(i);
    if (c == '&' && starts_with_entity(rest)) {
      out.append(kAmpEntity);
    } else if (c == '@' && ((i + 1 < word.size() && word[i + 1] == '@') ||
                            (i > 0 && word[i - 1] == '@'))) {
      out.append(kAtEntity);
    } else if (c == '<' && rest.starts_with(kEndOfWord)) {
      out.append(kLtEntity);
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string unescape_word(std::string_view escaped) {
  std::string out;
  out.reserve(escaped.size());
  std::size_t i = 0;
  while (i < escaped.size()) {
    const std::string_view rest = escaped.substr(i);
    if (rest.starts_with(kAmpEntity)) {
      out.push_back('&');
      i += kAmpEntity.size();
    } else if (rest.starts_with(kAtEntity)) {
      out.push_back('@');
      i += kAtEntity.size();
    } else if (rest.starts_with(kLtEntity)) {
      out.push_back('<');
      i += kLtEntity.size();
    } else {
      out.push_back(escaped[i++]);
    }
  }
  return out;
}

BpeModel::BpeModel(std::vector<std::pair<std::string, std::string>> merges) {
  merges_.reserve(merges.size());
  ranks_.reserve(merges.size());
  for (auto& [left, right] : merges) {
    const std::size_t line = merges_.size() + 2;
    if (left.empty() || right.empty() || has_space(left) || has_space(right)) {
      throw FormatError("merge rule needs two non-empty symbols", line);
    }
    if (left + right == kEndOfWord) {
      throw FormatError("merge rule produces the end-of-word symbol", line);
    }
    const auto rank = static_cast<std::uint32_t>(merges_.size());
    if (!ranks_.emplace(pair_key(left, right), rank).second) {
      throw FormatError("duplicate merge rule '" + left + " " + right + "'",
                        line);
    }
    merges_.push_back(MergeRule{std::move(left), std::move(right), rank});
  }
}

std::optional<std::uint32_t> BpeModel::rank(std::string_view left,
                                            std::string_view right) const {
  auto it = ranks_.find(pair_key(left, right));
  if (it == ranks_.end()) return std::nullopt;
  return it->second;
}

BpeModel BpeModel::prefix(std::size_t k) const {
  std::vector<std::pair<std::string, std::string>> rules;
  k = std::min(k, merges_.size());
  rules.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    rules.emplace_back(merges_[i].left, merges_[i].right);
  }
  return BpeModel(std::move(rules));
}

WordCounts count_words(const TokenStream& tokens) {
  std::unordered_map<std::string_view, std::uint64_t> raw;
  for (const auto& sentence : tokens.sentences) {
    for (const auto& word : sentence) {
      if (!word.empty()) ++raw[word];
    }
  }
  WordCounts words;
  for (const auto& [word, count] : raw) words[escape_word(word)] += count;
  return words;
}

namespace {

// Incremental pair statistics over the word table. Each merge rewrites only
// the words that contain the chosen pair and applies the resulting count
// deltas; the candidate set stays ordered by (count desc, left, right).
class Learner {
 public:
  explicit Learner(const WordCounts& table) {
    words_.reserve(table.size());
    freqs_.reserve(table.size());
    const int eow = intern(std::string(kEndOfWord));
    for (const auto& [word, count] : table) {
      std::vector<int> symbols;
      for (const auto& ch : text::split_chars(word)) {
        symbols.push_back(intern(ch));
      }
      symbols.push_back(eow);
      words_.push_back(std::move(symbols));
      freqs_.push_back(count);
    }
    seen_stamp_.assign(words_.size(), 0);
    for (std::size_t w = 0; w < words_.size(); ++w) {
      const auto& s = words_[w];
      for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const std::uint64_t key = pack(s[i], s[i + 1]);
        counts_[key] += static_cast<std::int64_t>(freqs_[w]);
        where_[key].push_back(static_cast<int>(w));
      }
    }
    for (const auto& [key, count] : counts_) {
      queue_.insert(Candidate{count, left_of(key), right_of(key)});
    }
  }

  BpeModel run(std::size_t num_merges) {
    std::vector<std::pair<std::string, std::string>> rules;
    rules.reserve(std::min<std::size_t>(num_merges, 1u << 16));
    while (rules.size() < num_merges && !queue_.empty()) {
      const Candidate best = *queue_.begin();
      if (best.count < 2) break;
      rules.emplace_back(symbols_[best.left], symbols_[best.right]);
      merge(best.left, best.right);
    }
    return BpeModel(std::move(rules));
  }

 private:
  struct Candidate {
    std::int64_t count;
    int left;
    int right;
  };

  struct CandidateOrder {
    const std::vector<std::string>* symbols;
    bool operator()(const Candidate& a, const Candidate& b) const {
      if (a.count != b.count) return a.count > b.count;
      if (a.left != b.left) {
        const int c = (*symbols)[a.left].compare((*symbols)[b.left]);
        if (c != 0) return c < 0;
      }
      return (*symbols)[a.right] < (*symbols)[b.right];
    }
  };

  static std::uint64_t pack(int left, int right) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(left)) << 32) |
           static_cast<std::uint32_t>(right);
  }
  static int left_of(std::uint64_t key) { return static_cast<int>(key >> 32); }
  static int right_of(std::uint64_t key) {
    return static_cast<int>(key & 0xffffffffu);
  }

  int intern(const std::string& text) {
    auto [it, inserted] =
        symbol_ids_.emplace(text, static_cast<int>(symbols_.size()));
    if (inserted) symbols_.push_back(text);
    return it->second;
  }

  void merge(int left, int right) {
    const int merged = intern(symbols_[left] + symbols_[right]);
    const std::uint64_t target = pack(left, right);
    std::unordered_map<std::uint64_t, std::int64_t> delta;

    auto node = where_.extract(target);
    ++stamp_;
    for (int w : node.mapped()) {
      if (seen_stamp_[w] == stamp_) continue;
      seen_stamp_[w] = stamp_;
      auto& s = words_[w];
      std::vector<int> out;
      out.reserve(s.size());
      bool changed = false;
      for (std::size_t i = 0; i < s.size();) {
        if (i + 1 < s.size() && s[i] == left && s[i + 1] == right) {
          out.push_back(merged);
          i += 2;
          changed = true;
        } else {
          out.push_back(s[i++]);
        }
      }
      if (!changed) continue;
      const auto f = static_cast<std::int64_t>(freqs_[w]);
      for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        delta[pack(s[i], s[i + 1])] -= f;
      }
      for (std::size_t i = 0; i + 1 < out.size(); ++i) {
        const std::uint64_t key = pack(out[i], out[i + 1]);
        delta[key] += f;
        if (out[i] == merged || out[i + 1] == merged) {
          where_[key].push_back(w);
        }
      }
      s = std::move(out);
    }

    for (const auto& [key, d] : delta) {
      if (d == 0) continue;
      auto it = counts_.find(key);
      const std::int64_t old = it == counts_.end() ? 0 : it->second;
      const std::int64_t now = old + d;
      if (old > 0) queue_.erase(Candidate{old, left_of(key), right_of(key)});
      if (now > 0) {
        counts_[key] = now;
        queue_.insert(Candidate{now, left_of(key), right_of(key)});
      } else if (it != counts_.end()) {
        counts_.erase(it);
      }
    }
  }

  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> symbol_ids_;
  std::vector<std::vector<int>> words_;
  std::vector<std::uint64_t> freqs_;
  std::unordered_map<std::uint64_t, std::int64_t> counts_;
  std::unordered_map<std::uint64_t, std::vector<int>> where_;
  std::set<Candidate, CandidateOrder> queue_{CandidateOrder{&symbols_}};
  std::vector<std::uint64_t> seen_stamp_;
  std::uint64_t stamp_ = 0;
};

}  // namespace

BpeModel learn_bpe(const WordCounts& words, std::size_t num_merges) {
  if (words.empty()) throw EmptyInput("cannot learn BPE from zero tokens");
  Learner learner(words);
  return learner.run(num_merges);
}

BpeModel learn_bpe(const TokenStream& tokens, std::size_t num_merges) {
  return learn_bpe(count_words(tokens), num_merges);
}

std::vector<std::string> apply_bpe_word(const BpeModel& model,
                                        std::string_view word) {
  if (word.empty()) return {};
  std::vector<std::string> symbols = text::split_chars(escape_word(word));
  symbols.emplace_back(kEndOfWord);

  while (symbols.size() > 1) {
    std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      if (auto r = model.rank(symbols[i], symbols[i + 1]); r && *r < best) {
        best = *r;
      }
    }
    if (best == std::numeric_limits<std::uint32_t>::max()) break;
    const MergeRule& rule = model.merges()[best];
    std::vector<std::string> next;
    next.reserve(symbols.size());
    for (std::size_t i = 0; i < symbols.size();) {
      if (i + 1 < symbols.size() && symbols[i] == rule.left &&
          symbols[i + 1] == rule.right) {
        next.push_back(symbols[i] + symbols[i + 1]);
        i += 2;
      } else {
        next.push_back(std::move(symbols[i++]));
      }
    }
    symbols = std::move(next);
  }

  if (symbols.back() == kEndOfWord) {
    symbols.pop_back();
  } else {
    symbols.back().resize(symbols.back().size() - kEndOfWord.size());
  }
  for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
    symbols[i].append(kContinuationMarker);
  }
  return symbols;
}

std::size_t SegmentedStream::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

const std::vector<std::string>& Segmenter::segment_word(
    const std::string& word) {
  auto it = cache_.find(word);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(word, apply_bpe_word(*model_, word)).first->second;
}

Sentence Segmenter::segment(const Sentence& words) {
  Sentence out;
  out.reserve(words.size() * 2);
  for (const auto& word : words) {
    const auto& pieces = segment_word(word);
    out.insert(out.end(), pieces.begin(), pieces.end());
  }
  return out;
}

SegmentedStream apply_bpe_corpus(const BpeModel& model,
                                 const TokenStream& tokens, unsigned threads) {
  SegmentedStream out;
  const std::size_t n = tokens.sentences.size();
  out.sentences.resize(n);
  threads = std::max(1u, std::min<unsigned>(threads, n / 256 + 1));
  auto work = [&](std::size_t begin, std::size_t end) {
    Segmenter segmenter(model);
    for (std::size_t i = begin; i < end; ++i) {
      out.sentences[i] = segmenter.segment(tokens.sentences[i]);
    }
  };
  if (threads == 1) {
    work(0, n);
    return out;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(work, begin, end);
  }
  for (auto& th : pool) th.join();
  return out;
}

Sentence desegment(std::span<const std::string> subwords) {
  Sentence words;
  std::string current;
  bool open = false;
  for (const auto& piece : subwords) {
    if (piece.ends_with(kContinuationMarker)) {
      current.append(piece, 0, piece.size() - kContinuationMarker.size());
      open = true;
    } else {
      current.append(piece);
      words.push_back(unescape_word(current));
      current.clear();
      open = false;
    }
  }
  if (open) {
    throw DanglingMarker("final subword '" + subwords.back() +
                         "' carries the continuation marker");
  }
  return words;
}

void write_bpe(std::ostream& out, const BpeModel& model) {
  out << kBpeHeader << '\n';
  for (const auto& rule : model.merges()) {
    out << rule.left << ' ' << rule.right << '\n';
  }
  if (!out) throw IoFailure("write failed");
}

BpeModel read_bpe(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kBpeHeader) {
    throw FormatError("missing header '" + std::string(kBpeHeader) + "'", 1);
  }
  std::vector<std::pair<std::string, std::string>> rules;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!text::is_valid_utf8(line)) {
      throw FormatError("invalid UTF-8 in merge rule", line_no);
    }
    const std::size_t space = line.find(' ');
    if (space == std::string::npos || space == 0 ||
        space + 1 >= line.size() ||
        line.find(' ', space + 1) != std::string::npos) {
      throw FormatError("expected 'left right'", line_no);
    }
    rules.emplace_back(line.substr(0, space), line.substr(space + 1));
  }
  if (in.bad()) throw IoFailure("read failed");
  return BpeModel(std::move(rules));
}

void save_bpe(const BpeModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open '" + path.string() + "' for writing");
  write_bpe(out, model);
  out.close();
  if (!out) throw IoFailure("write failed for '" + path.string() + "'");
}

BpeModel load_bpe(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open '" + path.string() + "' for reading");
  try {
    return read_bpe(in);
  } catch (const FormatError& e) {
    throw e.prefixed(path.string() + ": ");
  }
}

}  // namespace subvoc
