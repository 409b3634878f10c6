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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "subvoc/bpe.h"
#include "subvoc/cli.h"
#include "subvoc/corpus_io.h"
#include "subvoc/metrics.h"
#include "subvoc/planner.h"
#include "subvoc/significance.h"
#include "subvoc/vocab.h"
#include "support.h"

namespace subvoc {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail << "failed: " << what << "; ";
    }
  }
};

using Criterion = std::function<void(Check&)>;

void ac1(Check& c) {
  const auto start = Clock::now();
  const auto all = enumerate_all();
  const auto valid = filter_valid(all);
  const double elapsed = seconds_since(start);
  c.require(all.size() == 27, "27 triples");
  using S = DataSource;
  const std::vector<ConfigTriple> expected = {
      {S::kD, S::kD, S::kD},  {S::kE, S::kE, S::kE},   {S::kD, S::kE, S::kD},
      {S::kE, S::kD, S::kE},  {S::kD, S::kD, S::kE},   {S::kE, S::kD, S::kD},
      {S::kD, S::kE, S::kE},  {S::kE, S::kE, S::kD},   {S::kD, S::kDE, S::kD},
      {S::kE, S::kDE, S::kE}, {S::kDE, S::kDE, S::kDE}};
  const std::set<ConfigTriple> got(valid.begin(), valid.end());
  c.require(valid.size() == 11 && got == std::set<ConfigTriple>(expected.begin(), expected.end()),
            "valid set");
  for (std::size_t i = 0; i < expected.size(); ++i) {
    c.require(canonical_id(expected[i]) == "C" + std::to_string(i + 1),
              "id of " + to_string(expected[i]));
  }
  c.require(elapsed < 1e-3, "under 1 ms");
  c.detail << "27 -> " << valid.size() << " valid in " << elapsed * 1e6 << " us";
}

void ac2(Check& c) {
  const auto start = Clock::now();
  const RankTable t = rank_systems(testing::published_rank_input());
  const double elapsed = seconds_since(start);
  c.require(t.ordering.size() == 11, "11 systems");
  c.require(t.ordering.size() >= 3 && t.ordering[0] == "C3" && t.ordering[1] == "C1" &&
                t.ordering[2] == "C9",
            "top three C3, C1, C9");
  c.require(elapsed < 1.0, "under 1 s");
  int matches = 0;
  for (std::size_t i = 0; i < t.ordering.size() && i < 11; ++i) {
    if (t.ordering[i] == testing::kPublishedOrder[i]) ++matches;
  }
  c.detail << "order";
  for (const auto& l : t.ordering) c.detail << ' ' << l;
  c.detail << "; full-order positions matching published: " << matches << "/11";
}

void ac3(Check& c) {
  const auto start = Clock::now();
  auto lines = testing::synthetic_lines(10000, 303, {20000, 10, 30, 1.05});
  lines.push_back("odd@@ a@@b @@ @ & &amp; &#64; </w> x</w> <> @@@");
  const TokenStream tokens = tokenize_lines(lines);
  std::size_t words = 0;
  for (std::size_t merges : {0u, 100u, 10000u}) {
    const BpeModel m = learn_bpe(tokens, merges);
    c.require(m.size() <= merges, "model size");
    Segmenter seg(m);
    for (const auto& sentence : tokens.sentences) {
      for (const auto& w : sentence) {
        ++words;
        const auto& pieces = seg.segment_word(w);
        const Sentence back = desegment(pieces);
        if (back.size() != 1 || back[0] != w) {
          c.require(false, "round trip of '" + w + "' with " + std::to_string(merges));
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  c.require(elapsed < 30.0, "under 30 s");
  c.detail << lines.size() << " lines, " << words << " word checks in " << std::fixed
           << std::setprecision(2) << elapsed << " s";
}

void ac4(Check& c) {
  std::mt19937_64 rng(404);
  std::size_t merges_checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const WordCounts table = testing::random_word_table(rng, 20);
    c.require(table.size() <= 20, "table size");
    const auto expected = testing::brute_force_bpe(table, 1000);
    const BpeModel got = learn_bpe(table, 1000);
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& r : got.merges()) pairs.emplace_back(r.left, r.right);
    c.require(pairs == expected, "table " + std::to_string(trial));
    merges_checked += expected.size();
  }
  c.detail << "100 tables, " << merges_checked << " merges compared";
}

void ac5(Check& c) {
  const auto lines = testing::synthetic_lines(100000, 505);
  const TokenStream tokens = tokenize_lines(lines);
  const auto start = Clock::now();
  const BpeModel model = learn_bpe(tokens, 10000);
  const double learn_s = seconds_since(start);
  const auto apply_start = Clock::now();
  const SegmentedStream seg = apply_bpe_corpus(model, tokens);
  const double apply_s = seconds_since(apply_start);
  const double rate = static_cast<double>(tokens.token_count()) / apply_s;
  c.require(model.size() == 10000, "10000 merges learned");
  c.require(learn_s < 60.0, "learn under 60 s");
  c.require(rate >= 50000.0, "apply at 50k tokens/s");
  c.require(seg.sentences.size() == tokens.sentences.size(), "segmented all lines");
  c.detail << tokens.token_count() << " tokens; learn " << std::fixed << std::setprecision(2)
           << learn_s << " s; apply " << std::setprecision(0) << rate << " tokens/s";
}

struct Oracle {
  const char* hyp;
  const char* ref;
  double bleu;
  double chrf;
  double ter;
};

// sacreBLEU 2.4.3 values (lowercased, no smoothing; TER on 13a tokens).
constexpr Oracle kOracles[] = {
    {"The cat sat on the mat.", "The cat sat on the mat.", 100.0, 100.0, 0.0},
    {"the cat is on the mat", "there is a cat on the mat", 0.0, 47.892408356241575,
     42.857142857142854},
    {"A quick brown fox jumps over the lazy dog.",
     "The quick brown fox jumped over the lazy dog.", 52.53819788848316,
     79.33947913393432, 20.0},
    {"He said: \"no way!\"", "He said, \"No way.\"", 0.0, 54.332889332889344, 25.0},
    {"It costs 3.50 dollars, not 4,000.", "It costs 3.50 dollars and not 4,000.",
     50.000000000000014, 80.70594893945017, 12.5},
    {"b a", "a b", 0.0, 50.0, 50.0},
    {"The meeting is at 10-11 am tomorrow.", "Tomorrow the meeting is at 10-11 am.",
     80.34284189446517, 87.39059641933204, 10.0},
    {"Das ist ein kleines Haus.", "Das Haus ist klein.", 0.0, 47.74873495153064, 60.0},
    {"Caf\xC3\xA9 au lait, s'il vous pla\xC3\xAEt.",
     "Un caf\xC3\xA9 au lait, s'il vous pla\xC3\xAEt !", 74.20884818558928,
     89.15749687335048, 22.22222222222222},
    {"we went to the market and bought some apples and pears",
     "we bought apples and pears at the market", 0.0, 68.46589804268294, 75.0},
    {"THE PATIENT SHOULD TAKE TWO TABLETS DAILY",
     "the patient should take two tablets every day", 70.1396726799769,
     80.54059601966715, 25.0},
    {"one two three four five six seven eight nine ten",
     "one two three four five six seven eight nine eleven", 88.01117367933934,
     87.30927055325036, 10.0},
};

void ac6(Check& c) {
  testing::TempDir dir;
  testing::write_file(dir / "same.txt", [] {
    std::string s;
    for (const auto& l : testing::synthetic_lines(500, 606)) s += l + "\n";
    return s;
  }());
  const ScoreReport same =
      score_pairs(load_eval_pairs(dir / "same.txt", dir / "same.txt"));
  c.require(same.bleu == 100.0, "identity BLEU");
  c.require(same.chrf2 == 100.0, "identity chrF2");
  c.require(same.ter == 0.0, "identity TER");
  std::size_t checked = 0;
  double worst = 0;
  for (const auto& o : kOracles) {
    const std::vector<EvalPair> one = {{o.hyp, o.ref}};
    const ScoreReport r = score_pairs(one);
    for (auto [got, want] : {std::pair{r.bleu, o.bleu}, {r.chrf2, o.chrf}, {r.ter, o.ter}}) {
      worst = std::max(worst, std::abs(got - want));
      c.require(std::abs(got - want) <= 0.01, std::string("fixture '") + o.hyp + "'");
      ++checked;
    }
  }
  c.require(chrf_from_stats(chrf_segment("abc", "abd")) - 100.0 * 7 / 18 < 0.01,
            "chrF abc/abd");
  c.detail << checked << " fixture values, max deviation " << std::scientific
           << std::setprecision(1) << worst;
}

const char* const kShortTer[][2] = {
    {"b a", "a b"},
    {"a b c", "c a b"},
    {"the cat sat", "sat the cat"},
    {"on the mat the cat", "the cat on the mat"},
    {"a b c d e f", "a b c d e f"},
    {"x b c", "a b c"},
    {"a b c d", "c d a b"},
    {"red big car", "big red car"},
    {"he quickly ran home", "he ran home quickly"},
    {"one two three", "four five six"},
    {"a a b", "b a a"},
    {"the the cat", "the cat the"},
    {"yesterday i saw her", "i saw her yesterday"},
    {"a b", "a b c d e f"},
    {"a b c d e f", "b"},
    {"not very good at all", "not good at all"},
};

std::string join(const std::vector<std::string>& words) {
  std::string s;
  for (const auto& w : words) s += (s.empty() ? "" : " ") + w;
  return s;
}

void ac7(Check& c) {
  std::size_t checked = 0;
  auto check = [&](const std::vector<std::string>& h, const std::vector<std::string>& r) {
    const auto greedy = ter_segment(h, r).edits;
    const auto best = testing::exhaustive_ter_edits(h, r);
    c.require(greedy == best, join(h) + " | " + join(r));
    ++checked;
  };
  for (const auto& f : kShortTer) {
    check(metric_tokens(f[0], true), metric_tokens(f[1], true));
  }
  for (const auto& o : kOracles) {
    const auto h = metric_tokens(o.hyp, true), r = metric_tokens(o.ref, true);
    if (h.size() <= 6 && r.size() <= 6) check(h, r);
  }
  c.detail << checked << " fixtures of six words or fewer";
}

void ac8(Check& c) {
  std::vector<EvalPair> a, b;
  testing::planted_margin_systems(2000, 808, &a, &b);
  const auto sa = testing::segment_stats(a);
  const auto sb = testing::segment_stats(b);
  const BootstrapOptions defaults;
  c.require(defaults.iterations == 1000 && defaults.sample_size == 300, "defaults");
  double slowest = 0;
  for (Metric m : {Metric::kBleu, Metric::kTer, Metric::kChrf}) {
    auto start = Clock::now();
    const BootstrapResult r1 = paired_bootstrap(sa, sb, m);
    slowest = std::max(slowest, seconds_since(start));
    const BootstrapResult r2 = paired_bootstrap(sa, sb, m);
    BootstrapOptions threaded;
    threaded.threads = 4;
    const BootstrapResult r4 = paired_bootstrap(sa, sb, m, {}, threaded);
    c.require(r1 == r2, "repeatable");
    c.require(r1 == r4, "thread invariant");
    c.require(r1.significant && r1.p_value < 0.05, "planted margin significant");
    start = Clock::now();
    const BootstrapResult self = paired_bootstrap(sa, sa, m);
    slowest = std::max(slowest, seconds_since(start));
    c.require(!self.significant, "self comparison");
    c.detail << metric_name(m) << " p=" << r1.p_value << " ";
  }
  c.require(slowest < 5.0, "under 5 s per pair");
  c.detail << "slowest pair " << std::fixed << std::setprecision(3) << slowest << " s";
}

SegmentedStream random_stream(std::mt19937_64& rng) {
  const std::vector<std::string> pieces = {"a", "b@@", "c", "de", "f@@", "gh", "\xC3\xA9", "x"};
  SegmentedStream s;
  const std::size_t n = rng() % 8;
  for (std::size_t i = 0; i < n; ++i) {
    Sentence sentence;
    const std::size_t len = rng() % 7;
    for (std::size_t k = 0; k < len; ++k) sentence.push_back(pieces[rng() % pieces.size()]);
    s.sentences.push_back(std::move(sentence));
  }
  return s;
}

void ac9(Check& c) {
  std::mt19937_64 rng(909);
  for (int trial = 0; trial < 100; ++trial) {
    const SegmentedStream s1 = random_stream(rng);
    const SegmentedStream s2 = random_stream(rng);
    SegmentedStream both = s1;
    both.sentences.insert(both.sentences.end(), s2.sentences.begin(), s2.sentences.end());
    c.require(merge_vocab(build_vocab(s1), build_vocab(s2)) == build_vocab(both),
              "homomorphism " + std::to_string(trial));
    const CoverageReport cov = coverage(build_vocab(both), both);
    c.require(cov.token_coverage == 1.0 && cov.type_coverage == 1.0,
              "self coverage " + std::to_string(trial));
  }
  c.detail << "100 stream pairs";
}

std::map<std::string, std::string> tree_contents(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), root).generic_string();
    // Manifests name their own output directory.
    if (rel.find('/') == std::string::npos && rel.ends_with(".json")) continue;
    out[rel] = testing::read_file(e.path());
  }
  return out;
}

void ac10(Check& c) {
  const auto start = Clock::now();
  testing::TempDir dir;
  auto write = [&](const char* name, std::size_t n, std::uint64_t seed) {
    std::string s;
    for (const auto& l : testing::synthetic_lines(n, seed, {5000, 8, 25, 1.05})) s += l + "\n";
    testing::write_file(dir / name, s);
  };
  write("d.src", 1000, 1);
  write("d.tgt", 1000, 2);
  write("e.src", 300, 3);
  write("e.tgt", 300, 4);

  auto plan_and_prepare = [&](const fs::path& out_dir,
                              std::vector<PrepareResult>* results) {
    std::ostringstream out, err;
    std::istringstream in;
    const int code = cli::run(
        {"plan", "-q", "--d-source", (dir / "d.src").string(), "--d-target",
         (dir / "d.tgt").string(), "--e-source", (dir / "e.src").string(), "--e-target",
         (dir / "e.tgt").string(), "--out-dir", out_dir.string(), "--merges", "2000"},
        in, out, err);
    c.require(code == 0, "plan: " + err.str());
    std::vector<std::string> args = {"prepare", "-q"};
    for (int i = 1; i <= 11; ++i) {
      args.push_back("--manifest");
      args.push_back((out_dir / ("C" + std::to_string(i) + ".json")).string());
    }
    if (results == nullptr) {
      c.require(cli::run(args, in, out, err) == 0, "prepare: " + err.str());
      return;
    }
    for (int i = 1; i <= 11; ++i) {
      results->push_back(
          prepare(load_manifest(out_dir / ("C" + std::to_string(i) + ".json"))));
    }
  };

  std::vector<PrepareResult> results;
  plan_and_prepare(dir / "run1", &results);
  plan_and_prepare(dir / "run2", nullptr);
  const auto first = tree_contents(dir / "run1");
  plan_and_prepare(dir / "run1", nullptr);
  const auto rerun = tree_contents(dir / "run1");
  const auto second = tree_contents(dir / "run2");
  c.require(first == second, "byte-identical across fresh runs");
  c.require(first == rerun, "byte-identical across cached reruns");

  std::set<std::string> artifact_sets;
  std::size_t single_model_configs = 0;
  for (const auto& r : results) {
    const ConfigTriple t = triple_for_id(r.config_id);
    std::string set;
    for (Side side : kBothSides) {
      const std::string prefix = r.config_id + "/";
      for (const char* kind : {"vocab.", "tune."}) {
        set += first.at(prefix + kind + std::string(side_name(side)));
        set.push_back('\0');
      }
      const SidePreparation& s = r.side(side);
      if (t.vocab_bpe == t.tune_bpe) {
        c.require(s.models.size() == 1 && s.learned.size() <= 1,
                  r.config_id + " one model per side");
      } else {
        c.require(s.models.size() == 2, r.config_id + " two models per side");
      }
    }
    if (t.vocab_bpe == t.tune_bpe) ++single_model_configs;
    artifact_sets.insert(set);
  }
  c.require(results.size() == 11 && artifact_sets.size() == 11, "distinct artifact sets");

  // Without a cache every x == z configuration learns exactly one model per side.
  std::size_t learned_once = 0;
  for (const auto& t : canonical_triples()) {
    if (t.vocab_bpe != t.tune_bpe) continue;
    ExperimentManifest m = load_manifest(dir / "run1" / (canonical_id(t) + ".json"));
    const fs::path fresh = dir / "nocache" / m.config_id;
    m = build_manifest(t, m.inputs, fresh, m.direction, m.merges, {});
    const PrepareResult r = prepare(m);
    if (r.source.learned.size() == 1 && r.target.learned.size() == 1) ++learned_once;
  }
  c.require(learned_once == single_model_configs, "x == z learns one model per side");

  const double elapsed = seconds_since(start);
  c.require(elapsed < 120.0, "under 2 min");
  c.detail << artifact_sets.size() << " artifact sets, " << first.size() << " files, "
           << learned_once << " single-model configs; " << std::fixed << std::setprecision(1)
           << elapsed << " s";
}

}  // namespace
}  // namespace subvoc

int main() {
  using subvoc::Check;
  const std::vector<std::pair<const char*, subvoc::Criterion>> criteria = {
      {"AC1 configuration space", subvoc::ac1},
      {"AC2 ranking fixture", subvoc::ac2},
      {"AC3 BPE round trip", subvoc::ac3},
      {"AC4 BPE oracle equivalence", subvoc::ac4},
      {"AC5 BPE performance", subvoc::ac5},
      {"AC6 metric identities and fixtures", subvoc::ac6},
      {"AC7 TER optimality", subvoc::ac7},
      {"AC8 bootstrap", subvoc::ac8},
      {"AC9 vocabulary algebra", subvoc::ac9},
      {"AC10 end-to-end prepare", subvoc::ac10},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Check c;
    try {
      run(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail << "exception: " << e.what();
    }
    if (!c.ok) ++failures;
    std::cout << (c.ok ? "PASS " : "FAIL ") << name << ": " << c.detail.str() << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
