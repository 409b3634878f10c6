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

#include "subvoc/cli.h"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "subvoc/bpe.h"
#include "subvoc/corpus_io.h"
#include "subvoc/error.h"
#include "subvoc/metrics.h"
#include "subvoc/planner.h"
#include "subvoc/significance.h"
#include "subvoc/vocab.h"

namespace subvoc::cli {

namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kDefaultSeed = 12345;

struct Options {
  bool quiet = false;
  unsigned threads = 1;

  std::string input;
  std::string output;
  std::string model;
  std::string stream_in = "-";
  std::string stream_out = "-";
  std::size_t merges = kDefaultMerges;

  CorpusPaths corpora;
  std::string out_dir;
  std::string direction = "forward";
  std::string cache_dir;
  std::vector<std::string> manifests;

  std::string hyp;
  std::string ref;
  bool lowercase = true;
  std::string label;
  std::string test_set;

  std::string report_a;
  std::string report_b;
  std::vector<std::string> reports;
  std::size_t iterations = 1000;
  std::size_t sample_size = 300;
  std::uint64_t seed = kDefaultSeed;
  std::string metric = "all";

  std::string vocab;
  std::vector<std::string> vocabs;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  const char* env = std::getenv("SUBVOC_SEED");
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  std::uint64_t seed = 0;
  const char* end = env + std::char_traits<char>::length(env);
  auto [ptr, ec] = std::from_chars(env, end, seed);
  if (ec != std::errc() || ptr != end) {
    throw UsageError("SUBVOC_SEED must be a non-negative integer");
  }
  return seed;
}

void write_json_file(const fs::path& path, const nlohmann::json& j,
                     std::ostream& out) {
  if (path == "-") {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoFailure("cannot open '" + path.string() + "' for writing");
  file << j.dump(2) << '\n';
  file.close();
  if (!file) throw IoFailure("write failed for '" + path.string() + "'");
}

std::vector<Metric> selected_metrics(const std::string& name) {
  if (name == "all") return {Metric::kBleu, Metric::kTer, Metric::kChrf};
  return {parse_metric(name)};
}

std::string one_decimal(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(1) << display_score(v);
  return ss.str();
}

SegmentedStream read_segmented(const fs::path& path) {
  return SegmentedStream{tokenize_lines(read_lines(path)).sentences};
}

// ---- commands ----

int cmd_learn_bpe(const Options& o, std::ostream& out) {
  const TokenStream tokens = tokenize_lines(read_lines(o.input));
  const BpeModel model = learn_bpe(tokens, o.merges);
  save_bpe(model, o.output);
  if (!o.quiet) {
    out << "learned " << model.size() << " merges from " << tokens.token_count()
        << " tokens -> " << o.output << '\n';
  }
  return kOk;
}

int cmd_apply_bpe(const Options& o, std::istream& in, std::ostream& out) {
  const BpeModel model = load_bpe(o.model);
  const std::vector<std::string> lines =
      o.stream_in == "-" ? read_lines(in) : read_lines(fs::path(o.stream_in));
  const SegmentedStream seg = apply_bpe_corpus(model, tokenize_lines(lines), o.threads);
  std::vector<std::string> joined;
  joined.reserve(seg.sentences.size());
  for (const auto& sentence : seg.sentences) {
    std::string line;
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      if (i) line.push_back(' ');
      line += sentence[i];
    }
    joined.push_back(std::move(line));
  }
  if (o.stream_out == "-") {
    write_lines(out, joined);
  } else {
    write_lines(fs::path(o.stream_out), joined);
  }
  return kOk;
}

int cmd_plan(const Options& o, std::ostream& out) {
  const Direction direction = parse_direction(o.direction);
  const fs::path out_dir = o.out_dir;
  const fs::path cache = o.cache_dir.empty() ? out_dir / "cache" : fs::path(o.cache_dir);
  std::vector<ExperimentManifest> manifests;
  for (const ConfigTriple& t : filter_valid(enumerate_all())) {
    manifests.push_back(build_manifest(t, o.corpora, out_dir, direction, o.merges, cache));
  }
  std::sort(manifests.begin(), manifests.end(),
            [](const ExperimentManifest& a, const ExperimentManifest& b) {
              return natural_less(a.config_id, b.config_id);
            });
  fs::create_directories(out_dir);
  for (const auto& m : manifests) {
    save_manifest(m, out_dir / (m.config_id + ".json"));
    if (!o.quiet) {
      out << std::left << std::setw(5) << m.config_id << to_string(m.triple) << "  "
          << direction_name(direction) << '\n';
    }
  }
  return kOk;
}

int cmd_prepare(const Options& o, std::ostream& out) {
  for (const auto& path : o.manifests) {
    const ExperimentManifest m = load_manifest(path);
    const PrepareResult r = prepare(m, {o.threads});
    if (o.quiet) continue;
    for (Side side : kBothSides) {
      const SidePreparation& s = r.side(side);
      out << r.config_id << ' ' << side_name(side) << ": models";
      for (DataSource src : s.models) out << ' ' << source_name(src);
      out << " (learned " << s.learned.size() << "), vocab " << s.vocab_size
          << ", token coverage " << std::fixed << std::setprecision(4)
          << s.token_coverage << std::defaultfloat << '\n';
    }
  }
  return kOk;
}

int cmd_score(const Options& o, std::ostream& out) {
  const auto pairs = load_eval_pairs(o.hyp, o.ref);
  MetricOptions options;
  options.lowercase = o.lowercase;
  ScoreReport report = score_pairs(pairs, options);
  report.label = o.label.empty() ? fs::path(o.hyp).filename().string() : o.label;
  report.test_set = o.test_set.empty() ? fs::path(o.ref).filename().string() : o.test_set;
  if (!o.output.empty()) write_json_file(o.output, to_json(report), out);
  if (!o.quiet) {
    out << report.label << " on " << report.test_set << ": BLEU = "
        << one_decimal(report.bleu) << ", TER = " << one_decimal(report.ter)
        << ", chrF2 = " << one_decimal(report.chrf2) << '\n';
  }
  return kOk;
}

BootstrapOptions bootstrap_options(const Options& o) {
  BootstrapOptions b;
  b.iterations = o.iterations;
  b.sample_size = o.sample_size;
  b.seed = o.seed;
  b.threads = o.threads;
  return b;
}

ScoreReport load_resamplable(const std::string& path) {
  ScoreReport r = load_score_report(path);
  if (r.segments.empty()) {
    throw FormatError(path + ": report has no per-segment statistics", 0);
  }
  return r;
}

int cmd_compare(const Options& o, std::ostream& out) {
  const ScoreReport a = load_resamplable(o.report_a);
  const ScoreReport b = load_resamplable(o.report_b);
  if (!(a.options == b.options)) {
    throw InvalidConfig("reports were scored with different settings");
  }
  nlohmann::json results = nlohmann::json::array();
  for (Metric metric : selected_metrics(o.metric)) {
    const BootstrapResult r =
        paired_bootstrap(a.segments, b.segments, metric, a.options, bootstrap_options(o));
    results.push_back(to_json(r));
    if (!o.quiet) out << render_bootstrap(r, a.label, b.label);
  }
  if (!o.output.empty()) {
    write_json_file(o.output,
                    {{"a", a.label}, {"b", b.label}, {"test_set", a.test_set},
                     {"results", results}},
                    out);
  }
  return kOk;
}

int cmd_matrix(const Options& o, std::ostream& out) {
  std::vector<LabeledSystem> systems;
  MetricOptions options;
  for (std::size_t i = 0; i < o.reports.size(); ++i) {
    ScoreReport r = load_resamplable(o.reports[i]);
    if (i == 0) {
      options = r.options;
    } else if (!(r.options == options)) {
      throw InvalidConfig("reports were scored with different settings");
    }
    systems.push_back({r.label, std::move(r.segments)});
  }
  nlohmann::json matrices = nlohmann::json::array();
  for (Metric metric : selected_metrics(o.metric)) {
    const SignificanceMatrix m =
        significance_matrix(systems, metric, options, bootstrap_options(o));
    matrices.push_back(to_json(m));
    if (!o.quiet) out << render_matrix(m);
  }
  if (!o.output.empty()) {
    write_json_file(o.output,
                    {{"seed", o.seed},
                     {"iterations", o.iterations},
                     {"sample_size", o.sample_size},
                     {"rng", kRngName},
                     {"matrices", matrices}},
                    out);
  }
  return kOk;
}

int cmd_rank(const Options& o, std::ostream& out) {
  RankInput input;
  std::set<std::string> column_names;
  std::map<std::string, std::size_t> row_of;
  for (const auto& path : o.reports) {
    const ScoreReport r = load_score_report(path);
    auto [it, inserted] = row_of.emplace(r.label, input.rows.size());
    if (inserted) input.rows.push_back({r.label, {}});
    RankRow& row = input.rows[it->second];
    for (Metric metric : {Metric::kBleu, Metric::kTer, Metric::kChrf}) {
      const std::string column = r.test_set + "/" + std::string(metric_name(metric));
      if (column_names.insert(column).second) input.columns.push_back({column, metric});
      if (!row.scores.emplace(column, r.score(metric)).second) {
        throw InvalidConfig("two reports for '" + r.label + "' on '" + r.test_set + "'");
      }
    }
  }
  const RankTable table = rank_systems(input);
  if (!o.output.empty()) write_json_file(o.output, to_json(table), out);
  if (!o.quiet) out << render_rank_table(table);
  return kOk;
}

int cmd_vocab_build(const Options& o, std::ostream& out) {
  const Vocabulary v = build_vocab(read_segmented(o.input));
  save_vocab(v, o.output);
  if (!o.quiet) out << v.size() << " types, " << v.total_count() << " tokens\n";
  return kOk;
}

int cmd_vocab_merge(const Options& o, std::ostream& out) {
  Vocabulary v;
  for (const auto& path : o.vocabs) v = merge_vocab(v, load_vocab(path));
  save_vocab(v, o.output);
  if (!o.quiet) out << v.size() << " types, " << v.total_count() << " tokens\n";
  return kOk;
}

int cmd_vocab_coverage(const Options& o, std::ostream& out) {
  const CoverageReport r = coverage(load_vocab(o.vocab), read_segmented(o.input));
  if (!o.output.empty()) write_json_file(o.output, to_json(r), out);
  if (!o.quiet) {
    out << "token coverage " << std::fixed << std::setprecision(4) << r.token_coverage
        << ", type coverage " << r.type_coverage << std::defaultfloat << ", "
        << r.oov_types.size() << " OOV types\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Subword vocabulary planning and MT evaluation toolkit", "subvoc"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("-q,--quiet", o.quiet, "Suppress human-readable output");

  try {
    o.seed = default_seed();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  auto* learn = app.add_subcommand("learn-bpe", "Learn BPE merges from a text file");
  learn->add_option("--input", o.input, "Tokenized text, one sentence per line")
      ->required();
  learn->add_option("--output", o.output, "Model file to write")->required();
  learn->add_option("--merges", o.merges, "Number of merge operations")
      ->capture_default_str();

  auto* apply = app.add_subcommand("apply-bpe", "Segment text with a BPE model");
  apply->add_option("--model", o.model, "BPE model file")->required();
  apply->add_option("--input", o.stream_in, "Input text, '-' for stdin")->capture_default_str();
  apply->add_option("--output", o.stream_out, "Output text, '-' for stdout")
      ->capture_default_str();
  apply->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* plan = app.add_subcommand("plan", "Write the C1..C11 experiment manifests");
  plan->add_option("--d-source", o.corpora.d_source, "Original data, source side")->required();
  plan->add_option("--d-target", o.corpora.d_target, "Original data, target side")->required();
  plan->add_option("--e-source", o.corpora.e_source, "Fine-tuning data, source side")->required();
  plan->add_option("--e-target", o.corpora.e_target, "Fine-tuning data, target side")->required();
  plan->add_option("--out-dir", o.out_dir, "Directory for manifests and artifacts")->required();
  plan->add_option("--direction", o.direction, "forward or reverse")
      ->check(CLI::IsMember({"forward", "reverse"}))
      ->capture_default_str();
  plan->add_option("--merges", o.merges, "Merge operations per side")->capture_default_str();
  plan->add_option("--cache-dir", o.cache_dir, "Model cache (default <out-dir>/cache)");

  auto* prep = app.add_subcommand("prepare", "Materialize the artifacts of manifests");
  prep->add_option("--manifest", o.manifests, "Manifest file(s)")->required();
  prep->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* score = app.add_subcommand("score", "Score a hypothesis file against references");
  score->add_option("--hyp", o.hyp, "Hypothesis file")->required();
  score->add_option("--ref", o.ref, "Reference file")->required();
  score->add_flag("--lowercase,!--no-lowercase", o.lowercase,
                  "Case-insensitive scoring (default on)");
  score->add_option("--output", o.output, "JSON report path, '-' for stdout");
  score->add_option("--label", o.label, "System label (default: hypothesis file name)");
  score->add_option("--test-set", o.test_set, "Test set name (default: reference file name)");

  const auto metric_check = CLI::IsMember({"bleu", "ter", "chrf2", "all"});
  auto add_bootstrap_flags = [&](CLI::App* cmd) {
    cmd->add_option("--iterations", o.iterations, "Bootstrap iterations")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--sample-size", o.sample_size, "Segments drawn per iteration")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "Random seed (default: $SUBVOC_SEED or 12345)");
    cmd->add_option("--metric", o.metric, "bleu, ter, chrf2 or all")
        ->check(metric_check)
        ->capture_default_str();
    cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--output", o.output, "JSON output path, '-' for stdout");
  };

  auto* compare = app.add_subcommand("compare", "Paired bootstrap test of two reports");
  compare->add_option("--report-a", o.report_a, "First score report")->required();
  compare->add_option("--report-b", o.report_b, "Second score report")->required();
  add_bootstrap_flags(compare);

  auto* matrix = app.add_subcommand("matrix", "Pairwise significance over many reports");
  matrix->add_option("--reports", o.reports, "Score reports on one test set")
      ->required()
      ->expected(2, -1);
  add_bootstrap_flags(matrix);

  auto* rank = app.add_subcommand("rank", "Rank systems over score reports");
  rank->add_option("--reports", o.reports, "Score reports")->required()->expected(1, -1);
  rank->add_option("--output", o.output, "JSON output path, '-' for stdout");

  auto* vocab = app.add_subcommand("vocab", "Vocabulary tools");
  vocab->require_subcommand(1);
  auto* vbuild = vocab->add_subcommand("build", "Count tokens of segmented text");
  vbuild->add_option("--input", o.input, "Segmented text")->required();
  vbuild->add_option("--output", o.output, "Vocabulary file")->required();
  auto* vmerge = vocab->add_subcommand("merge", "Add up vocabularies");
  vmerge->add_option("--inputs", o.vocabs, "Vocabulary files")->required()->expected(1, -1);
  vmerge->add_option("--output", o.output, "Vocabulary file")->required();
  auto* vcov = vocab->add_subcommand("coverage", "Coverage of segmented text");
  vcov->add_option("--vocab", o.vocab, "Vocabulary file")->required();
  vcov->add_option("--input", o.input, "Segmented text")->required();
  vcov->add_option("--output", o.output, "JSON report path, '-' for stdout");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (learn->parsed()) return cmd_learn_bpe(o, out);
    if (apply->parsed()) return cmd_apply_bpe(o, in, out);
    if (plan->parsed()) return cmd_plan(o, out);
    if (prep->parsed()) return cmd_prepare(o, out);
    if (score->parsed()) return cmd_score(o, out);
    if (compare->parsed()) return cmd_compare(o, out);
    if (matrix->parsed()) return cmd_matrix(o, out);
    if (rank->parsed()) return cmd_rank(o, out);
    if (vbuild->parsed()) return cmd_vocab_build(o, out);
    if (vmerge->parsed()) return cmd_vocab_merge(o, out);
    if (vcov->parsed()) return cmd_vocab_coverage(o, out);
    err << app.help();
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace subvoc::cli
