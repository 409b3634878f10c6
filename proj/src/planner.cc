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

#include "subvoc/planner.h"

#include <openssl/evp.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>

#include "subvoc/bpe.h"
#include "subvoc/error.h"
#include "subvoc/vocab.h"

namespace subvoc {

namespace fs = std::filesystem;

std::string_view source_name(DataSource source) {
  switch (source) {
    case DataSource::kD: return "D";
    case DataSource::kE: return "E";
    case DataSource::kDE: return "DE";
  }
  return "?";
}

DataSource parse_source(std::string_view name) {
  for (DataSource s : kAllSources) {
    if (source_name(s) == name) return s;
  }
  throw InvalidConfig("unknown data source '" + std::string(name) + "'");
}

std::string to_string(const ConfigTriple& t) {
  std::string out = "(";
  out += source_name(t.vocab_bpe);
  out += ", ";
  out += source_name(t.vocab_data);
  out += ", ";
  out += source_name(t.tune_bpe);
  out += ")";
  return out;
}

std::vector<ConfigTriple> enumerate_all() {
  std::vector<ConfigTriple> out;
  out.reserve(27);
  for (DataSource x : kAllSources) {
    for (DataSource y : kAllSources) {
      for (DataSource z : kAllSources) out.push_back({x, y, z});
    }
  }
  return out;
}

bool is_valid(const ConfigTriple& t) {
  const bool combined_bpe =
      t.vocab_bpe == DataSource::kDE || t.tune_bpe == DataSource::kDE;
  if (combined_bpe &&
      !(t.vocab_bpe == DataSource::kDE && t.vocab_data == DataSource::kDE &&
        t.tune_bpe == DataSource::kDE)) {
    return false;
  }
  if (t.vocab_data == DataSource::kDE && t.vocab_bpe != t.tune_bpe) return false;
  return true;
}

std::vector<ConfigTriple> filter_valid(std::span<const ConfigTriple> triples) {
  std::vector<ConfigTriple> out;
  std::copy_if(triples.begin(), triples.end(), std::back_inserter(out), is_valid);
  return out;
}

namespace {

using S = DataSource;

constexpr std::array<ConfigTriple, 11> kCanonical = {{
    {S::kD, S::kD, S::kD},
    {S::kE, S::kE, S::kE},
    {S::kD, S::kE, S::kD},
    {S::kE, S::kD, S::kE},
    {S::kD, S::kD, S::kE},
    {S::kE, S::kD, S::kD},
    {S::kD, S::kE, S::kE},
    {S::kE, S::kE, S::kD},
    {S::kD, S::kDE, S::kD},
    {S::kE, S::kDE, S::kE},
    {S::kDE, S::kDE, S::kDE},
}};

}  // namespace

std::string canonical_id(const ConfigTriple& t) {
  if (!is_valid(t)) throw InvalidConfig("invalid configuration " + to_string(t));
  auto it = std::find(kCanonical.begin(), kCanonical.end(), t);
  return "C" + std::to_string(it - kCanonical.begin() + 1);
}

ConfigTriple triple_for_id(std::string_view id) {
  for (std::size_t i = 0; i < kCanonical.size(); ++i) {
    if (id == "C" + std::to_string(i + 1)) return kCanonical[i];
  }
  throw InvalidConfig("unknown configuration id '" + std::string(id) + "'");
}

std::vector<ConfigTriple> canonical_triples() {
  return {kCanonical.begin(), kCanonical.end()};
}

std::string_view direction_name(Direction d) {
  return d == Direction::kForward ? "forward" : "reverse";
}

Direction parse_direction(std::string_view name) {
  if (name == "forward") return Direction::kForward;
  if (name == "reverse") return Direction::kReverse;
  throw InvalidConfig("unknown direction '" + std::string(name) + "'");
}

std::vector<fs::path> ExperimentManifest::output_paths() const {
  std::vector<fs::path> out;
  for (const SideOutputs* s : {&source, &target}) {
    for (const auto& [src, path] : s->bpe) out.push_back(path);
    out.push_back(s->vocab);
    out.push_back(s->tune);
    out.push_back(s->coverage);
  }
  return out;
}

namespace {

std::vector<DataSource> model_sources(const ConfigTriple& t) {
  std::vector<DataSource> out{t.vocab_bpe};
  if (t.tune_bpe != t.vocab_bpe) out.push_back(t.tune_bpe);
  std::sort(out.begin(), out.end());
  return out;
}

SideOutputs side_outputs(const ConfigTriple& t, const fs::path& dir, Side side) {
  const std::string s(side_name(side));
  SideOutputs out;
  for (DataSource src : model_sources(t)) {
    out.bpe[src] = dir / ("bpe." + std::string(source_name(src)) + "." + s);
  }
  out.vocab = dir / ("vocab." + s);
  out.tune = dir / ("tune." + s);
  out.coverage = dir / ("coverage." + s + ".json");
  return out;
}

}  // namespace

void validate_manifest(const ExperimentManifest& m) {
  if (canonical_id(m.triple) != m.config_id) {
    throw InvalidConfig("config id " + m.config_id + " does not match triple " +
                        to_string(m.triple));
  }
  const auto wanted = model_sources(m.triple);
  for (const SideOutputs* s : {&m.source, &m.target}) {
    std::vector<DataSource> have;
    for (const auto& [src, path] : s->bpe) have.push_back(src);
    if (have != wanted) {
      throw InvalidConfig("BPE outputs of " + m.config_id +
                          " do not match its model sources");
    }
  }
  std::set<fs::path> seen;
  for (const auto& p : m.output_paths()) {
    if (p.empty()) throw InvalidConfig("empty output path in " + m.config_id);
    if (!seen.insert(p.lexically_normal()).second) {
      throw InvalidConfig("output path '" + p.string() + "' is used twice");
    }
  }
}

ExperimentManifest build_manifest(const ConfigTriple& t,
                                  const CorpusPaths& inputs,
                                  const fs::path& out_dir, Direction direction,
                                  std::size_t merges, const fs::path& cache_dir) {
  ExperimentManifest m;
  m.config_id = canonical_id(t);
  m.triple = t;
  m.direction = direction;
  m.merges = merges;
  m.inputs = inputs;
  for (const fs::path* p :
       {&inputs.d_source, &inputs.d_target, &inputs.e_source, &inputs.e_target}) {
    if (p->empty() || !fs::exists(*p)) {
      throw MissingPath("input corpus '" + p->string() + "' does not exist");
    }
  }
  const fs::path dir = out_dir / m.config_id;
  m.source = side_outputs(t, dir, Side::kSource);
  m.target = side_outputs(t, dir, Side::kTarget);
  m.cache_dir = cache_dir;
  validate_manifest(m);
  return m;
}

// ---- serialization ----

namespace {

nlohmann::json side_json(const SideOutputs& s) {
  nlohmann::json bpe = nlohmann::json::object();
  for (const auto& [src, path] : s.bpe) bpe[std::string(source_name(src))] = path.string();
  return {{"bpe", bpe},
          {"vocab", s.vocab.string()},
          {"tune", s.tune.string()},
          {"coverage", s.coverage.string()}};
}

SideOutputs side_from_json(const nlohmann::json& j) {
  SideOutputs s;
  for (const auto& [name, path] : j.at("bpe").items()) {
    s.bpe[parse_source(name)] = path.get<std::string>();
  }
  s.vocab = j.at("vocab").get<std::string>();
  s.tune = j.at("tune").get<std::string>();
  s.coverage = j.at("coverage").get<std::string>();
  return s;
}

}  // namespace

nlohmann::json to_json(const ExperimentManifest& m) {
  return {
      {"config_id", m.config_id},
      {"x", source_name(m.triple.vocab_bpe)},
      {"y", source_name(m.triple.vocab_data)},
      {"z", source_name(m.triple.tune_bpe)},
      {"direction", direction_name(m.direction)},
      {"merges", m.merges},
      {"inputs", {{"d_source", m.inputs.d_source.string()},
                  {"d_target", m.inputs.d_target.string()},
                  {"e_source", m.inputs.e_source.string()},
                  {"e_target", m.inputs.e_target.string()}}},
      {"outputs", {{"source", side_json(m.source)},
                   {"target", side_json(m.target)}}},
      {"cache_dir", m.cache_dir.string()},
  };
}

ExperimentManifest manifest_from_json(const nlohmann::json& j) {
  ExperimentManifest m;
  try {
    m.config_id = j.at("config_id").get<std::string>();
    m.triple = {parse_source(j.at("x").get<std::string>()),
                parse_source(j.at("y").get<std::string>()),
                parse_source(j.at("z").get<std::string>())};
    m.direction = parse_direction(j.at("direction").get<std::string>());
    m.merges = j.value("merges", kDefaultMerges);
    const auto& in = j.at("inputs");
    m.inputs = {in.at("d_source").get<std::string>(),
                in.at("d_target").get<std::string>(),
                in.at("e_source").get<std::string>(),
                in.at("e_target").get<std::string>()};
    m.source = side_from_json(j.at("outputs").at("source"));
    m.target = side_from_json(j.at("outputs").at("target"));
    m.cache_dir = j.value("cache_dir", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what(), 0);
  }
  validate_manifest(m);
  return m;
}

void save_manifest(const ExperimentManifest& m, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open '" + path.string() + "' for writing");
  out << to_json(m).dump(2) << '\n';
  out.close();
  if (!out) throw IoFailure("write failed for '" + path.string() + "'");
}

ExperimentManifest load_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingPath("cannot open manifest '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": invalid JSON: " + e.what(), 0);
  }
  try {
    return manifest_from_json(j);
  } catch (const FormatError& e) {
    throw e.prefixed(path.string() + ": ");
  }
}

// ---- preparation ----

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

namespace {

std::string joined(std::span<const std::string> lines) {
  std::string out;
  for (const auto& line : lines) {
    out += line;
    out.push_back('\n');
  }
  return out;
}

// Written under a unique temporary name, then renamed into place, so
// concurrent writers of one cache key never expose a partial file.
void write_file_atomic(const fs::path& path, std::string_view bytes) {
  static std::atomic<unsigned> counter{0};
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoFailure("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoFailure("cannot rename into '" + path.string() + "'");
  }
}

std::string model_bytes(const BpeModel& model) {
  std::ostringstream ss;
  write_bpe(ss, model);
  return ss.str();
}

std::string vocab_bytes(const Vocabulary& v) {
  std::ostringstream ss;
  write_vocab(ss, v);
  return ss.str();
}

std::string segmented_bytes(const SegmentedStream& s) {
  std::string out;
  for (const auto& sentence : s.sentences) {
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      if (i) out.push_back(' ');
      out += sentence[i];
    }
    out.push_back('\n');
  }
  return out;
}

class Preparer {
 public:
  Preparer(const ExperimentManifest& m, const PrepareOptions& options)
      : m_(m), options_(options) {}

  PrepareResult run() {
    const bool reverse = m_.direction == Direction::kReverse;
    const auto& in = m_.inputs;
    ParallelCorpus d = load_corpus(reverse ? in.e_source : in.d_source,
                                   reverse ? in.e_target : in.d_target, "D");
    ParallelCorpus e = load_corpus(reverse ? in.d_source : in.e_source,
                                   reverse ? in.d_target : in.e_target, "E");
    ParallelCorpus de = concat_corpora(d, e);
    corpora_[DataSource::kD] = &d;
    corpora_[DataSource::kE] = &e;
    corpora_[DataSource::kDE] = &de;

    if (!m_.cache_dir.empty()) fs::create_directories(m_.cache_dir);
    result_.config_id = m_.config_id;
    try {
      for (Side side : kBothSides) prepare_side(side);
    } catch (...) {
      cleanup();
      throw;
    }
    return std::move(result_);
  }

 private:
  const std::vector<std::string>& lines(DataSource src, Side side) const {
    return corpora_.at(src)->lines(side);
  }

  std::string data_digest(DataSource src, Side side) {
    auto key = std::make_pair(src, side);
    auto it = digests_.find(key);
    if (it != digests_.end()) return it->second;
    return digests_[key] = sha256_hex(joined(lines(src, side)));
  }

  void write_output(const fs::path& path, std::string_view bytes) {
    if (path.has_parent_path()) {
      fs::path parent = path.parent_path();
      if (!fs::exists(parent)) {
        fs::create_directories(parent);
        created_dirs_.push_back(parent);
      }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open '" + path.string() + "' for writing");
    result_.written.push_back(path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw IoFailure("write failed for '" + path.string() + "'");
  }

  void cleanup() {
    std::error_code ec;
    for (const auto& p : result_.written) fs::remove(p, ec);
    result_.written.clear();
    for (auto it = created_dirs_.rbegin(); it != created_dirs_.rend(); ++it) {
      if (fs::is_empty(*it, ec)) fs::remove(*it, ec);
    }
  }

  BpeModel model_for(DataSource src, Side side, SidePreparation& prep,
                     std::string* key_out) {
    const std::string key =
        sha256_hex("bpe\n" + data_digest(src, side) + "\n" +
                   std::string(side_name(side)) + "\n" + std::to_string(m_.merges));
    *key_out = key;
    const fs::path cached =
        m_.cache_dir.empty() ? fs::path() : m_.cache_dir / ("bpe-" + key);
    if (!cached.empty() && fs::exists(cached)) return load_bpe(cached);
    BpeModel model = learn_bpe(tokenize_lines(lines(src, side)), m_.merges);
    prep.learned.push_back(src);
    if (!cached.empty()) write_file_atomic(cached, model_bytes(model));
    return model;
  }

  void prepare_side(Side side) {
    const ConfigTriple& t = m_.triple;
    const SideOutputs& out = m_.outputs(side);
    SidePreparation& prep = side == Side::kSource ? result_.source : result_.target;

    std::map<DataSource, BpeModel> models;
    std::map<DataSource, std::string> keys;
    for (DataSource src : model_sources(t)) {
      prep.models.push_back(src);
      models[src] = model_for(src, side, prep, &keys[src]);
      write_output(out.bpe.at(src), model_bytes(models[src]));
    }

    const std::string vocab_key = sha256_hex("vocab\n" + keys[t.vocab_bpe] + "\n" +
                                             data_digest(t.vocab_data, side));
    const fs::path cached_vocab =
        m_.cache_dir.empty() ? fs::path() : m_.cache_dir / ("vocab-" + vocab_key);
    Vocabulary vocab;
    if (!cached_vocab.empty() && fs::exists(cached_vocab)) {
      vocab = load_vocab(cached_vocab);
    } else {
      vocab = build_vocab(apply_bpe_corpus(models[t.vocab_bpe],
                                           tokenize_lines(lines(t.vocab_data, side)),
                                           options_.threads));
      if (!cached_vocab.empty()) write_file_atomic(cached_vocab, vocab_bytes(vocab));
    }
    write_output(out.vocab, vocab_bytes(vocab));

    const SegmentedStream tune =
        apply_bpe_corpus(models[t.tune_bpe],
                         tokenize_lines(lines(DataSource::kE, side)), options_.threads);
    write_output(out.tune, segmented_bytes(tune));

    const CoverageReport report = coverage(vocab, tune);
    nlohmann::json j = to_json(report);
    j["config_id"] = m_.config_id;
    j["side"] = side_name(side);
    write_output(out.coverage, j.dump(2) + "\n");

    prep.vocab_size = vocab.size();
    prep.token_coverage = report.token_coverage;
    prep.type_coverage = report.type_coverage;
  }

  const ExperimentManifest& m_;
  PrepareOptions options_;
  std::map<DataSource, const ParallelCorpus*> corpora_;
  std::map<std::pair<DataSource, Side>, std::string> digests_;
  std::vector<fs::path> created_dirs_;
  PrepareResult result_;
};

}  // namespace

PrepareResult prepare(const ExperimentManifest& m, const PrepareOptions& options) {
  validate_manifest(m);
  return Preparer(m, options).run();
}

}  // namespace subvoc
