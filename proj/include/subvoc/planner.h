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

#ifndef SUBVOC_PLANNER_H_
#define SUBVOC_PLANNER_H_

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "subvoc/corpus_io.h"

namespace subvoc {

// D: original training data, E: fine-tuning data, DE: their concatenation.
enum class DataSource { kD, kE, kDE };

inline constexpr DataSource kAllSources[] = {DataSource::kD, DataSource::kE,
                                             DataSource::kDE};

std::string_view source_name(DataSource source);  // "D", "E", "DE"
DataSource parse_source(std::string_view name);   // throws InvalidConfig

struct ConfigTriple {
  DataSource vocab_bpe = DataSource::kD;   // BPE used to segment vocab data
  DataSource vocab_data = DataSource::kD;  // data the vocabulary is built from
  DataSource tune_bpe = DataSource::kD;    // BPE used to segment tuning data

  auto operator<=>(const ConfigTriple&) const = default;
};

std::string to_string(const ConfigTriple& t);  // "(D, E, D)"

// All 27 triples, ordered by vocab_bpe, then vocab_data, then tune_bpe.
std::vector<ConfigTriple> enumerate_all();

// (a) a combined-data BPE appears only in the fully combined setup;
// (b) a combined vocabulary needs one shared BPE model.
bool is_valid(const ConfigTriple& t);

std::vector<ConfigTriple> filter_valid(std::span<const ConfigTriple> triples);

// "C1".."C11". Throws InvalidConfig for invalid triples.
std::string canonical_id(const ConfigTriple& t);
ConfigTriple triple_for_id(std::string_view id);

// The 11 valid triples in C1..C11 order.
std::vector<ConfigTriple> canonical_triples();

enum class Direction { kForward, kReverse };

std::string_view direction_name(Direction d);
Direction parse_direction(std::string_view name);  // throws InvalidConfig

struct CorpusPaths {
  std::filesystem::path d_source;
  std::filesystem::path d_target;
  std::filesystem::path e_source;
  std::filesystem::path e_target;

  bool operator==(const CorpusPaths&) const = default;
};

struct SideOutputs {
  // One model file per distinct BPE source used on this side.
  std::map<DataSource, std::filesystem::path> bpe;
  std::filesystem::path vocab;
  std::filesystem::path tune;
  std::filesystem::path coverage;

  bool operator==(const SideOutputs&) const = default;
};

inline constexpr std::size_t kDefaultMerges = 50000;

struct ExperimentManifest {
  std::string config_id;
  ConfigTriple triple;
  Direction direction = Direction::kForward;
  std::size_t merges = kDefaultMerges;
  CorpusPaths inputs;
  SideOutputs source;
  SideOutputs target;
  // Empty disables the model/vocabulary cache.
  std::filesystem::path cache_dir;

  const SideOutputs& outputs(Side side) const {
    return side == Side::kSource ? source : target;
  }
  std::vector<std::filesystem::path> output_paths() const;

  bool operator==(const ExperimentManifest&) const = default;
};

// Throws InvalidConfig for an invalid triple and MissingPath when an input
// corpus does not exist. Outputs go under out_dir/<config_id>/.
ExperimentManifest build_manifest(const ConfigTriple& t,
                                  const CorpusPaths& inputs,
                                  const std::filesystem::path& out_dir,
                                  Direction direction = Direction::kForward,
                                  std::size_t merges = kDefaultMerges,
                                  const std::filesystem::path& cache_dir = {});

// Throws InvalidConfig on an id/triple mismatch or repeated output path.
void validate_manifest(const ExperimentManifest& m);

nlohmann::json to_json(const ExperimentManifest& m);
ExperimentManifest manifest_from_json(const nlohmann::json& j);
void save_manifest(const ExperimentManifest& m,
                   const std::filesystem::path& path);
ExperimentManifest load_manifest(const std::filesystem::path& path);

struct SidePreparation {
  std::vector<DataSource> models;   // distinct BPE sources used
  std::vector<DataSource> learned;  // those not found in the cache
  std::size_t vocab_size = 0;
  double token_coverage = 1.0;
  double type_coverage = 1.0;
};

struct PrepareResult {
  std::string config_id;
  SidePreparation source;
  SidePreparation target;
  std::vector<std::filesystem::path> written;

  const SidePreparation& side(Side s) const {
    return s == Side::kSource ? source : target;
  }
};

struct PrepareOptions {
  unsigned threads = 1;
};

// Materializes BPE models, vocabularies, segmented tuning data and coverage
// reports for both sides. On failure the files written so far are removed.
PrepareResult prepare(const ExperimentManifest& m,
                      const PrepareOptions& options = {});

// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

}  // namespace subvoc

#endif  // SUBVOC_PLANNER_H_
