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

#include "subvoc/corpus_io.h"

#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <utility>

#include "subvoc/error.h"
#include "subvoc/text.h"

namespace subvoc {

std::string_view side_name(Side side) {
  return side == Side::kSource ? "source" : "target";
}

ParallelCorpus::ParallelCorpus(std::string name,
                               std::vector<std::string> source_lines,
                               std::vector<std::string> target_lines)
    : name_(std::move(name)),
      source_(std::move(source_lines)),
      target_(std::move(target_lines)) {
  if (source_.size() != target_.size()) {
    throw LineCountMismatch(source_.size(), target_.size());
  }
  for (const auto* side : {&source_, &target_}) {
    for (std::size_t i = 0; i < side->size(); ++i) {
      if ((*side)[i].find_first_of("\r\n") != std::string::npos) {
        throw FormatError("line contains a line-break character", i + 1);
      }
    }
  }
}

namespace {

std::vector<std::string> split_content(const std::string& content,
                                       const LoadOptions& options) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    std::string line = content.substr(start, end - start);
    const std::size_t line_no = lines.size() + 1;
    if (line.find('\r') != std::string::npos) {
      throw FormatError("carriage return in input", line_no);
    }
    text::require_utf8(line, line_no);
    if (options.nfc) line = text::nfc(line);
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

}  // namespace

std::vector<std::string> read_lines(std::istream& in,
                                    const LoadOptions& options) {
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  if (in.bad()) throw IoFailure("read failed");
  return split_content(content, options);
}

std::vector<std::string> read_lines(const std::filesystem::path& path,
                                    const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open '" + path.string() + "' for reading");
  try {
    return read_lines(in, options);
  } catch (const FormatError& e) {
    throw e.prefixed(path.string() + ": ");
  } catch (const EncodingError& e) {
    throw EncodingError(path.string() + ": " + e.what());
  } catch (const IoFailure&) {
    throw IoFailure("read failed for '" + path.string() + "'");
  }
}

void write_lines(std::ostream& out, std::span<const std::string> lines) {
  for (const auto& line : lines) {
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    out.put('\n');
  }
  if (!out) throw IoFailure("write failed");
}

void write_lines(const std::filesystem::path& path,
                 std::span<const std::string> lines) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open '" + path.string() + "' for writing");
  write_lines(out, lines);
  out.close();
  if (!out) throw IoFailure("write failed for '" + path.string() + "'");
}

ParallelCorpus load_corpus(const std::filesystem::path& source_path,
                           const std::filesystem::path& target_path,
                           std::string name, const LoadOptions& options) {
  auto source = read_lines(source_path, options);
  auto target = read_lines(target_path, options);
  return ParallelCorpus(std::move(name), std::move(source), std::move(target));
}

ParallelCorpus concat_corpora(const ParallelCorpus& a, const ParallelCorpus& b) {
  std::vector<std::string> source = a.source_lines();
  std::vector<std::string> target = a.target_lines();
  source.insert(source.end(), b.source_lines().begin(), b.source_lines().end());
  target.insert(target.end(), b.target_lines().begin(), b.target_lines().end());
  return ParallelCorpus(a.name() + "+" + b.name(), std::move(source),
                        std::move(target));
}

CorpusStats validate_corpus(const ParallelCorpus& corpus) {
  CorpusStats stats;
  stats.pairs = corpus.size();
  std::set<std::pair<std::string_view, std::string_view>> seen;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& src = corpus.source_lines()[i];
    const auto& tgt = corpus.target_lines()[i];
    if (src.empty()) ++stats.empty_source;
    if (tgt.empty()) ++stats.empty_target;
    if (!seen.emplace(src, tgt).second) ++stats.duplicate_pairs;
  }
  return stats;
}

std::size_t TokenStream::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

TokenStream tokenize_lines(std::span<const std::string> lines) {
  TokenStream stream;
  stream.sentences.reserve(lines.size());
  for (const auto& line : lines) {
    stream.sentences.push_back(text::split_whitespace(line));
  }
  return stream;
}

TokenStream whitespace_tokenize(const ParallelCorpus& corpus, Side side) {
  return tokenize_lines(corpus.lines(side));
}

}  // namespace subvoc
