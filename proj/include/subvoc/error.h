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

#ifndef SUBVOC_ERROR_H_
#define SUBVOC_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace subvoc {

// Base class for every data or format problem the toolkit reports. The CLI
// maps these to exit code 2; anything else escaping a command is internal.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoFailure : public Error {
 public:
  using Error::Error;
};

class EncodingError : public Error {
 public:
  using Error::Error;
};

// Malformed file content. line() is 1-based, 0 when not tied to a line.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : what + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  std::size_t line() const { return line_; }

  // Same error with `prefix` (usually a file name) prepended to the message.
  FormatError prefixed(const std::string& prefix) const {
    return FormatError(prefix + what(), line_, Raw{});
  }

 private:
  struct Raw {};
  FormatError(const std::string& what, std::size_t line, Raw)
      : Error(what), line_(line) {}

  std::size_t line_;
};

class LineCountMismatch : public Error {
 public:
  LineCountMismatch(std::size_t source_count, std::size_t target_count)
      : Error("line count mismatch: source has " +
              std::to_string(source_count) + " lines, target has " +
              std::to_string(target_count)),
        source_count_(source_count),
        target_count_(target_count) {}
  std::size_t source_count() const { return source_count_; }
  std::size_t target_count() const { return target_count_; }

 private:
  std::size_t source_count_;
  std::size_t target_count_;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class DanglingMarker : public Error {
 public:
  using Error::Error;
};

class DuplicateToken : public Error {
 public:
  explicit DuplicateToken(const std::string& token, std::size_t line = 0)
      : Error("duplicate token '" + token + "'" +
              (line ? " (line " + std::to_string(line) + ")" : "")),
        token_(token) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class MissingPath : public Error {
 public:
  using Error::Error;
};

class EmptyTestSet : public Error {
 public:
  using Error::Error;
};

// Corpus TER is undefined when the references hold no words at all.
class EmptyReference : public Error {
 public:
  using Error::Error;
};

class MissingCell : public Error {
 public:
  using Error::Error;
};

}  // namespace subvoc

#endif  // SUBVOC_ERROR_H_
