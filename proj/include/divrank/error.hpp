// Copyright 2026 The divrank Authors.
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

#ifndef DIVRANK_ERROR_HPP_
#define DIVRANK_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace divrank {

// Base of every exception thrown by the library. kind() is a stable,
// machine-parsable tag used by the command-line front end.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message)
      : Error("invalid-argument", message) {}
};

// Duplicate or out-of-range document index in a ranking.
class InvalidRanking : public Error {
 public:
  explicit InvalidRanking(const std::string& message)
      : Error("invalid-ranking", message) {}
};

// The query has no document relevant to any subtopic, so the ideal score is
// zero and every normalized measure is undefined.
class DegenerateQuery : public Error {
 public:
  explicit DegenerateQuery(const std::string& message)
      : Error("degenerate-query", message) {}
};

class SizeGuard : public Error {
 public:
  explicit SizeGuard(const std::string& message) : Error("size-guard", message) {}
};

// Malformed input file. line() is 1-based; 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error("parse", message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& message) : Error("schema", message) {}
};

// Model and dataset disagree on dimensions or channel names.
class CompatibilityError : public Error {
 public:
  explicit CompatibilityError(const std::string& message)
      : Error("compatibility", message) {}
};

class QpNotConverged : public Error {
 public:
  QpNotConverged(const std::string& message, double violation)
      : Error("qp-not-converged", message), violation_(violation) {}
  double violation() const noexcept { return violation_; }

 private:
  double violation_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io", message) {}
};

}  // namespace divrank

#endif  // DIVRANK_ERROR_HPP_
