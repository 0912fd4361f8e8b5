// Copyright 2026 The condlab Authors
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace condlab {

// Base of every error the library throws. CLI exit codes are derived from
// the concrete type (see tools/).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegreeMismatchError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDegreeError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class NotAPermutationError : public Error {
 public:
  using Error::Error;
};

class EntropyError : public Error {
 public:
  using Error::Error;
};

// A search or enumeration refused to start (or stopped) because the amount
// of work exceeds the configured budget. `requested` is the exact decimal
// count that was refused.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, std::string requested, std::string limit)
      : Error(what + " (requested " + requested + ", budget " + limit + ")"),
        requested_(std::move(requested)),
        limit_(std::move(limit)) {}

  const std::string& requested() const noexcept { return requested_; }
  const std::string& limit() const noexcept { return limit_; }

 private:
  std::string requested_;
  std::string limit_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A library invariant failed at runtime (witness replay mismatch, broken
// partition, ...). Indicates a bug, never bad input.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace condlab
