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

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "condlab/gf2.hpp"

namespace condlab {

// A point of ({0,1}^n)^w.
struct WordVector {
  unsigned n = 1;
  std::vector<std::uint64_t> words;

  std::size_t width() const noexcept { return words.size(); }
  friend bool operator==(const WordVector&, const WordVector&) = default;
};

// Packed form of a point when w*n <= 64. The first word is the most
// significant, so integer order equals lexicographic order of the words.
std::uint64_t pack(const WordVector& x);
WordVector unpack(std::uint64_t packed, unsigned n, unsigned w);

// Hex string of a packed point, ceil(w*n/4) lowercase digits.
std::string packed_hex(std::uint64_t packed, unsigned bits);

enum class PermutationKind {
  Identity,
  Pi1,              // (a, b, c) -> (a, b, c + ab)
  Pi2,              // (a, b, c) -> (a, b + ac, c)
  Pi3,              // Pi1 when a is even, Pi2 when a is odd
  PiW,              // Pi1 on consecutive triples, trailing words unchanged
  DoubleCondenser,  // (a, b, c) -> (a, ba + c, ca - b)
  RandomTable,
  ExplicitTable,
};

// Immutable description of a permutation of {0,1}^{wn}. Cheap to copy;
// tables are shared.
class PermutationSpec {
 public:
  static PermutationSpec identity(unsigned n, unsigned w);
  static PermutationSpec pi1(unsigned n);
  static PermutationSpec pi2(unsigned n);
  static PermutationSpec pi3(unsigned n);
  static PermutationSpec pi_w(unsigned n, unsigned w);
  static PermutationSpec double_condenser(unsigned n);
  static PermutationSpec with_poly(PermutationKind kind, const gf2::ReductionPolynomial& poly,
                                   unsigned w);
  // Seeded Fisher-Yates shuffle of {0,1}^{wn}; wn <= 24.
  static PermutationSpec random_table(std::uint64_t seed, unsigned n, unsigned w);
  // entries[x] is the image of packed input x. Throws NotAPermutationError
  // unless the table is a bijection.
  static PermutationSpec explicit_table(unsigned n, unsigned w, std::vector<std::uint64_t> entries);

  PermutationKind kind() const noexcept { return kind_; }
  unsigned n() const noexcept { return field_.degree(); }
  unsigned w() const noexcept { return w_; }
  unsigned bits() const noexcept { return n() * w_; }
  const gf2::Field& field() const noexcept { return field_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::string name() const;

  bool table_backed() const noexcept { return forward_ != nullptr; }
  std::span<const std::uint64_t> table() const;

  // True for the GF(2^n) constructions whose conductance guarantee is stated
  // for prime n only.
  bool guarantee_assumes_prime_n() const noexcept;

  WordVector eval(const WordVector& x) const;
  WordVector invert(const WordVector& y) const;

  // Packed variants; require bits() <= 64 and no validation of the input.
  std::uint64_t eval_packed(std::uint64_t x) const;
  std::uint64_t invert_packed(std::uint64_t y) const;

  // Canonical one-line description, and a 64-bit FNV-1a digest of it plus any
  // table contents. Used to match checkpoints to the spec they came from.
  std::string descriptor() const;
  std::uint64_t digest() const;

 private:
  PermutationSpec(PermutationKind kind, gf2::Field field, unsigned w);

  void check_shape(const WordVector& x) const;
  void check_packed(std::uint64_t x) const;
  void eval_words(std::vector<std::uint64_t>& v) const;
  void invert_words(std::vector<std::uint64_t>& v) const;

  PermutationKind kind_;
  gf2::Field field_;
  unsigned w_;
  std::uint64_t seed_ = 0;
  std::shared_ptr<const std::vector<std::uint64_t>> forward_;
  std::shared_ptr<const std::vector<std::uint64_t>> inverse_;
};

bool is_prime(unsigned n);

struct Collision {
  std::uint64_t first = 0;   // smaller packed input
  std::uint64_t second = 0;  // larger packed input
  std::uint64_t image = 0;
};

struct BijectivityReport {
  bool bijective = false;
  bool exhaustive = false;
  std::uint64_t inputs_checked = 0;
  std::optional<Collision> witness;
};

inline constexpr unsigned kDefaultExhaustiveBits = 24;

// Evaluates every input. Throws BudgetError when wn exceeds budget_bits.
BijectivityReport verify_bijective(const PermutationSpec& spec,
                                   unsigned budget_bits = kDefaultExhaustiveBits);

// Round trips `samples` seeded random points through eval and invert in both
// directions. Evidence only; never sets `exhaustive`.
BijectivityReport verify_bijective_sampled(const PermutationSpec& spec, std::uint64_t samples,
                                           std::uint64_t seed);

}  // namespace condlab
