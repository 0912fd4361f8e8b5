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
#include <string>

namespace condlab::gf2 {

inline constexpr unsigned kMaxDegree = 64;

// Mask selecting the low n bits; n in [1, 64].
constexpr std::uint64_t degree_mask(unsigned n) {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

// Monic degree-n polynomial over GF(2). The leading x^n term is implicit so
// that n = 64 fits one word; `tail` holds the coefficients of x^0..x^{n-1}.
struct ReductionPolynomial {
  unsigned n = 0;
  std::uint64_t tail = 0;

  // Full (n+1)-bit representation, bit n set.
  unsigned __int128 bits() const {
    return (static_cast<unsigned __int128>(1) << n) | tail;
  }
  // Human form, e.g. "x^3+x+1".
  std::string to_string() const;
  // Hex of the full representation, e.g. "b" for x^3+x+1.
  std::string to_hex() const;

  friend bool operator==(const ReductionPolynomial&, const ReductionPolynomial&) = default;
};

// An element of GF(2^n): bit i is the coefficient of x^i.
struct FieldElement {
  std::uint64_t bits = 0;
  unsigned n = 1;

  friend bool operator==(const FieldElement&, const FieldElement&) = default;
};

// Lexicographically smallest irreducible polynomial of degree n. Results for
// all degrees are computed once, on first use.
const ReductionPolynomial& default_poly(unsigned n);

// Rabin's irreducibility test.
bool is_irreducible(const ReductionPolynomial& p);

// Arithmetic in one fixed field. Operates on raw words for the hot paths;
// inputs must already be reduced (< 2^n).
class Field {
 public:
  explicit Field(unsigned n);
  explicit Field(const ReductionPolynomial& poly);

  unsigned degree() const noexcept { return poly_.n; }
  const ReductionPolynomial& poly() const noexcept { return poly_; }
  std::uint64_t mask() const noexcept { return mask_; }
  std::uint64_t order() const;  // 2^n, saturating at 2^64 - 1 for n = 64

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const noexcept { return a ^ b; }

  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const noexcept {
    const unsigned top = poly_.n - 1;
    std::uint64_t r = 0;
    for (; b != 0; b >>= 1) {
      if (b & 1) r ^= a;
      const std::uint64_t carry = (a >> top) & 1;
      a = (a << 1) & mask_;
      if (carry) a ^= poly_.tail;
    }
    return r;
  }

  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const noexcept;

  // a^(2^n - 2); throws RangeError for a == 0.
  std::uint64_t inverse(std::uint64_t a) const;

  FieldElement element(std::uint64_t bits) const;

 private:
  ReductionPolynomial poly_;
  std::uint64_t mask_;
};

FieldElement gf_add(FieldElement a, FieldElement b);
FieldElement gf_mul(FieldElement a, FieldElement b, const ReductionPolynomial& p);
FieldElement gf_inverse(FieldElement a, const ReductionPolynomial& p);

// Result of `selfcheck`. Each counter is the number of checks that failed.
struct SelfCheckReport {
  unsigned n = 0;
  ReductionPolynomial poly;
  bool exhaustive = false;
  std::uint64_t triples_checked = 0;
  std::uint64_t axiom_failures = 0;
  std::uint64_t inverse_failures = 0;
  std::uint64_t reference_mismatches = 0;
  bool irreducible = false;

  bool ok() const {
    return irreducible && axiom_failures == 0 && inverse_failures == 0 &&
           reference_mismatches == 0;
  }
};

// Field axioms, inverse existence and agreement with a carry-less-product
// reference. Exhaustive when 2^(3n) <= exhaustive_limit, otherwise `samples`
// seeded random triples.
SelfCheckReport selfcheck(unsigned n, std::uint64_t samples = 100000, std::uint64_t seed = 1,
                          std::uint64_t exhaustive_limit = std::uint64_t{1} << 15);

}  // namespace condlab::gf2
