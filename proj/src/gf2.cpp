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

#include "condlab/gf2.hpp"

#include <array>
#include <iomanip>
#include <sstream>
#include <vector>

#include "condlab/error.hpp"
#include "condlab/random.hpp"

namespace condlab::gf2 {
namespace {

using u128 = unsigned __int128;

int degree_of(u128 p) {
  if (p == 0) return -1;
  const auto hi = static_cast<std::uint64_t>(p >> 64);
  if (hi != 0) return 127 - __builtin_clzll(hi);
  return 63 - __builtin_clzll(static_cast<std::uint64_t>(p));
}

u128 poly_mod(u128 a, u128 b) {
  const int db = degree_of(b);
  for (int da = degree_of(a); da >= db; da = degree_of(a)) a ^= b << (da - db);
  return a;
}

u128 poly_gcd(u128 a, u128 b) {
  while (b != 0) {
    const u128 r = poly_mod(a, b);
    a = b;
    b = r;
  }
  return a;
}

void check_degree(unsigned n) {
  if (n < 1 || n > kMaxDegree) {
    throw UnsupportedDegreeError("field degree must be in [1, 64], got " + std::to_string(n));
  }
}

// x reduced modulo p (x itself for n > 1).
std::uint64_t reduced_x(const ReductionPolynomial& p) { return p.n > 1 ? 2 : p.tail; }

// Carry-less product followed by long division; an independent route to mul.
std::uint64_t reference_mul(std::uint64_t a, std::uint64_t b, const ReductionPolynomial& p) {
  u128 prod = 0;
  for (unsigned i = 0; i < 64; ++i) {
    if ((b >> i) & 1) prod ^= static_cast<u128>(a) << i;
  }
  return static_cast<std::uint64_t>(poly_mod(prod, p.bits()));
}

std::array<ReductionPolynomial, kMaxDegree + 1> compute_default_polys() {
  std::array<ReductionPolynomial, kMaxDegree + 1> table{};
  for (unsigned n = 1; n <= kMaxDegree; ++n) {
    for (std::uint64_t tail = 0;; ++tail) {
      ReductionPolynomial p{n, tail};
      if (is_irreducible(p)) {
        table[n] = p;
        break;
      }
    }
  }
  return table;
}

}  // namespace

std::string ReductionPolynomial::to_string() const {
  std::ostringstream out;
  out << "x^" << n;
  for (int i = static_cast<int>(n) - 1; i >= 0; --i) {
    if (((tail >> i) & 1) == 0) continue;
    if (i == 0) out << "+1";
    else if (i == 1) out << "+x";
    else out << "+x^" << i;
  }
  return out.str();
}

std::string ReductionPolynomial::to_hex() const {
  std::ostringstream out;
  out << std::hex;
  if (n == 64) out << 1 << std::setw(16) << std::setfill('0') << tail;
  else out << static_cast<std::uint64_t>(bits());
  return out.str();
}

bool is_irreducible(const ReductionPolynomial& p) {
  check_degree(p.n);
  if (p.n > 1 && (p.tail & 1) == 0) return false;  // divisible by x
  const Field f(p);
  const std::uint64_t x = reduced_x(p);
  auto frobenius = [&](unsigned k) {
    std::uint64_t h = x;
    for (unsigned i = 0; i < k; ++i) h = f.mul(h, h);
    return h;
  };
  if (frobenius(p.n) != x) return false;
  unsigned rest = p.n;
  for (unsigned d = 2; d <= rest; ++d) {
    if (rest % d != 0) continue;
    while (rest % d == 0) rest /= d;
    const std::uint64_t h = frobenius(p.n / d) ^ x;
    if (degree_of(poly_gcd(p.bits(), h)) != 0) return false;
  }
  return true;
}

const ReductionPolynomial& default_poly(unsigned n) {
  check_degree(n);
  static const auto table = compute_default_polys();
  return table[n];
}

Field::Field(unsigned n) : Field(default_poly(n)) {}

Field::Field(const ReductionPolynomial& poly) : poly_(poly), mask_(degree_mask(poly.n)) {
  check_degree(poly.n);
  if ((poly.tail & ~mask_) != 0) throw RangeError("reduction polynomial tail exceeds degree");
}

std::uint64_t Field::order() const {
  return poly_.n >= 64 ? ~std::uint64_t{0} : std::uint64_t{1} << poly_.n;
}

std::uint64_t Field::pow(std::uint64_t a, std::uint64_t e) const noexcept {
  std::uint64_t r = 1;
  for (; e != 0; e >>= 1) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
  }
  return r;
}

std::uint64_t Field::inverse(std::uint64_t a) const {
  if (a == 0) throw RangeError("zero has no multiplicative inverse");
  // a^(2^n - 2) = prod_{i=1}^{n-1} a^(2^i)
  std::uint64_t r = 1;
  std::uint64_t sq = a;
  for (unsigned i = 1; i < poly_.n; ++i) {
    sq = mul(sq, sq);
    r = mul(r, sq);
  }
  return r;
}

FieldElement Field::element(std::uint64_t bits) const {
  if ((bits & ~mask_) != 0) {
    throw RangeError("value " + std::to_string(bits) + " does not fit GF(2^" +
                     std::to_string(poly_.n) + ")");
  }
  return FieldElement{bits, poly_.n};
}

FieldElement gf_add(FieldElement a, FieldElement b) {
  if (a.n != b.n) {
    throw DegreeMismatchError("cannot add elements of GF(2^" + std::to_string(a.n) +
                              ") and GF(2^" + std::to_string(b.n) + ")");
  }
  return FieldElement{a.bits ^ b.bits, a.n};
}

FieldElement gf_mul(FieldElement a, FieldElement b, const ReductionPolynomial& p) {
  if (a.n != b.n || a.n != p.n) {
    throw DegreeMismatchError("degree mismatch in gf_mul: " + std::to_string(a.n) + ", " +
                              std::to_string(b.n) + ", modulus " + std::to_string(p.n));
  }
  const Field f(p);
  return FieldElement{f.mul(a.bits, b.bits), a.n};
}

FieldElement gf_inverse(FieldElement a, const ReductionPolynomial& p) {
  if (a.n != p.n) throw DegreeMismatchError("degree mismatch in gf_inverse");
  const Field f(p);
  return FieldElement{f.inverse(a.bits), a.n};
}

SelfCheckReport selfcheck(unsigned n, std::uint64_t samples, std::uint64_t seed,
                          std::uint64_t exhaustive_limit) {
  check_degree(n);
  SelfCheckReport rep;
  rep.n = n;
  rep.poly = default_poly(n);
  rep.irreducible = is_irreducible(rep.poly);
  const Field f(rep.poly);
  const std::uint64_t mask = f.mask();

  auto check_triple = [&](std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    bool ok = true;
    ok &= f.add(a, b) == f.add(b, a);
    ok &= f.mul(a, b) == f.mul(b, a);
    ok &= f.add(f.add(a, b), c) == f.add(a, f.add(b, c));
    ok &= f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c));
    ok &= f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c));
    ok &= f.add(a, 0) == a && f.add(a, a) == 0;
    ok &= f.mul(a, 1) == a && f.mul(a, 0) == 0;
    ok &= (f.mul(a, b) & ~mask) == 0;
    if (!ok) ++rep.axiom_failures;
    if (f.mul(a, b) != reference_mul(a, b, rep.poly)) ++rep.reference_mismatches;
    ++rep.triples_checked;
  };

  const bool exhaustive = 3 * n < 64 && (std::uint64_t{1} << (3 * n)) <= exhaustive_limit;
  rep.exhaustive = exhaustive;
  if (exhaustive) {
    const std::uint64_t size = std::uint64_t{1} << n;
    for (std::uint64_t a = 0; a < size; ++a)
      for (std::uint64_t b = 0; b < size; ++b)
        for (std::uint64_t c = 0; c < size; ++c) check_triple(a, b, c);
    // Existence of inverses by search, independent of the exponentiation route.
    for (std::uint64_t a = 1; a < size; ++a) {
      bool found = false;
      for (std::uint64_t b = 1; b < size && !found; ++b) found = f.mul(a, b) == 1;
      if (!found || f.mul(a, f.inverse(a)) != 1) ++rep.inverse_failures;
    }
  } else {
    Rng rng(seed);
    for (std::uint64_t s = 0; s < samples; ++s) {
      const std::uint64_t a = rng.next() & mask;
      const std::uint64_t b = rng.next() & mask;
      const std::uint64_t c = rng.next() & mask;
      check_triple(a, b, c);
      if (a != 0 && f.mul(a, f.inverse(a)) != 1) ++rep.inverse_failures;
    }
  }
  return rep;
}

}  // namespace condlab::gf2
