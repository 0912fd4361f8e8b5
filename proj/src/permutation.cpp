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

#include "condlab/permutation.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "condlab/error.hpp"
#include "condlab/random.hpp"

namespace condlab {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

void require_table_budget(unsigned n, unsigned w) {
  const unsigned long long bits = static_cast<unsigned long long>(n) * w;
  if (bits > kDefaultExhaustiveBits) {
    throw BudgetError("permutation tables are limited to wn <= 24 bits", std::to_string(bits),
                      std::to_string(kDefaultExhaustiveBits));
  }
}

const char* kind_name(PermutationKind k) {
  switch (k) {
    case PermutationKind::Identity: return "identity";
    case PermutationKind::Pi1: return "pi1";
    case PermutationKind::Pi2: return "pi2";
    case PermutationKind::Pi3: return "pi3";
    case PermutationKind::PiW: return "piw";
    case PermutationKind::DoubleCondenser: return "double";
    case PermutationKind::RandomTable: return "random";
    case PermutationKind::ExplicitTable: return "table";
  }
  return "?";
}

}  // namespace

std::uint64_t pack(const WordVector& x) {
  if (static_cast<unsigned long long>(x.n) * x.width() > 64) {
    throw ShapeError("cannot pack more than 64 bits");
  }
  std::uint64_t out = 0;
  for (const auto word : x.words) out = x.n == 64 ? word : (out << x.n) | word;
  return out;
}

WordVector unpack(std::uint64_t packed, unsigned n, unsigned w) {
  WordVector v{n, std::vector<std::uint64_t>(w)};
  const std::uint64_t mask = gf2::degree_mask(n);
  for (unsigned i = w; i-- > 0;) {
    v.words[i] = packed & mask;
    packed = n >= 64 ? 0 : packed >> n;
  }
  return v;
}

std::string packed_hex(std::uint64_t packed, unsigned bits) {
  const unsigned digits = std::max(1u, (bits + 3) / 4);
  std::string s(digits, '0');
  static constexpr char kHex[] = "0123456789abcdef";
  for (unsigned i = 0; i < digits && i < 16; ++i) {
    s[digits - 1 - i] = kHex[(packed >> (4 * i)) & 0xf];
  }
  return s;
}

bool is_prime(unsigned n) {
  if (n < 2) return false;
  for (unsigned d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

PermutationSpec::PermutationSpec(PermutationKind kind, gf2::Field field, unsigned w)
    : kind_(kind), field_(std::move(field)), w_(w) {
  if (w == 0) throw ShapeError("width w must be at least 1");
  switch (kind) {
    case PermutationKind::Pi1:
    case PermutationKind::Pi2:
    case PermutationKind::Pi3:
    case PermutationKind::DoubleCondenser:
      if (w != 3) throw ShapeError(std::string(kind_name(kind)) + " requires w = 3");
      break;
    case PermutationKind::PiW:
      if (w < 3) throw ShapeError("piw requires w >= 3");
      break;
    default:
      break;
  }
}

PermutationSpec PermutationSpec::identity(unsigned n, unsigned w) {
  return PermutationSpec(PermutationKind::Identity, gf2::Field(n), w);
}
PermutationSpec PermutationSpec::pi1(unsigned n) {
  return PermutationSpec(PermutationKind::Pi1, gf2::Field(n), 3);
}
PermutationSpec PermutationSpec::pi2(unsigned n) {
  return PermutationSpec(PermutationKind::Pi2, gf2::Field(n), 3);
}
PermutationSpec PermutationSpec::pi3(unsigned n) {
  return PermutationSpec(PermutationKind::Pi3, gf2::Field(n), 3);
}
PermutationSpec PermutationSpec::pi_w(unsigned n, unsigned w) {
  return PermutationSpec(PermutationKind::PiW, gf2::Field(n), w);
}
PermutationSpec PermutationSpec::double_condenser(unsigned n) {
  return PermutationSpec(PermutationKind::DoubleCondenser, gf2::Field(n), 3);
}

PermutationSpec PermutationSpec::with_poly(PermutationKind kind,
                                           const gf2::ReductionPolynomial& poly, unsigned w) {
  if (kind == PermutationKind::RandomTable || kind == PermutationKind::ExplicitTable) {
    throw ShapeError("table-backed permutations are built from a seed or a table");
  }
  return PermutationSpec(kind, gf2::Field(poly), w);
}

PermutationSpec PermutationSpec::random_table(std::uint64_t seed, unsigned n, unsigned w) {
  PermutationSpec spec(PermutationKind::RandomTable, gf2::Field(n), w);
  require_table_budget(n, w);
  const std::size_t size = std::size_t{1} << (n * w);
  std::vector<std::uint64_t> forward(size);
  std::iota(forward.begin(), forward.end(), std::uint64_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::uint64_t>(forward));
  std::vector<std::uint64_t> inverse(size);
  for (std::size_t x = 0; x < size; ++x) inverse[forward[x]] = x;
  spec.seed_ = seed;
  spec.forward_ = std::make_shared<const std::vector<std::uint64_t>>(std::move(forward));
  spec.inverse_ = std::make_shared<const std::vector<std::uint64_t>>(std::move(inverse));
  return spec;
}

PermutationSpec PermutationSpec::explicit_table(unsigned n, unsigned w,
                                                std::vector<std::uint64_t> entries) {
  PermutationSpec spec(PermutationKind::ExplicitTable, gf2::Field(n), w);
  require_table_budget(n, w);
  const std::size_t size = std::size_t{1} << (n * w);
  if (entries.size() != size) {
    throw ShapeError("table has " + std::to_string(entries.size()) + " entries, expected " +
                     std::to_string(size));
  }
  constexpr std::uint64_t kUnset = ~std::uint64_t{0};
  std::vector<std::uint64_t> inverse(size, kUnset);
  for (std::size_t x = 0; x < size; ++x) {
    const std::uint64_t y = entries[x];
    if (y >= size) {
      throw NotAPermutationError("table entry " + std::to_string(x) + " is out of range");
    }
    if (inverse[y] != kUnset) {
      throw NotAPermutationError("inputs " + packed_hex(inverse[y], n * w) + " and " +
                                 packed_hex(x, n * w) + " both map to " +
                                 packed_hex(y, n * w));
    }
    inverse[y] = x;
  }
  spec.forward_ = std::make_shared<const std::vector<std::uint64_t>>(std::move(entries));
  spec.inverse_ = std::make_shared<const std::vector<std::uint64_t>>(std::move(inverse));
  return spec;
}

std::string PermutationSpec::name() const { return kind_name(kind_); }

std::span<const std::uint64_t> PermutationSpec::table() const {
  if (!forward_) return {};
  return *forward_;
}

bool PermutationSpec::guarantee_assumes_prime_n() const noexcept {
  switch (kind_) {
    case PermutationKind::Pi1:
    case PermutationKind::Pi2:
    case PermutationKind::Pi3:
    case PermutationKind::PiW:
    case PermutationKind::DoubleCondenser:
      return true;
    default:
      return false;
  }
}

void PermutationSpec::check_shape(const WordVector& x) const {
  if (x.n != n() || x.width() != w_) {
    throw ShapeError("point has shape (n=" + std::to_string(x.n) + ", w=" +
                     std::to_string(x.width()) + "), permutation expects (n=" +
                     std::to_string(n()) + ", w=" + std::to_string(w_) + ")");
  }
  for (const auto word : x.words) {
    if ((word & ~field_.mask()) != 0) throw ShapeError("word exceeds n bits");
  }
}

void PermutationSpec::eval_words(std::vector<std::uint64_t>& v) const {
  const auto& f = field_;
  switch (kind_) {
    case PermutationKind::Identity:
      return;
    case PermutationKind::Pi1:
      v[2] ^= f.mul(v[0], v[1]);
      return;
    case PermutationKind::Pi2:
      v[1] ^= f.mul(v[0], v[2]);
      return;
    case PermutationKind::Pi3:
      if ((v[0] & 1) == 0) v[2] ^= f.mul(v[0], v[1]);
      else v[1] ^= f.mul(v[0], v[2]);
      return;
    case PermutationKind::PiW:
      for (std::size_t i = 0; i + 3 <= v.size(); i += 3) v[i + 2] ^= f.mul(v[i], v[i + 1]);
      return;
    case PermutationKind::DoubleCondenser: {
      // Subtraction is addition in characteristic 2.
      const std::uint64_t a = v[0], b = v[1], c = v[2];
      v[1] = f.mul(b, a) ^ c;
      v[2] = f.mul(c, a) ^ b;
      return;
    }
    case PermutationKind::RandomTable:
    case PermutationKind::ExplicitTable: {
      WordVector p{n(), std::move(v)};
      v = unpack((*forward_)[pack(p)], n(), w_).words;
      return;
    }
  }
}

void PermutationSpec::invert_words(std::vector<std::uint64_t>& v) const {
  const auto& f = field_;
  switch (kind_) {
    case PermutationKind::Identity:
      return;
    case PermutationKind::Pi1:
    case PermutationKind::Pi2:
    case PermutationKind::Pi3:
    case PermutationKind::PiW:
      // Each of these is an involution: the first word is untouched and the
      // updated word is shifted by a product of words the map leaves fixed.
      eval_words(v);
      return;
    case PermutationKind::DoubleCondenser: {
      // y = ba + c, z = ca + b  =>  b (a^2 + 1) = z + ya.
      const std::uint64_t a = v[0], y = v[1], z = v[2];
      const std::uint64_t det = f.mul(a, a) ^ 1;
      if (det == 0) {
        throw NotAPermutationError("double condenser is not invertible at a = " +
                                   std::to_string(a) + " (a^2 + 1 = 0)");
      }
      const std::uint64_t b = f.mul(z ^ f.mul(y, a), f.inverse(det));
      v[1] = b;
      v[2] = y ^ f.mul(b, a);
      return;
    }
    case PermutationKind::RandomTable:
    case PermutationKind::ExplicitTable: {
      WordVector p{n(), std::move(v)};
      v = unpack((*inverse_)[pack(p)], n(), w_).words;
      return;
    }
  }
}

WordVector PermutationSpec::eval(const WordVector& x) const {
  check_shape(x);
  WordVector y = x;
  eval_words(y.words);
  return y;
}

WordVector PermutationSpec::invert(const WordVector& y) const {
  check_shape(y);
  WordVector x = y;
  invert_words(x.words);
  return x;
}

void PermutationSpec::check_packed(std::uint64_t x) const {
  if (bits() > 64) throw ShapeError("packed form needs w * n <= 64");
  if (bits() < 64 && (x >> bits()) != 0) {
    throw ShapeError("packed point " + std::to_string(x) + " exceeds " + std::to_string(bits()) +
                     " bits");
  }
}

std::uint64_t PermutationSpec::eval_packed(std::uint64_t x) const {
  check_packed(x);
  if (forward_) return (*forward_)[x];
  if (kind_ == PermutationKind::Identity) return x;
  auto v = unpack(x, n(), w_).words;
  eval_words(v);
  return pack(WordVector{n(), std::move(v)});
}

std::uint64_t PermutationSpec::invert_packed(std::uint64_t y) const {
  check_packed(y);
  if (inverse_) return (*inverse_)[y];
  if (kind_ == PermutationKind::Identity) return y;
  auto v = unpack(y, n(), w_).words;
  invert_words(v);
  return pack(WordVector{n(), std::move(v)});
}

std::string PermutationSpec::descriptor() const {
  std::ostringstream out;
  out << name() << " n=" << n() << " w=" << w_ << " poly=" << field_.poly().to_hex();
  if (kind_ == PermutationKind::RandomTable) out << " seed=" << seed_;
  return out.str();
}

std::uint64_t PermutationSpec::digest() const {
  const std::string d = descriptor();
  std::uint64_t h = fnv1a(kFnvOffset, d.data(), d.size());
  if (kind_ == PermutationKind::ExplicitTable) {
    h = fnv1a(h, forward_->data(), forward_->size() * sizeof(std::uint64_t));
  }
  return h;
}

BijectivityReport verify_bijective(const PermutationSpec& spec, unsigned budget_bits) {
  const unsigned bits = spec.bits();
  if (bits > budget_bits || bits > 32) {
    throw BudgetError("exhaustive bijectivity check over 2^" + std::to_string(bits) +
                          " inputs exceeds the budget; use sampled mode",
                      "2^" + std::to_string(bits), "2^" + std::to_string(budget_bits));
  }
  BijectivityReport rep;
  rep.exhaustive = true;
  const std::uint64_t size = std::uint64_t{1} << bits;
  std::vector<bool> seen(size);
  for (std::uint64_t x = 0; x < size; ++x) {
    const std::uint64_t y = spec.eval_packed(x);
    ++rep.inputs_checked;
    if (seen[y]) {
      std::uint64_t first = 0;
      while (spec.eval_packed(first) != y) ++first;
      rep.witness = Collision{first, x, y};
      rep.bijective = false;
      return rep;
    }
    seen[y] = true;
  }
  rep.bijective = true;
  return rep;
}

BijectivityReport verify_bijective_sampled(const PermutationSpec& spec, std::uint64_t samples,
                                           std::uint64_t seed) {
  BijectivityReport rep;
  rep.bijective = true;
  Rng rng(seed);
  const std::uint64_t mask = spec.field().mask();
  for (std::uint64_t s = 0; s < samples; ++s) {
    WordVector x{spec.n(), std::vector<std::uint64_t>(spec.w())};
    for (auto& word : x.words) word = rng.next() & mask;
    ++rep.inputs_checked;
    try {
      if (spec.invert(spec.eval(x)) != x || spec.eval(spec.invert(x)) != x) {
        rep.bijective = false;
        return rep;
      }
    } catch (const NotAPermutationError&) {
      rep.bijective = false;
      return rep;
    }
  }
  return rep;
}

}  // namespace condlab
