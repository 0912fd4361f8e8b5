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

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "condlab/permutation.hpp"
#include "condlab/random.hpp"

namespace condlab {

using BigCount = boost::multiprecision::cpp_int;

BigCount binomial_exact(const BigCount& n, std::uint64_t k);
// C(n, k), or nullopt when it does not fit 64 bits.
std::optional<std::uint64_t> binomial(std::uint64_t n, std::uint64_t k);

// Number of q-boxes of dimension w over {0,1}^n: C(2^n, q)^w.
BigCount qbox_count(unsigned n, std::uint64_t q, unsigned w);

// Lexicographic rank of a sorted k-subset of {0, ..., universe-1}, and its
// inverse. Both require C(universe, k) to fit 64 bits.
std::uint64_t rank_combination(std::span<const std::uint64_t> subset, std::uint64_t universe);
std::vector<std::uint64_t> unrank_combination(std::uint64_t rank, std::uint64_t universe,
                                              std::uint64_t k);
// Advances to the lexicographic successor; false (and unchanged) at the last.
bool next_combination(std::vector<std::uint64_t>& subset, std::uint64_t universe);

// Discrete q-box U_1 x ... x U_w: each side a sorted set of exactly q
// distinct n-bit values. Ordered lexicographically by sides.
class QBox {
 public:
  QBox() = default;
  // Sorts each side; throws ShapeError on unequal sizes, duplicates or
  // values wider than n bits.
  QBox(unsigned n, std::vector<std::vector<std::uint64_t>> sides);

  unsigned n() const noexcept { return n_; }
  unsigned w() const noexcept { return static_cast<unsigned>(sides_.size()); }
  std::uint64_t q() const noexcept { return sides_.empty() ? 0 : sides_.front().size(); }
  const std::vector<std::vector<std::uint64_t>>& sides() const noexcept { return sides_; }
  std::span<const std::uint64_t> side(std::size_t i) const { return sides_.at(i); }

  bool contains(const WordVector& x) const;
  bool contains_packed(std::uint64_t packed) const;

  // q^w, throwing BudgetError when it does not fit 64 bits.
  std::uint64_t volume() const;

  friend bool operator==(const QBox&, const QBox&) = default;
  friend auto operator<=>(const QBox& a, const QBox& b) { return a.sides_ <=> b.sides_; }

 private:
  friend class QBoxEnumerator;
  struct Unchecked {};
  QBox(Unchecked, unsigned n, std::vector<std::vector<std::uint64_t>> sides)
      : n_(n), sides_(std::move(sides)) {}

  unsigned n_ = 0;
  std::vector<std::vector<std::uint64_t>> sides_;
};

// Compact text form "v,v,...;v,v,...;..." with each value as ceil(n/4)
// lowercase hex digits, sides separated by ';'.
std::string format_box(const QBox& box);
QBox parse_box(const std::string& text, unsigned n);

// Lowercase hex of an n-bit value, ceil(n/4) digits.
std::string value_hex(std::uint64_t v, unsigned n);
// Parses a hex string of at most 16 digits; throws ParseError on junk.
std::uint64_t parse_hex(const std::string& text, std::size_t line = 0);

// Decimal tuple of per-side combination ranks, "(i_1,...,i_w)".
using Cursor = std::vector<std::uint64_t>;
std::string format_cursor(const Cursor& c);
Cursor parse_cursor(const std::string& text);

inline constexpr std::uint64_t kDefaultEnumerationBudget = 1'000'000;

// Streams every q-box exactly once, sides in lexicographic order with the
// last side varying fastest. Single consumer; disjoint ranges of the linear
// index space can be walked by independent enumerators.
class QBoxEnumerator {
 public:
  // Throws BudgetError when C(2^n, q)^w exceeds budget.
  QBoxEnumerator(unsigned n, std::uint64_t q, unsigned w,
                 std::uint64_t budget = kDefaultEnumerationBudget);

  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t per_side() const noexcept { return per_side_; }
  // Linear index of the next box to be returned (== total() when done).
  std::uint64_t position() const noexcept { return position_; }
  Cursor cursor() const;

  std::optional<QBox> next();
  void seek(const Cursor& c);
  void seek_index(std::uint64_t index);

  Cursor cursor_of(std::uint64_t index) const;
  std::uint64_t index_of(const Cursor& c) const;

 private:
  unsigned n_;
  std::uint64_t q_;
  unsigned w_;
  std::uint64_t universe_;
  std::uint64_t per_side_;
  std::uint64_t total_;
  std::uint64_t position_ = 0;
  std::vector<std::uint64_t> ranks_;
  std::vector<std::vector<std::uint64_t>> sides_;
};

// Uniform random q-box: an independent uniform rank per side, unranked
// (Floyd sampling when C(2^n, q) exceeds 64 bits).
QBox random_qbox(unsigned n, std::uint64_t q, unsigned w, Rng& rng);

// Set of points of ({0,1}^n)^w, w*n <= 64, stored packed and sorted.
class PointSet {
 public:
  PointSet(unsigned n, unsigned w) : n_(n), w_(w) { check_shape(); }
  // Sorts; duplicate points collapse.
  PointSet(unsigned n, unsigned w, std::vector<std::uint64_t> points);

  unsigned n() const noexcept { return n_; }
  unsigned w() const noexcept { return w_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  std::span<const std::uint64_t> points() const noexcept { return points_; }
  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }

  bool contains(std::uint64_t packed) const;
  // Word i (0-based) of a packed point.
  std::uint64_t word(std::uint64_t packed, unsigned i) const noexcept {
    const unsigned shift = n_ * (w_ - 1 - i);
    return (shift >= 64 ? 0 : packed >> shift) & gf2::degree_mask(n_);
  }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  void check_shape() const;

  unsigned n_;
  unsigned w_;
  std::vector<std::uint64_t> points_;
};

// Every point of the box as a PointSet.
PointSet box_points(const QBox& box);

inline constexpr std::uint64_t kDefaultPointBudget = std::uint64_t{1} << 24;

// {eval(spec, u) : u in U}.
PointSet image_of_box(const PermutationSpec& spec, const QBox& box,
                      std::uint64_t point_budget = kDefaultPointBudget);

// |S ∩ V|.
std::uint64_t intersection_count(const PointSet& s, const QBox& v);

}  // namespace condlab
