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

#include "condlab/box.hpp"

#include <algorithm>
#include <sstream>

#include "condlab/error.hpp"

namespace condlab {
namespace {

std::string to_decimal(const BigCount& v) { return v.str(); }

std::uint64_t universe_of(unsigned n) {
  if (n < 1 || n > 63) throw RangeError("box enumeration supports 1 <= n <= 63");
  return std::uint64_t{1} << n;
}

// C(n, k) with a 64-bit guarantee the caller already established.
std::uint64_t choose(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  return *binomial(n, k);
}

}  // namespace

BigCount binomial_exact(const BigCount& n, std::uint64_t k) {
  if (BigCount(k) > n) return 0;
  if (BigCount(2 * k) > n) k = static_cast<std::uint64_t>(n - k);
  BigCount r = 1;
  for (std::uint64_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

std::optional<std::uint64_t> binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    r = r * (n - i) / (i + 1);
    if (r > ~std::uint64_t{0}) return std::nullopt;
  }
  return static_cast<std::uint64_t>(r);
}

BigCount qbox_count(unsigned n, std::uint64_t q, unsigned w) {
  if (n < 1 || n > 64) throw RangeError("n must be in [1, 64]");
  const BigCount universe = BigCount(1) << n;
  return boost::multiprecision::pow(binomial_exact(universe, q), w);
}

std::uint64_t rank_combination(std::span<const std::uint64_t> subset, std::uint64_t universe) {
  const std::uint64_t k = subset.size();
  std::uint64_t rank = 0;
  std::uint64_t v = 0;
  for (std::uint64_t i = 0; i < k; ++i) {
    for (; v < subset[i]; ++v) rank += choose(universe - 1 - v, k - 1 - i);
    ++v;
  }
  return rank;
}

std::vector<std::uint64_t> unrank_combination(std::uint64_t rank, std::uint64_t universe,
                                              std::uint64_t k) {
  const auto total = binomial(universe, k);
  if (!total || k > universe || rank >= *total) {
    throw RangeError("combination rank " + std::to_string(rank) + " out of range for C(" +
                     std::to_string(universe) + ", " + std::to_string(k) + ")");
  }
  std::vector<std::uint64_t> out;
  out.reserve(k);
  std::uint64_t v = 0;
  for (std::uint64_t i = 0; i < k; ++i) {
    for (;; ++v) {
      const std::uint64_t block = choose(universe - 1 - v, k - 1 - i);
      if (rank < block) break;
      rank -= block;
    }
    out.push_back(v++);
  }
  return out;
}

bool next_combination(std::vector<std::uint64_t>& subset, std::uint64_t universe) {
  const std::size_t k = subset.size();
  std::size_t i = k;
  while (i > 0 && subset[i - 1] == universe - k + (i - 1)) --i;
  if (i == 0) return false;
  ++subset[i - 1];
  for (std::size_t j = i; j < k; ++j) subset[j] = subset[j - 1] + 1;
  return true;
}

QBox::QBox(unsigned n, std::vector<std::vector<std::uint64_t>> sides)
    : n_(n), sides_(std::move(sides)) {
  if (n < 1 || n > 64) throw ShapeError("n must be in [1, 64]");
  if (sides_.empty()) throw ShapeError("a q-box needs at least one side");
  const std::size_t q = sides_.front().size();
  if (q == 0) throw ShapeError("q-box sides must be nonempty");
  const std::uint64_t mask = gf2::degree_mask(n);
  for (std::size_t i = 0; i < sides_.size(); ++i) {
    auto& side = sides_[i];
    if (side.size() != q) {
      throw ShapeError("side " + std::to_string(i + 1) + " has " + std::to_string(side.size()) +
                       " values, expected " + std::to_string(q));
    }
    std::sort(side.begin(), side.end());
    if (std::adjacent_find(side.begin(), side.end()) != side.end()) {
      throw ShapeError("side " + std::to_string(i + 1) + " has a duplicate value");
    }
    if ((side.back() & ~mask) != 0) {
      throw ShapeError("side " + std::to_string(i + 1) + " has a value wider than n bits");
    }
  }
}

bool QBox::contains(const WordVector& x) const {
  if (x.n != n_ || x.width() != sides_.size()) return false;
  for (std::size_t i = 0; i < sides_.size(); ++i) {
    if (!std::binary_search(sides_[i].begin(), sides_[i].end(), x.words[i])) return false;
  }
  return true;
}

bool QBox::contains_packed(std::uint64_t packed) const {
  return contains(unpack(packed, n_, w()));
}

std::uint64_t QBox::volume() const {
  unsigned __int128 v = 1;
  for (std::size_t i = 0; i < sides_.size(); ++i) {
    v *= q();
    if (v > ~std::uint64_t{0}) {
      throw BudgetError("q-box volume does not fit 64 bits",
                        to_decimal(boost::multiprecision::pow(BigCount(q()), w())),
                        "2^64 - 1");
    }
  }
  return static_cast<std::uint64_t>(v);
}

std::string value_hex(std::uint64_t v, unsigned n) { return packed_hex(v, n); }

std::uint64_t parse_hex(const std::string& text, std::size_t line) {
  if (text.empty() || text.size() > 16 ||
      text.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos) {
    throw ParseError("bad hex value '" + text + "'", line);
  }
  return std::stoull(text, nullptr, 16);
}

std::string format_box(const QBox& box) {
  std::string out;
  for (unsigned i = 0; i < box.w(); ++i) {
    if (i) out += ';';
    const auto side = box.side(i);
    for (std::size_t j = 0; j < side.size(); ++j) {
      if (j) out += ',';
      out += value_hex(side[j], box.n());
    }
  }
  return out;
}

QBox parse_box(const std::string& text, unsigned n) {
  std::vector<std::vector<std::uint64_t>> sides;
  std::stringstream in(text);
  std::string side_text;
  while (std::getline(in, side_text, ';')) {
    std::vector<std::uint64_t> side;
    std::stringstream vals(side_text);
    std::string item;
    while (std::getline(vals, item, ',')) side.push_back(parse_hex(item));
    sides.push_back(std::move(side));
  }
  return QBox(n, std::move(sides));
}

std::string format_cursor(const Cursor& c) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < c.size(); ++i) out << (i ? "," : "") << c[i];
  out << ')';
  return out.str();
}

Cursor parse_cursor(const std::string& text) {
  if (text.size() < 2 || text.front() != '(' || text.back() != ')') {
    throw ParseError("cursor must look like (i_1,...,i_w): '" + text + "'", 0);
  }
  Cursor out;
  std::stringstream in(text.substr(1, text.size() - 2));
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
      throw ParseError("bad cursor component '" + item + "'", 0);
    }
    out.push_back(std::stoull(item));
  }
  if (out.empty()) throw ParseError("empty cursor", 0);
  return out;
}

QBoxEnumerator::QBoxEnumerator(unsigned n, std::uint64_t q, unsigned w, std::uint64_t budget)
    : n_(n), q_(q), w_(w), universe_(universe_of(n)) {
  if (w == 0) throw RangeError("w must be at least 1");
  if (q == 0 || q > universe_) {
    throw RangeError("q must be in [1, 2^n], got " + std::to_string(q));
  }
  const BigCount count = qbox_count(n, q, w);
  if (count > budget) {
    throw BudgetError("enumerating C(" + std::to_string(universe_) + "," + std::to_string(q) +
                          ")^" + std::to_string(w) + " q-boxes exceeds the enumeration budget",
                      to_decimal(count), std::to_string(budget));
  }
  total_ = static_cast<std::uint64_t>(count);
  per_side_ = choose(universe_, q);
  seek_index(0);
}

Cursor QBoxEnumerator::cursor() const { return cursor_of(position_); }

Cursor QBoxEnumerator::cursor_of(std::uint64_t index) const {
  Cursor c(w_, 0);
  if (index >= total_) {
    c[0] = per_side_;  // one past the end
    return c;
  }
  for (unsigned i = w_; i-- > 0;) {
    c[i] = index % per_side_;
    index /= per_side_;
  }
  return c;
}

std::uint64_t QBoxEnumerator::index_of(const Cursor& c) const {
  if (c.size() != w_) throw ShapeError("cursor has " + std::to_string(c.size()) + " components");
  if (c[0] == per_side_ && std::all_of(c.begin() + 1, c.end(), [](auto v) { return v == 0; })) {
    return total_;
  }
  std::uint64_t index = 0;
  for (const auto r : c) {
    if (r >= per_side_) throw RangeError("cursor component out of range: " + format_cursor(c));
    index = index * per_side_ + r;
  }
  return index;
}

void QBoxEnumerator::seek(const Cursor& c) { seek_index(index_of(c)); }

void QBoxEnumerator::seek_index(std::uint64_t index) {
  position_ = std::min(index, total_);
  if (position_ == total_) return;
  ranks_ = cursor_of(position_);
  sides_.assign(w_, {});
  for (unsigned i = 0; i < w_; ++i) sides_[i] = unrank_combination(ranks_[i], universe_, q_);
}

std::optional<QBox> QBoxEnumerator::next() {
  if (position_ >= total_) return std::nullopt;
  QBox box(QBox::Unchecked{}, n_, sides_);
  ++position_;
  if (position_ < total_) {
    for (unsigned i = w_; i-- > 0;) {
      if (next_combination(sides_[i], universe_)) {
        ++ranks_[i];
        break;
      }
      for (std::uint64_t j = 0; j < q_; ++j) sides_[i][j] = j;
      ranks_[i] = 0;
    }
  }
  return box;
}

QBox random_qbox(unsigned n, std::uint64_t q, unsigned w, Rng& rng) {
  const std::uint64_t universe = universe_of(n);
  if (q == 0 || q > universe) throw RangeError("q must be in [1, 2^n]");
  const auto per_side = binomial(universe, q);
  std::vector<std::vector<std::uint64_t>> sides(w);
  for (auto& side : sides) {
    if (per_side) {
      side = unrank_combination(rng.below(*per_side), universe, q);
      continue;
    }
    // Too many subsets to rank in 64 bits: Floyd's sampling is uniform too.
    std::vector<std::uint64_t> picked;
    for (std::uint64_t j = universe - q; j < universe; ++j) {
      const std::uint64_t t = rng.below(j + 1);
      const bool dup = std::find(picked.begin(), picked.end(), t) != picked.end();
      picked.push_back(dup ? j : t);
    }
    side = std::move(picked);
  }
  return QBox(n, std::move(sides));
}

void PointSet::check_shape() const {
  if (n_ < 1 || w_ < 1 || static_cast<unsigned long long>(n_) * w_ > 64) {
    throw ShapeError("point sets need 1 <= n, 1 <= w and w*n <= 64");
  }
}

PointSet::PointSet(unsigned n, unsigned w, std::vector<std::uint64_t> points)
    : n_(n), w_(w), points_(std::move(points)) {
  check_shape();
  std::sort(points_.begin(), points_.end());
  points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
  if (n * w < 64 && !points_.empty() && points_.back() >> (n * w) != 0) {
    throw ShapeError("point wider than w*n bits");
  }
}

bool PointSet::contains(std::uint64_t packed) const {
  return std::binary_search(points_.begin(), points_.end(), packed);
}

namespace {

// Calls fn(packed) for every point of the box.
template <typename Fn>
void for_each_point(const QBox& box, Fn&& fn) {
  const unsigned w = box.w();
  const unsigned n = box.n();
  const std::uint64_t q = box.q();
  std::vector<std::uint64_t> idx(w, 0);
  while (true) {
    std::uint64_t packed = 0;
    for (unsigned i = 0; i < w; ++i) packed = (n >= 64 ? 0 : packed << n) | box.side(i)[idx[i]];
    fn(packed);
    unsigned i = w;
    while (i > 0 && ++idx[i - 1] == q) idx[--i] = 0;
    if (i == 0) return;
  }
}

}  // namespace

PointSet box_points(const QBox& box) {
  std::vector<std::uint64_t> pts;
  pts.reserve(box.volume());
  for_each_point(box, [&](std::uint64_t p) { pts.push_back(p); });
  return PointSet(box.n(), box.w(), std::move(pts));
}

PointSet image_of_box(const PermutationSpec& spec, const QBox& box, std::uint64_t point_budget) {
  if (box.n() != spec.n() || box.w() != spec.w()) {
    throw ShapeError("q-box shape does not match the permutation");
  }
  const std::uint64_t volume = box.volume();
  if (volume > point_budget) {
    throw BudgetError("image of a q-box with q^w points exceeds the point budget",
                      std::to_string(volume), std::to_string(point_budget));
  }
  std::vector<std::uint64_t> pts;
  pts.reserve(volume);
  for_each_point(box, [&](std::uint64_t p) { pts.push_back(spec.eval_packed(p)); });
  PointSet image(box.n(), box.w(), std::move(pts));
  if (image.size() != volume) {
    throw NotAPermutationError("image of a q-box lost points; the map is not injective");
  }
  return image;
}

std::uint64_t intersection_count(const PointSet& s, const QBox& v) {
  if (s.n() != v.n() || s.w() != v.w()) throw ShapeError("point set and q-box shapes differ");
  std::uint64_t count = 0;
  for (const auto p : s) {
    bool inside = true;
    for (unsigned i = 0; i < s.w() && inside; ++i) {
      const auto side = v.side(i);
      inside = std::binary_search(side.begin(), side.end(), s.word(p, i));
    }
    count += inside;
  }
  return count;
}

}  // namespace condlab
