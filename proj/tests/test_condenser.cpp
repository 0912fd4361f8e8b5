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

#include <cmath>
#include <map>
#include <vector>

#include "condlab/box.hpp"
#include "condlab/condenser.hpp"
#include "condlab/conductance.hpp"
#include "condlab/error.hpp"
#include "condlab/permutation.hpp"
#include "condlab/random.hpp"
#include "doctest.h"
#include "oracle/decompose_trace.hpp"

namespace condlab {
namespace {

std::vector<oracle::Point> to_points(const PointSet& s) {
  std::vector<oracle::Point> out;
  for (const auto x : s) {
    oracle::Point p;
    for (unsigned i = 0; i < s.w(); ++i) p.push_back(static_cast<unsigned>(s.word(x, i)));
    out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

PointSet random_set(Rng& rng, unsigned n, unsigned w, std::uint64_t max_size) {
  const std::uint64_t size = 1 + rng.below(max_size);
  std::vector<std::uint64_t> pts;
  for (std::uint64_t i = 0; i < size; ++i) pts.push_back(rng.below(std::uint64_t{1} << (n * w)));
  return PointSet(n, w, pts);
}

bool all_ok(const std::vector<InvariantResult>& r) {
  return std::all_of(r.begin(), r.end(), [](const auto& x) { return x.ok; });
}

TEST_CASE("min-entropy") {
  const std::vector<std::uint64_t> eight = {0, 1, 2, 3, 4, 5, 6, 7};
  CHECK(min_entropy(FiniteDistribution::uniform(eight)) == doctest::Approx(3));
  CHECK(min_entropy(FiniteDistribution({{5, 1.0}})) == 0);
  CHECK(min_entropy(FiniteDistribution({{1, 0.5}, {2, 0.25}, {3, 0.25}})) == 1.0);
  CHECK_THROWS_AS(FiniteDistribution({{1, 0.5}, {2, 0.25}}), RangeError);
  CHECK_THROWS_AS(FiniteDistribution({{1, 0.5}, {1, 0.5}}), RangeError);
  CHECK_THROWS_AS(FiniteDistribution({{1, 1.5}, {2, -0.5}}), RangeError);
  CHECK_THROWS_AS(min_entropy(FiniteDistribution({})), EntropyError);
  CHECK(FiniteDistribution({{1, 1.0}, {2, 0.0}}).support_size() == 1);

  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto s = random_set(rng, 3, 2, 64);
    const auto d = FiniteDistribution::uniform(s.points());
    CHECK(min_entropy(d) == doctest::Approx(std::log2(static_cast<double>(s.size()))));
  }
}

TEST_CASE("coordinate marginals") {
  const PointSet s(2, 2, {0b0001, 0b0010, 0b0111});
  const auto m = coordinate_marginal(s, 0);
  REQUIRE(m.atoms().size() == 2);
  CHECK(m.atoms()[0].second == doctest::Approx(2.0 / 3));
  CHECK(min_entropy(coordinate_marginal(s, 1)) == doctest::Approx(std::log2(3.0)));
}

TEST_CASE("flat decompositions") {
  const std::vector<std::uint64_t> four = {1, 2, 3, 4};
  const auto flat = flat_decomposition_check(FiniteDistribution::uniform(four), 2);
  CHECK(flat.certified);
  REQUIRE(flat.components.size() == 1);
  CHECK(flat.components[0].weight == doctest::Approx(1));

  const std::vector<std::uint64_t> eight = {0, 1, 2, 3, 4, 5, 6, 7};
  const auto wide = flat_decomposition_check(FiniteDistribution::uniform(eight), 2);
  CHECK(wide.certified);
  CHECK(wide.residual_norm <= kFlatResidualTolerance);
  for (const auto& c : wide.components) CHECK(c.support.size() == 4);

  const auto low = flat_decomposition_check(FiniteDistribution({{1, 0.5}, {2, 0.25}, {3, 0.25}}), 2);
  CHECK_FALSE(low.precondition_met);
  CHECK_FALSE(low.certified);

  Rng rng(12);
  for (int t = 0; t < 200; ++t) {
    const unsigned k = static_cast<unsigned>(rng.below(4));
    const std::uint64_t support = (std::uint64_t{1} << k) + rng.below(12);
    // Random weights, clipped so no atom exceeds 2^-k.
    std::vector<double> wts(support);
    double total = 0;
    for (auto& x : wts) total += (x = 1 + rng.unit());
    for (auto& x : wts) x /= total;
    const double cap = std::ldexp(1.0, -static_cast<int>(k));
    if (*std::max_element(wts.begin(), wts.end()) > cap) continue;
    std::vector<std::pair<std::uint64_t, double>> atoms;
    for (std::uint64_t i = 0; i < support; ++i) atoms.emplace_back(i * 3, wts[i]);
    const auto r = flat_decomposition_check(FiniteDistribution(atoms), k);
    CHECK(r.precondition_met);
    CHECK(r.certified);
    double weight = 0;
    for (const auto& c : r.components) weight += c.weight;
    CHECK(weight == doctest::Approx(1).epsilon(1e-9));
  }
  CHECK_THROWS_AS(flat_decomposition_check(FiniteDistribution::uniform(eight), 30), BudgetError);
}

TEST_CASE("threshold comparisons") {
  CHECK(below_pow2(2, 1.5));
  CHECK_FALSE(below_pow2(3, 1.5));
  CHECK_FALSE(below_pow2(4, 2));
  CHECK(below_pow2(3, 2));
  CHECK_FALSE(below_pow2(1, -0.5));
  CHECK(above_pow2(5, 2));
  CHECK_FALSE(above_pow2(4, 2));
  CHECK(above_pow2(1, -1));
  CHECK(slice_exponent({1, 0.25, 0.25}, 3) == 1.5);
  CHECK(keep_exponent({1, 0.25, 0.25}, 3) == 2.75);
}

TEST_CASE("bottleneck slices") {
  const DecompositionParams p{1, 0.25, 0.25};
  const PointSet one(2, 3, {0b100111});
  const auto s = find_bottleneck_slice(one, p);
  REQUIRE(s.has_value());
  CHECK(s->index == 0);
  CHECK(s->value == 2);
  CHECK(s->points.size() == 1);

  std::vector<std::uint64_t> cube;
  for (std::uint64_t x = 0; x < 64; ++x) cube.push_back(x);
  // Every slice of the cube has 16 points; threshold 2^{2 (3 - 1 - 0 - 0)} = 16.
  CHECK_FALSE(find_bottleneck_slice(PointSet(2, 3, cube), {2, 0, 0}).has_value());

  const auto img = image_of_box(PermutationSpec::pi1(2), QBox(2, {{1, 2}, {0, 3}, {1, 3}}));
  const DecompositionParams half{1, 0.5, 0.5};
  const auto found = find_bottleneck_slice(img, half);
  // Naive scan: first (coordinate, value) whose slice has exactly one point.
  std::optional<std::pair<unsigned, std::uint64_t>> naive;
  for (unsigned i = 0; i < 3 && !naive; ++i) {
    std::map<std::uint64_t, int> count;
    for (const auto x : img) ++count[img.word(x, i)];
    for (const auto& [v, c] : count) {
      if (c < 2) {
        naive = {i, v};
        break;
      }
    }
  }
  CHECK(found.has_value() == naive.has_value());
  if (found && naive) {
    CHECK(found->index == naive->first);
    CHECK(found->value == naive->second);
  }
}

TEST_CASE("decompose edge cases") {
  const DecompositionParams p{1, 0.25, 0.25};
  const PointSet one(2, 3, {7});
  const auto d = decompose(one, p);
  CHECK(d.r1 == one);
  CHECK(d.r0.empty());
  for (const auto& c : d.parts) CHECK(c.empty());
  CHECK(d.slice_log.size() == 1);

  Rng rng(5);
  const auto s = random_set(rng, 2, 3, 40);
  const auto none = decompose(s, {1, 1.5, 1.5});
  CHECK(none.r0 == s);
  CHECK(none.r1.empty());
  CHECK(none.slice_log.empty());
  CHECK_THROWS_AS(decompose(s, {0, 0, 0}), RangeError);
}

TEST_CASE("decompose matches the straight-line trace") {
  const auto check_against_trace = [](const PointSet& s, const DecompositionParams& p) {
    const auto d = decompose(s, p);
    const auto t = oracle::trace_decompose(to_points(s), s.w(),
                                           std::exp2(static_cast<double>(slice_exponent(p, s.w()))),
                                           std::exp2(static_cast<double>(keep_exponent(p, s.w()))));
    auto sorted = [](std::vector<oracle::Point> v) {
      std::sort(v.begin(), v.end());
      return v;
    };
    CHECK(to_points(d.r0) == sorted(t.r0));
    CHECK(to_points(d.r1) == sorted(t.r1));
    for (unsigned i = 0; i < s.w(); ++i) CHECK(to_points(d.parts[i]) == sorted(t.kept[i]));
    CHECK(d.slice_log.size() == t.cuts);
  };
  const QBox bits(2, {{0, 1}, {0, 1}, {0, 1}});
  check_against_trace(image_of_box(PermutationSpec::pi1(2), bits), {1, 0.25, 0.25});

  Rng rng(77);
  // Parameters whose thresholds are far from integers.
  const std::vector<DecompositionParams> grid = {
      {1, 0.25, 0.25}, {1, 0.1, 0.3}, {2, 0.2, 0.15}, {1.5, 0.1, 0.2}, {1, -0.3, 0.1}};
  for (int t = 0; t < 300; ++t) {
    const auto s = random_set(rng, 2, 3, 64);
    for (const auto& p : grid) check_against_trace(s, p);
  }
}

TEST_CASE("decomposition invariants hold on random sets") {
  Rng rng(99);
  for (int t = 0; t < 300; ++t) {
    const unsigned w = 2 + static_cast<unsigned>(rng.below(3));
    const auto s = random_set(rng, 2, w, std::uint64_t{1} << (2 * w));
    for (const double an : {0.5, 1.0, 2.0}) {
      for (const double e1 : {0.0, 0.25, 0.5}) {
        for (const double e2 : {0.0, 0.25, 0.5}) {
          const auto d = decompose(s, {an, e1, e2});
          const auto inv = check_decomposition(s, d);
          CHECK(all_ok(inv));
          CHECK(d.slice_log.size() <= s.size());
        }
      }
    }
  }
}

TEST_CASE("invariant checks catch a tampered decomposition") {
  Rng rng(4);
  const auto s = random_set(rng, 2, 3, 64);
  auto d = decompose(s, {1, 0.25, 0.25});
  auto bad = d;
  bad.r0 = PointSet(2, 3, {});
  CHECK_FALSE(all_ok(check_decomposition(s, bad)));
  bad = d;
  bad.slice_log.push_back({99, 0, 3, 1});
  CHECK_FALSE(all_ok(check_decomposition(s, bad)));
  bad = d;
  std::vector<std::uint64_t> dup(d.r1.begin(), d.r1.end());
  dup.insert(dup.end(), d.r0.begin(), d.r0.end());
  if (!d.r0.empty()) {
    bad.r1 = PointSet(2, 3, dup);
    CHECK_FALSE(all_ok(check_decomposition(s, bad)));
  }
}

TEST_CASE("converse bounds") {
  const DecompositionParams p{1, 0.25, 0.25};
  const QBox u(2, {{0, 1}, {2, 3}, {1, 2}});
  const auto id_img = image_of_box(PermutationSpec::identity(2, 3), u);
  const auto pre = check_converse_precondition(id_img, 2, p, 0.1);
  CHECK(pre.max_intersection == 8);
  CHECK_FALSE(pre.holds);
  const auto rep = verify_converse_bounds(decompose(id_img, p), 0.1, pre);
  CHECK(rep.r0_bound.status == BoundStatus::Unverified);
  CHECK(rep.r1_bound.status == BoundStatus::Pass);
  CHECK(verify_converse_bounds(decompose(id_img, p), 0.1, std::nullopt).r0_bound.status ==
        BoundStatus::Unverified);

  const auto spec = PermutationSpec::pi1(2);
  const auto exact = exact_conductance(spec, 2);
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto img = image_of_box(spec, random_qbox(2, 2, 3, rng));
    const auto c = check_converse_precondition(img, 2, p, 0.1);
    CHECK(c.max_intersection <= exact.max_count);
    CHECK(intersection_count(img, c.witness) == c.max_intersection);
    const auto r = verify_converse_bounds(decompose(img, p), 0.1, c);
    CHECK(r.r1_bound.status == BoundStatus::Pass);
    CHECK(r.r0_bound.status != BoundStatus::Fail);
  }

  // With a larger threshold scale the precondition can hold; then the R0
  // bound must too.
  std::size_t held = 0;
  for (int t = 0; t < 200; ++t) {
    const auto s = random_set(rng, 2, 3, 64);
    const DecompositionParams big{2, 0.05, 0.05};
    const auto c = check_converse_precondition(s, 2, big, 0.05);
    const auto r = verify_converse_bounds(decompose(s, big), 0.05, c);
    if (c.holds) {
      ++held;
      CHECK(r.r0_bound.status == BoundStatus::Pass);
    } else {
      CHECK(r.r0_bound.status == BoundStatus::Unverified);
    }
  }
  CHECK(held > 0);
  CHECK(held < 200);
}

TEST_CASE("empirical condenser profile") {
  const auto id = empirical_condenser_profile(PermutationSpec::identity(2, 3), 2, 0.25, 0.25, 8, 1);
  CHECK(id.worst_gamma == 1);
  CHECK_FALSE(id.condenser_like);
  for (const auto& t : id.trials) CHECK(t.parts.empty());

  const auto spec = PermutationSpec::pi1(2);
  const auto p = empirical_condenser_profile(spec, 2, 0.25, 0.25, 16, 7);
  REQUIRE(p.trials.size() == 16);
  double sum = 0, worst = 0;
  for (const auto& t : p.trials) {
    const auto& d = t.decomposition;
    const double g = static_cast<double>(d.r0.size() + d.r1.size()) / 8.0;
    CHECK(t.gamma == g);
    sum += g;
    worst = std::max(worst, g);
    CHECK(d.input_size == 8);
    CHECK(image_of_box(spec, t.u).size() == 8);
    for (const auto& e : t.parts) {
      const auto& c = d.parts[e.index];
      std::map<std::uint64_t, std::uint64_t> sl;
      std::uint64_t mx = 0;
      for (const auto x : c) mx = std::max(mx, ++sl[c.word(x, e.index)]);
      CHECK(e.max_slice == mx);
      CHECK(e.min_entropy == doctest::Approx(min_entropy(coordinate_marginal(c, e.index))));
    }
  }
  CHECK(p.mean_gamma == doctest::Approx(sum / 16));
  CHECK(p.worst_gamma == worst);

  const auto threaded = empirical_condenser_profile(spec, 2, 0.25, 0.25, 16, 7, 4);
  for (std::size_t i = 0; i < 16; ++i) CHECK(threaded.trials[i].u == p.trials[i].u);
  CHECK(threaded.mean_gamma == p.mean_gamma);

  const auto empty = empirical_condenser_profile(spec, 2, 0.25, 0.25, 0, 7);
  CHECK(empty.trials.empty());
  CHECK_FALSE(empty.condenser_like);
}

}  // namespace
}  // namespace condlab
