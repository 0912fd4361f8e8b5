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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "condlab/box.hpp"
#include "condlab/permutation.hpp"

namespace condlab {

// Probability distribution with finite explicit support. Keys are packed
// points or field elements; the caller fixes the interpretation.
class FiniteDistribution {
 public:
  // Throws RangeError on a negative probability, a duplicate key, or a total
  // more than 1e-12 away from 1. Zero-probability atoms are dropped.
  explicit FiniteDistribution(std::vector<std::pair<std::uint64_t, double>> atoms);

  static FiniteDistribution uniform(std::span<const std::uint64_t> keys);

  // Sorted by key.
  const std::vector<std::pair<std::uint64_t, double>>& atoms() const noexcept { return atoms_; }
  std::size_t support_size() const noexcept { return atoms_.size(); }
  double max_probability() const;

 private:
  std::vector<std::pair<std::uint64_t, double>> atoms_;
};

// -log2 of the largest atom. Throws EntropyError on an empty support.
double min_entropy(const FiniteDistribution& d);

// Distribution of word i of points drawn uniformly from s.
FiniteDistribution coordinate_marginal(const PointSet& s, unsigned i);

struct FlatComponent {
  double weight = 0;
  std::vector<std::uint64_t> support;  // exactly 2^k keys, sorted
};

struct FlatDecomposition {
  unsigned k = 0;
  bool precondition_met = false;  // H∞(d) >= k
  double min_entropy = 0;
  std::vector<FlatComponent> components;
  double residual_norm = 0;  // L1 distance between d and the combination
  bool certified = false;    // precondition met and residual <= 1e-9
};

inline constexpr double kFlatResidualTolerance = 1e-9;

// Writes d as a convex combination of flat distributions on 2^k-sets by
// peeling: repeatedly take the 2^k heaviest remaining atoms and remove as much
// uniform mass on them as keeps every atom below the new cap.
FlatDecomposition flat_decomposition_check(const FiniteDistribution& d, unsigned k,
                                           std::uint64_t budget = std::uint64_t{1} << 20);

// Real-valued parameters of the partitioning procedure. alpha_n is
// log2 of the box side (need not be an integer).
struct DecompositionParams {
  double alpha_n = 1;
  double eps1 = 0;
  double eps2 = 0;
};

// Slices of size strictly below 2^slice_exponent are bottlenecks; a part is
// kept when its size strictly exceeds 2^keep_exponent.
long double slice_exponent(const DecompositionParams& p, unsigned w);
long double keep_exponent(const DecompositionParams& p, unsigned w);

// size < 2^e and size > 2^e, comparing integer sizes against the real
// threshold in long double.
bool below_pow2(std::uint64_t size, long double e);
bool above_pow2(std::uint64_t size, long double e);

// Points of a set whose word `index` (0-based) equals `value`.
struct Slice {
  unsigned index = 0;
  std::uint64_t value = 0;
  PointSet points;
};

// First slice, by coordinate then value ascending, with 0 < size <
// 2^slice_exponent.
std::optional<Slice> find_bottleneck_slice(const PointSet& s, const DecompositionParams& p);

struct SliceCut {
  std::size_t iteration = 0;
  unsigned index = 0;
  std::uint64_t value = 0;
  std::uint64_t size = 0;
};

struct Decomposition {
  unsigned n = 0;
  unsigned w = 0;
  DecompositionParams params;
  long double slice_exponent = 0;
  long double keep_exponent = 0;
  std::uint64_t input_size = 0;
  std::vector<PointSet> parts;  // C_1..C_w, empty unless kept
  PointSet r0{1, 1};            // never contained a bottleneck slice
  PointSet r1{1, 1};            // cut slices whose part was too small
  std::vector<SliceCut> slice_log;
};

// Cuts bottleneck slices out of s one at a time until none is left; the
// remainder is R0. The cuts made on coordinate i form C_i when there are
// more than 2^keep_exponent of them, otherwise they go to R1.
Decomposition decompose(const PointSet& s, const DecompositionParams& p);

struct InvariantResult {
  std::string name;
  bool ok = true;
  std::string detail;
};

// Partition, size and slice bounds of a decomposition of `input`, plus a
// replay of the slice log.
std::vector<InvariantResult> check_decomposition(const PointSet& input, const Decomposition& d);

enum class BoundStatus { Pass, Fail, Unverified };
std::string to_string(BoundStatus s);

struct BoundCheck {
  std::string name;
  long double lhs = 0;
  long double rhs = 0;
  BoundStatus status = BoundStatus::Unverified;
};

// Largest |S ∩ V| over all q-boxes V (exact), against the real threshold
// 2^{alpha_n w (1 - eps1 - eps2 - eps3 - 1/alpha_n)}.
struct ConversePrecondition {
  std::uint64_t max_intersection = 0;
  QBox witness;
  long double exponent = 0;
  bool holds = false;
};

ConversePrecondition check_converse_precondition(const PointSet& s, std::uint64_t q,
                                                 const DecompositionParams& p, double eps3);

struct ConverseReport {
  double eps3 = 0;
  std::optional<ConversePrecondition> precondition;
  BoundCheck r1_bound;  // |R1| <= w 2^{(w - eps2) alpha_n}
  BoundCheck r0_bound;  // |R0| <= 2^{(1 - eps3) alpha_n w}, needs the precondition
};

ConverseReport verify_converse_bounds(const Decomposition& d, double eps3,
                                      const std::optional<ConversePrecondition>& pre);

struct PartEntropy {
  unsigned index = 0;
  std::uint64_t size = 0;
  std::uint64_t max_slice = 0;
  double min_entropy = 0;  // of word `index` under the uniform distribution on the part
  bool target_met = false;
};

struct TrialProfile {
  std::size_t trial = 0;
  QBox u;
  Decomposition decomposition;
  double gamma = 0;  // (|R0| + |R1|) / q^w
  std::vector<PartEntropy> parts;
};

struct CondenserProfile {
  std::uint64_t q = 0;
  double alpha_n = 0;
  double eps1 = 0;
  double eps2 = 0;
  double target = 0;  // (1 + eps1) alpha_n
  std::vector<TrialProfile> trials;
  double worst_gamma = 0;
  double mean_gamma = 0;
  bool all_targets_met = true;
  bool condenser_like = false;  // worst_gamma <= eps2 and all targets met
};

// Decomposes the images of `trials` seeded random q-boxes and measures each
// kept part's coordinate min-entropy against (1 + eps1) log2 q.
CondenserProfile empirical_condenser_profile(const PermutationSpec& spec, std::uint64_t q,
                                             double eps1, double eps2, std::size_t trials,
                                             std::uint64_t seed, unsigned threads = 1);

}  // namespace condlab
