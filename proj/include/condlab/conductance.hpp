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
#include <filesystem>
#include <optional>
#include <string>

#include "condlab/box.hpp"
#include "condlab/permutation.hpp"

namespace condlab {

enum class SearchMode { Exact, Heuristic };
std::string to_string(SearchMode m);

// Outcome of a conductance search. max_count = q^condd; for exact reports it
// is the maximum of |pi(U) ∩ V| over all pairs of q-boxes, for heuristic
// reports a lower bound certified by the witnesses.
struct ConductanceReport {
  unsigned n = 0;
  unsigned w = 0;
  std::uint64_t q = 0;
  double alpha = 0;  // log2(q) / n
  SearchMode mode = SearchMode::Exact;
  std::uint64_t max_count = 0;
  double condd = 0;
  QBox witness_u;
  QBox witness_v;
  std::uint64_t boxes_examined = 0;
  bool exhausted = false;
  double wall_seconds = 0;
  std::string spec;  // PermutationSpec::descriptor()

  bool q_power_of_two() const noexcept { return q != 0 && (q & (q - 1)) == 0; }
};

// log_q(count), exact when count is an integral power of q. For q = 1 every
// degree satisfies 1 = 1^d; w is reported.
double condd_from_count(std::uint64_t count, std::uint64_t q, unsigned w);

struct BoxCount {
  QBox box;
  std::uint64_t count = 0;
};

inline constexpr std::uint64_t kDefaultNodeBudget = 100'000'000;

// Exact max over all q-boxes V of |S ∩ V| by branch and bound over the sides
// of V, pruning with per-coordinate top-q frequency sums. Ties resolve to the
// lexicographically smallest V.
BoxCount best_V_for_U(const PointSet& s, std::uint64_t q,
                      std::uint64_t node_budget = kDefaultNodeBudget);

// As best_V_for_U, restricted to boxes with count strictly above `floor`;
// nullopt when none exists.
std::optional<BoxCount> best_V_above(const PointSet& s, std::uint64_t q, std::uint64_t floor,
                                     std::uint64_t node_budget = kDefaultNodeBudget);

// Top-q most frequent values per coordinate, then 1-swap improvement.
BoxCount greedy_V(const PointSet& s, std::uint64_t q);

struct ExactOptions {
  std::uint64_t outer_budget = kDefaultEnumerationBudget;
  std::uint64_t node_budget = kDefaultNodeBudget;
  unsigned threads = 1;
  // When set, progress is written there every `checkpoint_every` boxes and a
  // matching file found at start is resumed from.
  std::optional<std::filesystem::path> checkpoint;
  std::uint64_t checkpoint_every = 4096;
};

ConductanceReport exact_conductance(const PermutationSpec& spec, std::uint64_t q,
                                    const ExactOptions& options = {});

struct HeuristicOptions {
  std::uint64_t budget = 2000;  // q-box evaluations, split across restarts
  std::uint64_t seed = 0;
  unsigned restarts = 8;
  unsigned threads = 1;
  std::uint64_t stall_limit = 64;  // non-improving moves before re-seeding U
};

ConductanceReport heuristic_lower_bound(const PermutationSpec& spec, std::uint64_t q,
                                        const HeuristicOptions& options = {});

// Recomputes |pi(witness_u) ∩ witness_v|.
std::uint64_t replay_witness(const PermutationSpec& spec, const ConductanceReport& report);

// cond = q^condd, the conductance in query-count notation. Range-checked
// against [1, w] and [q, q^w] respectively.
double condd_to_cond(double q, unsigned w, double condd);
double cond_to_condd(double q, unsigned w, double cond);

struct BoundInputs {
  std::uint64_t q = 2;
  unsigned w = 3;
  unsigned n = 1;
  double eps1 = 0;
  double eps2 = 0;
  double c = 0;
};

struct BoundValue {
  double value = 0;
  bool vacuous = false;  // outside [1, w] or preconditions unmet
};

struct BoundSheet {
  BoundInputs inputs;
  double alpha = 0;
  // log_q(q^{w - eps1} + eps2 q^w) for an (alpha, eps1, eps2) condenser.
  BoundValue condenser_bound;
  // w - floor(w/3) c for the serial repetition of the triple construction.
  BoundValue repetition_bound;
  // 1 + log2(3nw) / (alpha n) for almost every random permutation.
  BoundValue random_bound;
  bool random_alpha_ok = false;   // alpha <= 1/2 - 1/(nw)
  bool random_query_ok = false;   // q^{2w} <= 2^{nw} / 4, evaluated exactly
  bool random_preconditions_agree = false;
  bool n_prime = false;
};

BoundSheet bound_sheet(const BoundInputs& in);

// Exact-search checkpoint ("condlab-ckpt v1").
struct Checkpoint {
  std::uint64_t digest = 0;
  std::uint64_t q = 0;
  Cursor cursor;
  std::uint64_t max_count = 0;
  std::optional<QBox> witness_u;
  std::optional<QBox> witness_v;
  std::uint64_t boxes_examined = 0;
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint read_checkpoint(const std::filesystem::path& path, unsigned n);

}  // namespace condlab
