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

#include "condlab/conductance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "condlab/error.hpp"
#include "condlab/random.hpp"

namespace condlab {
namespace {

struct ValueCount {
  std::uint64_t value;
  std::uint64_t count;
};

std::uint64_t word_of(std::uint64_t packed, unsigned i, unsigned n, unsigned w) {
  const unsigned shift = n * (w - 1 - i);
  return (shift >= 64 ? 0 : packed >> shift) & gf2::degree_mask(n);
}

// Distinct values of coordinate i, ascending, with multiplicities.
std::vector<ValueCount> histogram(std::span<const std::uint64_t> pts, unsigned i, unsigned n,
                                  unsigned w) {
  std::vector<std::uint64_t> vals;
  vals.reserve(pts.size());
  for (const auto p : pts) vals.push_back(word_of(p, i, n, w));
  std::sort(vals.begin(), vals.end());
  std::vector<ValueCount> out;
  for (const auto v : vals) {
    if (!out.empty() && out.back().value == v) ++out.back().count;
    else out.push_back({v, 1});
  }
  return out;
}

// Sum of the k largest counts in hist[from..].
std::uint64_t top_sum(const std::vector<ValueCount>& hist, std::size_t from, std::uint64_t k) {
  std::vector<std::uint64_t> counts;
  counts.reserve(hist.size() - from);
  for (std::size_t j = from; j < hist.size(); ++j) counts.push_back(hist[j].count);
  const std::size_t m = std::min<std::uint64_t>(k, counts.size());
  std::partial_sort(counts.begin(), counts.begin() + m, counts.end(), std::greater<>());
  std::uint64_t sum = 0;
  for (std::size_t j = 0; j < m; ++j) sum += counts[j];
  return sum;
}

std::uint64_t count_inside(const PointSet& s, const std::vector<std::vector<std::uint64_t>>& sides) {
  std::uint64_t count = 0;
  for (const auto p : s) {
    bool inside = true;
    for (unsigned i = 0; i < s.w() && inside; ++i) {
      inside = std::binary_search(sides[i].begin(), sides[i].end(), s.word(p, i));
    }
    count += inside;
  }
  return count;
}

std::uint64_t checked_universe(unsigned n, std::uint64_t q) {
  if (n > 63) throw RangeError("q-box search supports n <= 63");
  const std::uint64_t universe = std::uint64_t{1} << n;
  if (q == 0 || q > universe) throw RangeError("q must be in [1, 2^n], got " + std::to_string(q));
  return universe;
}

class InnerSearch {
 public:
  InnerSearch(const PointSet& s, std::uint64_t q, std::uint64_t node_budget)
      : s_(s),
        n_(s.n()),
        w_(s.w()),
        q_(q),
        universe_(checked_universe(s.n(), q)),
        node_budget_(node_budget) {}

  std::optional<BoxCount> run(std::uint64_t floor) {
    best_ = floor;
    found_ = true;
    if (s_.empty()) return std::nullopt;
    auto seed = greedy_V(s_, q_);
    if (seed.count > best_) {
      best_ = seed.count;
      found_ = false;
      best_sides_ = seed.box.sides();
    }
    cur_.assign(w_, {});
    std::vector<std::uint64_t> all(s_.begin(), s_.end());
    level(0, all);
    if (!found_) throw InvariantError("branch and bound lost the greedy incumbent");
    if (best_sides_.empty()) return std::nullopt;
    return BoxCount{QBox(n_, best_sides_), best_};
  }

 private:
  bool prune(std::uint64_t bound) const {
    return bound < best_ || (bound == best_ && found_);
  }

  void tick() {
    if (++nodes_ > node_budget_) {
      throw BudgetError("inner q-box search exceeded its node budget",
                        "> " + std::to_string(node_budget_), std::to_string(node_budget_));
    }
  }

  void level(unsigned i, const std::vector<std::uint64_t>& pts) {
    if (i == w_) {
      const std::uint64_t count = pts.size();
      if (count > best_ || (count == best_ && !found_)) {
        best_ = count;
        found_ = true;
        best_sides_ = cur_;
      }
      return;
    }
    const auto hist = histogram(pts, i, n_, w_);
    std::uint64_t later = pts.size();
    for (unsigned j = i + 1; j < w_; ++j) later = std::min(later, top_sum(histogram(pts, j, n_, w_), 0, q_));
    if (prune(std::min(top_sum(hist, 0, q_), later))) return;
    choose(i, pts, hist, 0, 0, 0, 0, later);
  }

  // Picks the values of side i in ascending order. Among values absent from
  // the current points only the smallest one not below `start` is tried: any
  // larger absent value adds nothing and leaves fewer, lexicographically later
  // completions.
  void choose(unsigned i, const std::vector<std::uint64_t>& pts,
              const std::vector<ValueCount>& hist, std::size_t fi, std::uint64_t start,
              std::uint64_t k, std::uint64_t sum, std::uint64_t later) {
    tick();
    if (k == q_) {
      std::vector<std::uint64_t> kept;
      const auto& side = cur_[i];
      for (const auto p : pts) {
        if (std::binary_search(side.begin(), side.end(), word_of(p, i, n_, w_))) kept.push_back(p);
      }
      level(i + 1, kept);
      return;
    }
    if (prune(std::min(sum + top_sum(hist, fi, q_ - k), later))) return;

    const std::uint64_t remaining = q_ - k;
    auto pick = [&](std::uint64_t v, std::uint64_t c, std::size_t next_fi) {
      if (universe_ - 1 - v < remaining - 1) return;
      cur_[i].push_back(v);
      choose(i, pts, hist, next_fi, v + 1, k + 1, sum + c, later);
      cur_[i].pop_back();
    };

    std::uint64_t absent = start;
    for (std::size_t j = fi; j < hist.size() && hist[j].value == absent; ++j) ++absent;
    bool absent_tried = absent >= universe_;
    for (std::size_t j = fi; j <= hist.size(); ++j) {
      const std::uint64_t next_present = j < hist.size() ? hist[j].value : universe_;
      if (!absent_tried && absent < next_present) {
        pick(absent, 0, j);
        absent_tried = true;
      }
      if (j == hist.size()) break;
      pick(hist[j].value, hist[j].count, j + 1);
    }
  }

  const PointSet& s_;
  unsigned n_;
  unsigned w_;
  std::uint64_t q_;
  std::uint64_t universe_;
  std::uint64_t node_budget_;
  std::uint64_t nodes_ = 0;
  std::uint64_t best_ = 0;
  bool found_ = true;
  std::vector<std::vector<std::uint64_t>> best_sides_;
  std::vector<std::vector<std::uint64_t>> cur_;
};

struct Incumbent {
  std::uint64_t count = 0;
  std::optional<QBox> u;
  std::optional<QBox> v;
};

Incumbent scan_range(const PermutationSpec& spec, std::uint64_t q, std::uint64_t lo,
                     std::uint64_t hi, std::uint64_t floor, std::uint64_t node_budget) {
  QBoxEnumerator boxes(spec.n(), q, spec.w(), ~std::uint64_t{0});
  boxes.seek_index(lo);
  Incumbent inc;
  inc.count = floor;
  for (std::uint64_t idx = lo; idx < hi; ++idx) {
    QBox u = *boxes.next();
    const PointSet image = image_of_box(spec, u);
    if (auto r = best_V_above(image, q, inc.count, node_budget)) {
      inc.count = r->count;
      inc.u = std::move(u);
      inc.v = std::move(r->box);
    }
  }
  return inc;
}

// Runs fn(t) for t in [0, threads) and rethrows the first worker exception.
template <typename Fn>
void run_parallel(unsigned threads, Fn&& fn) {
  if (threads <= 1) {
    fn(0u);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          fn(t);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ConductanceReport make_report(const PermutationSpec& spec, std::uint64_t q, SearchMode mode) {
  ConductanceReport r;
  r.n = spec.n();
  r.w = spec.w();
  r.q = q;
  r.alpha = std::log2(static_cast<double>(q)) / spec.n();
  r.mode = mode;
  r.spec = spec.descriptor();
  return r;
}

}  // namespace

std::string to_string(SearchMode m) { return m == SearchMode::Exact ? "exact" : "heuristic"; }

double condd_from_count(std::uint64_t count, std::uint64_t q, unsigned w) {
  if (q <= 1) return w;
  if (count == 0) throw RangeError("conductance count must be positive");
  unsigned __int128 power = 1;
  for (unsigned k = 0; k <= 64 && power <= count; ++k) {
    if (power == count) return k;
    power *= q;
  }
  return std::log(static_cast<double>(count)) / std::log(static_cast<double>(q));
}

BoxCount best_V_for_U(const PointSet& s, std::uint64_t q, std::uint64_t node_budget) {
  if (s.empty()) throw RangeError("best_V_for_U needs a nonempty point set");
  auto r = InnerSearch(s, q, node_budget).run(0);
  return std::move(*r);
}

std::optional<BoxCount> best_V_above(const PointSet& s, std::uint64_t q, std::uint64_t floor,
                                     std::uint64_t node_budget) {
  return InnerSearch(s, q, node_budget).run(floor);
}

BoxCount greedy_V(const PointSet& s, std::uint64_t q) {
  const unsigned n = s.n(), w = s.w();
  const std::uint64_t universe = checked_universe(n, q);
  std::vector<std::vector<ValueCount>> hists(w);
  std::vector<std::vector<std::uint64_t>> sides(w);
  for (unsigned i = 0; i < w; ++i) {
    hists[i] = histogram(s.points(), i, n, w);
    auto ranked = hists[i];
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const ValueCount& a, const ValueCount& b) { return a.count > b.count; });
    for (std::size_t j = 0; j < ranked.size() && sides[i].size() < q; ++j) {
      sides[i].push_back(ranked[j].value);
    }
    std::sort(sides[i].begin(), sides[i].end());
    std::vector<std::uint64_t> fill;
    for (std::uint64_t v = 0; sides[i].size() + fill.size() < q && v < universe; ++v) {
      if (!std::binary_search(sides[i].begin(), sides[i].end(), v)) fill.push_back(v);
    }
    sides[i].insert(sides[i].end(), fill.begin(), fill.end());
    std::sort(sides[i].begin(), sides[i].end());
  }

  std::uint64_t count = count_inside(s, sides);
  for (bool improved = true; improved;) {
    improved = false;
    for (unsigned i = 0; i < w && !improved; ++i) {
      for (std::size_t out = 0; out < sides[i].size() && !improved; ++out) {
        for (const auto& candidate : hists[i]) {
          if (std::binary_search(sides[i].begin(), sides[i].end(), candidate.value)) continue;
          auto trial = sides;
          trial[i][out] = candidate.value;
          std::sort(trial[i].begin(), trial[i].end());
          const std::uint64_t c = count_inside(s, trial);
          if (c > count) {
            count = c;
            sides = std::move(trial);
            improved = true;
            break;
          }
        }
      }
    }
  }
  return BoxCount{QBox(n, std::move(sides)), count};
}

ConductanceReport exact_conductance(const PermutationSpec& spec, std::uint64_t q,
                                    const ExactOptions& options) {
  const auto start_time = std::chrono::steady_clock::now();
  checked_universe(spec.n(), q);
  QBoxEnumerator boxes(spec.n(), q, spec.w(), options.outer_budget);
  const std::uint64_t total = boxes.total();

  Incumbent global;
  std::uint64_t start = 0;
  if (options.checkpoint && std::filesystem::exists(*options.checkpoint)) {
    const Checkpoint ck = read_checkpoint(*options.checkpoint, spec.n());
    if (ck.digest != spec.digest() || ck.q != q || ck.cursor.size() != spec.w()) {
      throw Error("checkpoint " + options.checkpoint->string() +
                  " belongs to a different search; remove it or choose another path");
    }
    start = boxes.index_of(ck.cursor);
    global.count = ck.max_count;
    global.u = ck.witness_u;
    global.v = ck.witness_v;
  }

  const unsigned threads = std::max(1u, options.threads);
  const std::uint64_t block =
      options.checkpoint ? std::max<std::uint64_t>(1, options.checkpoint_every) : total;
  for (std::uint64_t lo = start; lo < total;) {
    const std::uint64_t hi = std::min(total, lo + block);
    const std::uint64_t span = hi - lo;
    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, span));
    std::vector<Incumbent> results(workers);
    run_parallel(workers, [&](unsigned t) {
      const std::uint64_t a = lo + span * t / workers;
      const std::uint64_t b = lo + span * (t + 1) / workers;
      results[t] = scan_range(spec, q, a, b, global.count, options.node_budget);
    });
    for (auto& r : results) {
      if (r.u && r.count > global.count) global = std::move(r);
    }
    lo = hi;
    if (options.checkpoint) {
      Checkpoint ck;
      ck.digest = spec.digest();
      ck.q = q;
      ck.cursor = boxes.cursor_of(lo);
      ck.max_count = global.count;
      ck.witness_u = global.u;
      ck.witness_v = global.v;
      ck.boxes_examined = lo;
      write_checkpoint(*options.checkpoint, ck);
    }
  }
  if (!global.u) throw InvariantError("exact search finished without a witness");

  ConductanceReport rep = make_report(spec, q, SearchMode::Exact);
  rep.max_count = global.count;
  rep.condd = condd_from_count(global.count, q, spec.w());
  rep.witness_u = *global.u;
  rep.witness_v = *global.v;
  rep.boxes_examined = total;
  rep.exhausted = true;
  if (replay_witness(spec, rep) != rep.max_count) {
    throw InvariantError("exact conductance witness does not replay");
  }
  rep.wall_seconds = seconds_since(start_time);
  return rep;
}

namespace {

struct Candidate {
  std::uint64_t count = 0;
  QBox u;
  QBox v;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.count != b.count) return a.count > b.count;
  if (a.u != b.u) return a.u < b.u;
  return a.v < b.v;
}

Candidate evaluate(const PermutationSpec& spec, const QBox& u, std::uint64_t q) {
  auto g = greedy_V(image_of_box(spec, u), q);
  return Candidate{g.count, u, std::move(g.box)};
}

// Replaces one value of one side of u with a random value not already there.
QBox neighbour(const QBox& u, std::uint64_t universe, Rng& rng) {
  auto sides = u.sides();
  const std::size_t i = rng.below(sides.size());
  const std::size_t pos = rng.below(sides[i].size());
  std::uint64_t v;
  do {
    v = rng.below(universe);
  } while (std::binary_search(sides[i].begin(), sides[i].end(), v));
  sides[i][pos] = v;
  return QBox(u.n(), std::move(sides));
}

Candidate climb(const PermutationSpec& spec, std::uint64_t q, std::uint64_t evaluations,
                std::uint64_t stall_limit, Rng& rng) {
  const std::uint64_t universe = std::uint64_t{1} << spec.n();
  Candidate current = evaluate(spec, random_qbox(spec.n(), q, spec.w(), rng), q);
  Candidate best = current;
  std::uint64_t stall = 0;
  for (std::uint64_t used = 1; used < evaluations; ++used) {
    if (q == universe) break;  // the only q-box is the full cube
    if (stall >= stall_limit) {
      current = evaluate(spec, random_qbox(spec.n(), q, spec.w(), rng), q);
      stall = 0;
    } else {
      Candidate next = evaluate(spec, neighbour(current.u, universe, rng), q);
      if (next.count >= current.count) current = std::move(next);
      ++stall;
    }
    if (better(current, best)) {
      if (current.count > best.count) stall = 0;
      best = current;
    }
  }
  return best;
}

}  // namespace

ConductanceReport heuristic_lower_bound(const PermutationSpec& spec, std::uint64_t q,
                                        const HeuristicOptions& options) {
  const auto start_time = std::chrono::steady_clock::now();
  checked_universe(spec.n(), q);
  const unsigned restarts = std::max(1u, options.restarts);
  const std::uint64_t per_restart = std::max<std::uint64_t>(1, options.budget / restarts);
  std::vector<std::optional<Candidate>> results(restarts);
  const unsigned threads = std::min(std::max(1u, options.threads), restarts);
  run_parallel(threads, [&](unsigned t) {
    for (unsigned r = t; r < restarts; r += threads) {
      Rng rng(derive_seed(options.seed, r));
      results[r] = climb(spec, q, per_restart, options.stall_limit, rng);
    }
  });
  Candidate best = *results[0];
  for (unsigned r = 1; r < restarts; ++r) {
    if (better(*results[r], best)) best = *results[r];
  }

  ConductanceReport rep = make_report(spec, q, SearchMode::Heuristic);
  rep.max_count = best.count;
  rep.condd = condd_from_count(best.count, q, spec.w());
  rep.witness_u = best.u;
  rep.witness_v = best.v;
  rep.boxes_examined = per_restart * restarts;
  rep.exhausted = false;
  if (replay_witness(spec, rep) != rep.max_count) {
    throw InvariantError("heuristic witness does not replay");
  }
  rep.wall_seconds = seconds_since(start_time);
  return rep;
}

std::uint64_t replay_witness(const PermutationSpec& spec, const ConductanceReport& report) {
  return intersection_count(image_of_box(spec, report.witness_u), report.witness_v);
}

double condd_to_cond(double q, unsigned w, double condd) {
  if (!(q >= 2)) throw RangeError("q must be at least 2");
  if (!(condd >= 1 && condd <= w)) {
    throw RangeError("condd must lie in [1, " + std::to_string(w) + "]");
  }
  return std::pow(q, condd);
}

double cond_to_condd(double q, unsigned w, double cond) {
  if (!(q >= 2)) throw RangeError("q must be at least 2");
  const double hi = std::pow(q, w);
  const double slack = 1e-12;
  if (!(cond >= q * (1 - slack) && cond <= hi * (1 + slack))) {
    throw RangeError("cond must lie in [q, q^w]");
  }
  return std::log(cond) / std::log(q);
}

BoundSheet bound_sheet(const BoundInputs& in) {
  BoundSheet sheet;
  sheet.inputs = in;
  const double w = in.w;
  const double log2q = std::log2(static_cast<double>(in.q));
  sheet.alpha = log2q / in.n;
  sheet.n_prime = is_prime(in.n);

  auto in_range = [&](double v) { return v >= 1 && v <= w; };

  // log_q(q^{w-e1} + e2 q^w) = w - e1 + log_q(1 + e2 q^{e1}).
  if (in.q >= 2) {
    const double q = static_cast<double>(in.q);
    const double v = w - in.eps1 + std::log1p(in.eps2 * std::pow(q, in.eps1)) / std::log(q);
    sheet.condenser_bound = {v, !(in.eps1 >= 0 && in.eps2 >= 0 && in_range(v))};
  } else {
    sheet.condenser_bound = {std::nan(""), true};
  }

  const double rep = w - std::floor(w / 3) * in.c;
  sheet.repetition_bound = {rep, !(in.w >= 3 && in.c > 0 && in_range(rep))};

  const long double nw = static_cast<long double>(in.n) * in.w;
  sheet.random_alpha_ok =
      static_cast<long double>(sheet.alpha) <= 0.5L - 1.0L / nw + 1e-12L;
  {
    const BigCount lhs = boost::multiprecision::pow(BigCount(in.q), 2 * in.w) * 4;
    const BigCount rhs = BigCount(1) << static_cast<unsigned>(in.n * in.w);
    sheet.random_query_ok = lhs <= rhs;
  }
  sheet.random_preconditions_agree = sheet.random_alpha_ok == sheet.random_query_ok;
  if (in.q >= 2) {
    const double v = 1 + std::log2(3.0 * in.n * in.w) / log2q;
    sheet.random_bound = {v, !(sheet.random_alpha_ok && in_range(v))};
  } else {
    sheet.random_bound = {std::nan(""), true};
  }
  return sheet;
}

}  // namespace condlab
