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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "condlab/box.hpp"
#include "condlab/cli.hpp"
#include "condlab/condenser.hpp"
#include "condlab/conductance.hpp"
#include "condlab/gf2.hpp"
#include "condlab/permutation.hpp"
#include "condlab/random.hpp"
#include "oracle/gf_reference.hpp"
#include "oracle/naive_conductance.hpp"

namespace {

using namespace condlab;

// Pinned limits and tolerances.
constexpr double kFieldSeconds = 10;
constexpr double kBijectivitySeconds = 30;
constexpr double kConductanceSeconds = 300;
constexpr double kDecompositionSeconds = 60;
constexpr double kRoundTripRelTol = 1e-12;
constexpr int kRandomTables = 25;
constexpr int kDecompositionSets = 1000;
constexpr int kRoundTripValues = 100;
constexpr std::uint64_t kSeed = 20260101;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string secs(double s) {
  std::ostringstream o;
  o.precision(3);
  o << s << " s";
  return o.str();
}

std::vector<std::uint64_t> table_of(const PermutationSpec& s) {
  std::vector<std::uint64_t> t(std::uint64_t{1} << s.bits());
  for (std::uint64_t x = 0; x < t.size(); ++x) t[x] = s.eval_packed(x);
  return t;
}

// ---------------------------------------------------------------------------

Outcome field_suite() {
  Timer timer;
  Outcome o;
  std::uint64_t triples = 0, pairs = 0;
  for (const unsigned n : {2u, 3u, 5u}) {
    const auto r = gf2::selfcheck(n);
    triples += r.triples_checked;
    if (!r.exhaustive || !r.ok() || r.triples_checked != (std::uint64_t{1} << (3 * n))) {
      o.pass = false;
      o.detail += "axioms failed at n=" + std::to_string(n) + "; ";
    }
    const gf2::Field f(n);
    oracle::Poly m(n + 1, 0);
    for (unsigned k = 0; k < n; ++k) m[k] = static_cast<int>((f.poly().tail >> k) & 1);
    m[n] = 1;
    for (std::uint64_t a = 0; a < f.order(); ++a) {
      for (std::uint64_t b = 0; b < f.order(); ++b, ++pairs) {
        const auto got = gf2::gf_mul({a, n}, {b, n}, f.poly()).bits;
        if (got != oracle::schoolbook_mul(a, b, m)) {
          o.pass = false;
          o.detail += "product mismatch n=" + std::to_string(n) + "; ";
        }
      }
    }
  }
  const double t = timer.seconds();
  if (t >= kFieldSeconds) o.pass = false;
  o.detail += std::to_string(triples) + " triples, " + std::to_string(pairs) +
              " schoolbook pairs, " + secs(t);
  return o;
}

Outcome bijectivity_suite() {
  Timer timer;
  Outcome o;
  std::vector<std::pair<std::string, PermutationSpec>> cases;
  for (const unsigned n : {2u, 3u, 5u}) {
    cases.emplace_back("pi1 n=" + std::to_string(n), PermutationSpec::pi1(n));
    cases.emplace_back("pi2 n=" + std::to_string(n), PermutationSpec::pi2(n));
    cases.emplace_back("pi3 n=" + std::to_string(n), PermutationSpec::pi3(n));
  }
  for (unsigned w = 3; w <= 7; ++w) {
    cases.emplace_back("piw n=2 w=" + std::to_string(w), PermutationSpec::pi_w(2, w));
  }
  for (const unsigned n : {3u, 7u}) {
    cases.emplace_back("double n=" + std::to_string(n), PermutationSpec::double_condenser(n));
  }
  int ok = 0;
  for (const auto& [name, spec] : cases) {
    const auto r = verify_bijective(spec);
    if (r.bijective && r.exhaustive) {
      ++ok;
      continue;
    }
    o.pass = false;
    o.detail += name + " not bijective";
    if (r.witness) {
      o.detail += " (" + packed_hex(r.witness->first, spec.bits()) + " and " +
                  packed_hex(r.witness->second, spec.bits()) + " -> " +
                  packed_hex(r.witness->image, spec.bits()) + ")";
    }
    o.detail += "; ";
  }
  const double t = timer.seconds();
  if (t >= kBijectivitySeconds) o.pass = false;
  o.detail += std::to_string(ok) + "/" + std::to_string(cases.size()) + " bijective, " + secs(t);
  return o;
}

struct Instance {
  std::string name;
  PermutationSpec spec;
  std::uint64_t q;
  ConductanceReport exact;
};

std::vector<Instance> conductance_instances() {
  std::vector<std::pair<std::string, PermutationSpec>> specs;
  for (unsigned w = 1; w <= 3; ++w) {
    specs.emplace_back("identity w=" + std::to_string(w), PermutationSpec::identity(2, w));
  }
  specs.emplace_back("pi1", PermutationSpec::pi1(2));
  specs.emplace_back("pi3", PermutationSpec::pi3(2));
  for (unsigned w = 1; w <= 3; ++w) {
    for (int i = 0; i < kRandomTables; ++i) {
      const auto seed = derive_seed(kSeed + w, static_cast<std::uint64_t>(i));
      specs.emplace_back("random w=" + std::to_string(w) + " #" + std::to_string(i),
                         PermutationSpec::random_table(seed, 2, w));
    }
  }
  std::vector<Instance> out;
  for (const auto& [name, spec] : specs) {
    for (const std::uint64_t q : {1u, 2u}) out.push_back({name, spec, q, {}});
  }
  return out;
}

Outcome exactness_suite(std::vector<Instance>& instances) {
  Timer timer;
  Outcome o;
  int matched = 0;
  for (auto& in : instances) {
    in.exact = exact_conductance(in.spec, in.q);
    const auto naive = oracle::naive_max_count(table_of(in.spec), 2, in.spec.w(),
                                               static_cast<unsigned>(in.q));
    if (in.exact.max_count == naive) {
      ++matched;
    } else {
      o.pass = false;
      o.detail += in.name + " q=" + std::to_string(in.q) + ": " +
                  std::to_string(in.exact.max_count) + " vs oracle " + std::to_string(naive) + "; ";
    }
  }
  const double t = timer.seconds();
  if (t >= kConductanceSeconds) o.pass = false;
  o.detail += std::to_string(matched) + "/" + std::to_string(instances.size()) +
              " instances match the naive oracle, " + secs(t);
  return o;
}

Outcome range_suite(const std::vector<Instance>& instances) {
  Outcome o;
  int identities = 0;
  for (const auto& in : instances) {
    const double w = in.spec.w();
    if (in.spec.kind() == PermutationKind::Identity) {
      ++identities;
      if (in.exact.condd != w) {
        o.pass = false;
        o.detail += in.name + " condd " + std::to_string(in.exact.condd) + "; ";
      }
    }
    if (!(in.exact.condd >= 1.0 && in.exact.condd <= w)) {
      o.pass = false;
      o.detail += in.name + " condd out of range; ";
    }
  }
  o.detail += std::to_string(identities) + " identity runs at condd = w, " +
              std::to_string(instances.size()) + " runs within [1, w]";
  return o;
}

Outcome heuristic_suite(const std::vector<Instance>& instances) {
  Timer timer;
  Outcome o;
  int tight = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& in = instances[i];
    HeuristicOptions opt;
    opt.seed = derive_seed(kSeed, i);
    opt.threads = 1;
    const auto a = heuristic_lower_bound(in.spec, in.q, opt);
    const auto b = heuristic_lower_bound(in.spec, in.q, opt);
    opt.threads = 4;
    const auto c = heuristic_lower_bound(in.spec, in.q, opt);
    const bool sound = a.max_count <= in.exact.max_count && replay_witness(in.spec, a) == a.max_count;
    const bool same = a.max_count == b.max_count && a.witness_u == b.witness_u &&
                      a.witness_v == b.witness_v && a.max_count == c.max_count &&
                      a.witness_u == c.witness_u && a.witness_v == c.witness_v;
    tight += a.max_count == in.exact.max_count;
    if (!sound || !same) {
      o.pass = false;
      o.detail += in.name + (sound ? " nondeterministic; " : " unsound; ");
    }
  }
  o.detail += std::to_string(instances.size()) + " instances sound and deterministic (threads 1, 4), " +
              std::to_string(tight) + " reach the exact value, " + secs(timer.seconds());
  return o;
}

// Checks a decomposition directly against the set, without the library's checker.
bool decomposition_ok(const PointSet& s, const Decomposition& d, std::string& why) {
  const long double an = d.params.alpha_n;
  std::map<std::uint64_t, int> owner;
  std::size_t total = 0;
  auto claim = [&](const PointSet& part) {
    for (const auto x : part) ++owner[x];
    total += part.size();
  };
  for (const auto& c : d.parts) claim(c);
  claim(d.r0);
  claim(d.r1);
  if (total != s.size() || owner.size() != s.size()) {
    why = "not a partition";
    return false;
  }
  for (const auto x : s) {
    if (owner.count(x) == 0) {
      why = "point lost";
      return false;
    }
  }
  const long double w = d.w;
  const long double slice_cap = std::exp2l(an * (w - 1 - d.params.eps1 - d.params.eps2));
  const long double keep = std::exp2l(an * (w - d.params.eps2));
  for (unsigned i = 0; i < d.parts.size(); ++i) {
    const auto& c = d.parts[i];
    if (c.empty()) continue;
    if (!(static_cast<long double>(c.size()) > keep)) {
      why = "kept part too small";
      return false;
    }
    std::map<std::uint64_t, std::uint64_t> slices;
    for (const auto x : c) ++slices[c.word(x, i)];
    for (const auto& [v, n] : slices) {
      const long double size = n;
      if (!(size < slice_cap) ||
          !(size <= std::exp2l(-(1 + d.params.eps1) * an) * static_cast<long double>(c.size()))) {
        why = "fat slice in a kept part";
        return false;
      }
    }
  }
  if (static_cast<long double>(d.r1.size()) > w * keep) {
    why = "R1 too large";
    return false;
  }
  if (d.slice_log.size() > s.size()) {
    why = "too many cuts";
    return false;
  }
  return true;
}

Outcome decomposition_suite() {
  Timer timer;
  Outcome o;
  const std::vector<double> eps = {0.0, 0.1, 0.25, 0.5};
  Rng rng(kSeed);
  std::uint64_t runs = 0, kept = 0;
  for (int t = 0; t < kDecompositionSets; ++t) {
    const std::uint64_t size = 1 + rng.below(64);
    std::vector<std::uint64_t> all(64);
    for (std::uint64_t x = 0; x < 64; ++x) all[x] = x;
    rng.shuffle(std::span<std::uint64_t>(all));
    all.resize(size);
    const PointSet s(2, 3, all);
    for (const double e1 : eps) {
      for (const double e2 : eps) {
        const auto d = decompose(s, {1.0, e1, e2});
        ++runs;
        for (const auto& c : d.parts) kept += !c.empty();
        std::string why;
        bool ok = decomposition_ok(s, d, why);
        for (const auto& inv : check_decomposition(s, d)) {
          if (!inv.ok) {
            ok = false;
            why = inv.name;
          }
        }
        if (!ok && o.pass) o.detail += "set " + std::to_string(t) + ": " + why + "; ";
        o.pass = o.pass && ok;
      }
    }
  }
  const double t = timer.seconds();
  if (t >= kDecompositionSeconds) o.pass = false;
  o.detail += std::to_string(runs) + " decompositions, " + std::to_string(kept) + " kept parts, " +
              secs(t);
  return o;
}

Outcome converse_suite() {
  Outcome o;
  const auto spec = PermutationSpec::pi1(2);
  const std::vector<std::array<double, 3>> grid = {
      {0.0, 0.0, 0.0}, {0.1, 0.1, 0.1}, {0.25, 0.25, 0.1}, {0.5, 0.25, 0.25}, {0.0, 0.5, 0.2}};
  std::uint64_t held = 0, unverified = 0, passed = 0;
  for (const auto& [e1, e2, e3] : grid) {
    QBoxEnumerator boxes(2, 2, 3);
    while (auto u = boxes.next()) {
      const auto img = image_of_box(spec, *u);
      const DecompositionParams p{1.0, e1, e2};
      const auto pre = check_converse_precondition(img, 2, p, e3);
      const auto rep = verify_converse_bounds(decompose(img, p), e3, pre);
      if (pre.holds) {
        ++held;
        if (rep.r0_bound.status == BoundStatus::Pass) {
          ++passed;
        } else {
          o.pass = false;
        }
      } else if (rep.r0_bound.status == BoundStatus::Unverified) {
        ++unverified;
      } else {
        o.pass = false;
      }
      if (rep.r1_bound.status != BoundStatus::Pass) o.pass = false;
    }
  }
  // Control: a box is its own image under the identity.
  const QBox u(2, {{0, 1}, {0, 2}, {1, 3}});
  const auto id_img = image_of_box(PermutationSpec::identity(2, 3), u);
  const DecompositionParams p{1.0, 0.1, 0.1};
  const auto pre = check_converse_precondition(id_img, 2, p, 0.1);
  const auto rep = verify_converse_bounds(decompose(id_img, p), 0.1, pre);
  const bool control = !pre.holds && rep.r0_bound.status == BoundStatus::Unverified;
  o.pass = o.pass && control;
  o.detail = "pi1 over " + std::to_string(grid.size()) + " parameter triples x 216 boxes: precondition held " +
             std::to_string(held) + " times (R0 bound passed " + std::to_string(passed) +
             "), unverified " + std::to_string(unverified) + " times; identity control " +
             (control ? "unverified" : "WRONG");
  return o;
}

Outcome notation_suite() {
  Outcome o;
  Rng rng(kSeed);
  double worst = 0;
  for (int i = 0; i < kRoundTripValues; ++i) {
    const double q = 2 + static_cast<double>(rng.below(4095));
    const unsigned w = 1 + static_cast<unsigned>(rng.below(6));
    const double d = 1 + rng.unit() * (w - 1);
    const double cond = condd_to_cond(q, w, d);
    const double back = cond_to_condd(q, w, cond);
    const double fwd = condd_to_cond(q, w, back);
    worst = std::max({worst, std::abs(back - d) / d, std::abs(fwd - cond) / cond});
  }
  if (worst > kRoundTripRelTol) o.pass = false;

  using boost::multiprecision::cpp_int;
  int agree = 0, points = 0, sheet_agree = 0;
  for (const std::uint64_t q : {2u, 3u, 4u, 8u, 16u}) {
    for (const unsigned n : {2u, 3u, 4u, 6u, 8u}) {
      for (const unsigned w : {2u, 3u}) {
        ++points;
        const bool query = boost::multiprecision::pow(cpp_int(q), 2 * w) * 4 <= (cpp_int(1) << (n * w));
        bool alpha;
        if ((q & (q - 1)) == 0) {
          // alpha = k/n exactly: k/n <= 1/2 - 1/(nw)  <=>  2kw <= nw - 2.
          const long k = std::lround(std::log2(static_cast<double>(q)));
          alpha = 2 * k * static_cast<long>(w) <= static_cast<long>(n * w) - 2;
        } else {
          alpha = std::log2(static_cast<long double>(q)) / n <= 0.5L - 1.0L / (n * w);
        }
        agree += query == alpha;
        const auto sheet = bound_sheet({q, w, n, 0, 0, 0});
        sheet_agree += sheet.random_query_ok == query && sheet.random_alpha_ok == alpha &&
                       sheet.random_preconditions_agree;
      }
    }
  }
  if (agree != points || sheet_agree != points) o.pass = false;
  std::ostringstream d;
  d << kRoundTripValues << " round trips, worst relative error " << worst << "; precondition forms agree on "
    << agree << "/" << points << " grid points, bound sheet on " << sheet_agree;
  o.detail = d.str();
  return o;
}

Outcome bound_suite() {
  Outcome o;
  int checks = 0;
  for (const std::uint64_t q : {2u, 4u, 16u}) {
    for (const unsigned w : {2u, 3u, 5u}) {
      for (const double e1 : {0.0, 0.125, 0.3, 0.5}) {
        ++checks;
        if (bound_sheet({q, w, 4, e1, 0, 0}).condenser_bound.value != w - e1) o.pass = false;
      }
    }
  }
  for (const double c : {0.0, 0.05, 0.25, 0.5, 1.0}) {
    ++checks;
    if (bound_sheet({4, 3, 2, 0, 0, c}).repetition_bound.value != 3 - c) o.pass = false;
  }
  o.detail = std::to_string(checks) + " exact equalities checked";
  return o;
}

std::string run_experiment(unsigned threads) {
  const std::string t = std::to_string(threads);
  const char* argv[] = {"condlab", "experiment", "--count", "100", "--seed", "424242", "--threads", t.c_str()};
  std::ostringstream out, err;
  const int code = cli::run(8, argv, out, err);
  return code == 0 ? out.str() : "exit " + std::to_string(code) + ": " + err.str();
}

Outcome experiment_suite() {
  Timer timer;
  Outcome o;
  const auto a = run_experiment(1);
  const auto b = run_experiment(1);
  const auto c = run_experiment(4);
  o.pass = a == b && a == c && a.rfind("row,", 0) == 0;
  o.detail = std::to_string(a.size()) + " bytes, identical across 2 runs and threads {1, 4}: " +
             (o.pass ? "yes" : "no") + ", " + secs(timer.seconds());
  return o;
}

}  // namespace

int main() {
  std::vector<Instance> instances = conductance_instances();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"field arithmetic, exhaustive", field_suite},
      {"bijectivity", bijectivity_suite},
      {"conductance exactness", [&] { return exactness_suite(instances); }},
      {"conductance degree range", [&] { return range_suite(instances); }},
      {"heuristic soundness", [&] { return heuristic_suite(instances); }},
      {"decomposition invariants", decomposition_suite},
      {"converse conditional bound", converse_suite},
      {"cond / condd notation", notation_suite},
      {"bound sheet degeneracies", bound_suite},
      {"experiment determinism", experiment_suite},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << i + 1 << " " << (o.pass ? "PASS" : "FAIL") << "  "
              << criteria[i].first << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed;
}
