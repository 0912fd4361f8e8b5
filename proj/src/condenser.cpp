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

#include "condlab/condenser.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "condlab/conductance.hpp"
#include "condlab/error.hpp"
#include "condlab/random.hpp"

namespace condlab {

FiniteDistribution::FiniteDistribution(std::vector<std::pair<std::uint64_t, double>> atoms) {
  std::sort(atoms.begin(), atoms.end());
  double total = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(atoms[i].second >= 0)) throw RangeError("negative or NaN probability");
    if (i > 0 && atoms[i].first == atoms[i - 1].first) throw RangeError("duplicate support key");
    total += atoms[i].second;
  }
  if (!atoms.empty() && std::abs(total - 1.0) > 1e-12) {
    throw RangeError("probabilities sum to " + std::to_string(total) + ", not 1");
  }
  for (auto& a : atoms) {
    if (a.second > 0) atoms_.push_back(a);
  }
}

FiniteDistribution FiniteDistribution::uniform(std::span<const std::uint64_t> keys) {
  std::vector<std::pair<std::uint64_t, double>> atoms;
  atoms.reserve(keys.size());
  const double p = 1.0 / static_cast<double>(keys.size());
  for (const auto k : keys) atoms.emplace_back(k, p);
  // Rounding of p * |keys| can exceed the 1e-12 tolerance only for huge sets.
  return FiniteDistribution(std::move(atoms));
}

double FiniteDistribution::max_probability() const {
  double m = 0;
  for (const auto& a : atoms_) m = std::max(m, a.second);
  return m;
}

double min_entropy(const FiniteDistribution& d) {
  if (d.support_size() == 0) throw EntropyError("min-entropy of an empty distribution");
  return -std::log2(d.max_probability());
}

FiniteDistribution coordinate_marginal(const PointSet& s, unsigned i) {
  if (s.empty()) throw EntropyError("marginal of an empty set");
  std::map<std::uint64_t, std::uint64_t> counts;
  for (const auto p : s) ++counts[s.word(p, i)];
  std::vector<std::pair<std::uint64_t, double>> atoms;
  const double total = static_cast<double>(s.size());
  for (const auto& [v, c] : counts) atoms.emplace_back(v, static_cast<double>(c) / total);
  return FiniteDistribution(std::move(atoms));
}

FlatDecomposition flat_decomposition_check(const FiniteDistribution& d, unsigned k,
                                           std::uint64_t budget) {
  FlatDecomposition out;
  out.k = k;
  if (d.support_size() == 0) throw EntropyError("flat decomposition of an empty distribution");
  if (k >= 63 || (std::uint64_t{1} << k) > budget || d.support_size() > budget) {
    throw BudgetError("flat decomposition too large", "2^" + std::to_string(k),
                      std::to_string(budget));
  }
  out.min_entropy = min_entropy(d);
  const std::size_t size = std::size_t{1} << k;
  const double cap = std::ldexp(1.0, -static_cast<int>(k));
  out.precondition_met = d.max_probability() <= cap * (1 + 1e-12) && d.support_size() >= size;
  if (!out.precondition_met) return out;

  const auto& atoms = d.atoms();
  const std::size_t total = atoms.size();
  std::vector<double> rest(total);
  for (std::size_t i = 0; i < total; ++i) rest[i] = atoms[i].second;
  std::vector<std::size_t> order(total);
  const double K = static_cast<double>(size);

  for (std::size_t step = 0; step < 4 * total + 16; ++step) {
    const double mass = std::accumulate(rest.begin(), rest.end(), 0.0);
    if (mass <= 1e-15) break;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rest[a] > rest[b]; });
    const double min_in = rest[order[size - 1]];
    const double max_out = size < total ? rest[order[size]] : 0.0;
    const double lambda = std::min(K * min_in, mass - K * max_out);
    if (!(lambda > 0)) break;
    FlatComponent comp;
    comp.weight = lambda;
    for (std::size_t j = 0; j < size; ++j) {
      const std::size_t x = order[j];
      rest[x] = rest[x] == min_in && lambda == K * min_in ? 0.0 : std::max(0.0, rest[x] - lambda / K);
      comp.support.push_back(atoms[x].first);
    }
    std::sort(comp.support.begin(), comp.support.end());
    out.components.push_back(std::move(comp));
  }

  // Re-sum the combination independently of the peeling state.
  std::map<std::uint64_t, double> rebuilt;
  for (const auto& c : out.components) {
    for (const auto key : c.support) rebuilt[key] += c.weight / K;
  }
  double residual = 0;
  for (const auto& [key, p] : atoms) {
    auto it = rebuilt.find(key);
    residual += std::abs(p - (it == rebuilt.end() ? 0.0 : it->second));
    if (it != rebuilt.end()) rebuilt.erase(it);
  }
  for (const auto& [key, p] : rebuilt) residual += std::abs(p);
  out.residual_norm = residual;
  out.certified = residual <= kFlatResidualTolerance;
  return out;
}

long double slice_exponent(const DecompositionParams& p, unsigned w) {
  return static_cast<long double>(p.alpha_n) *
         (static_cast<long double>(w) - 1 - p.eps1 - p.eps2);
}

long double keep_exponent(const DecompositionParams& p, unsigned w) {
  return static_cast<long double>(p.alpha_n) * (static_cast<long double>(w) - p.eps2);
}

bool below_pow2(std::uint64_t size, long double e) {
  if (e >= 64) return true;
  if (e < 0) return size == 0;
  return static_cast<long double>(size) < std::exp2l(e);
}

bool above_pow2(std::uint64_t size, long double e) {
  if (e >= 64) return false;
  if (e < 0) return size >= 1;
  return static_cast<long double>(size) > std::exp2l(e);
}

namespace {

using Histograms = std::vector<std::map<std::uint64_t, std::uint64_t>>;

Histograms histograms_of(std::span<const std::uint64_t> pts, const PointSet& shape) {
  Histograms h(shape.w());
  for (const auto p : pts) {
    for (unsigned i = 0; i < shape.w(); ++i) ++h[i][shape.word(p, i)];
  }
  return h;
}

std::optional<std::pair<unsigned, std::uint64_t>> first_bottleneck(const Histograms& h,
                                                                   long double e) {
  for (unsigned i = 0; i < h.size(); ++i) {
    for (const auto& [value, count] : h[i]) {
      if (count > 0 && below_pow2(count, e)) return std::pair{i, value};
    }
  }
  return std::nullopt;
}

void require_params(const DecompositionParams& p) {
  if (!(p.alpha_n > 0) || !std::isfinite(p.eps1) || !std::isfinite(p.eps2)) {
    throw RangeError("decomposition needs alpha_n > 0 and finite eps1, eps2");
  }
}

}  // namespace

std::optional<Slice> find_bottleneck_slice(const PointSet& s, const DecompositionParams& p) {
  require_params(p);
  const auto hit = first_bottleneck(histograms_of(s.points(), s), slice_exponent(p, s.w()));
  if (!hit) return std::nullopt;
  std::vector<std::uint64_t> pts;
  for (const auto x : s) {
    if (s.word(x, hit->first) == hit->second) pts.push_back(x);
  }
  return Slice{hit->first, hit->second, PointSet(s.n(), s.w(), std::move(pts))};
}

Decomposition decompose(const PointSet& s, const DecompositionParams& p) {
  require_params(p);
  const unsigned n = s.n(), w = s.w();
  Decomposition d;
  d.n = n;
  d.w = w;
  d.params = p;
  d.slice_exponent = slice_exponent(p, w);
  d.keep_exponent = keep_exponent(p, w);
  d.input_size = s.size();

  std::vector<std::uint64_t> rest(s.begin(), s.end());
  Histograms hist = histograms_of(rest, s);
  std::vector<std::vector<std::uint64_t>> cut(w);

  while (auto hit = first_bottleneck(hist, d.slice_exponent)) {
    const auto [i, value] = *hit;
    std::vector<std::uint64_t> kept;
    kept.reserve(rest.size());
    std::uint64_t removed = 0;
    for (const auto x : rest) {
      if (s.word(x, i) != value) {
        kept.push_back(x);
        continue;
      }
      cut[i].push_back(x);
      ++removed;
      for (unsigned j = 0; j < w; ++j) {
        auto it = hist[j].find(s.word(x, j));
        if (--it->second == 0) hist[j].erase(it);
      }
    }
    rest = std::move(kept);
    d.slice_log.push_back(SliceCut{d.slice_log.size(), i, value, removed});
  }

  d.r0 = PointSet(n, w, std::move(rest));
  std::vector<std::uint64_t> r1;
  for (unsigned i = 0; i < w; ++i) {
    if (above_pow2(cut[i].size(), d.keep_exponent)) {
      d.parts.emplace_back(n, w, std::move(cut[i]));
    } else {
      r1.insert(r1.end(), cut[i].begin(), cut[i].end());
      d.parts.emplace_back(n, w);
    }
  }
  d.r1 = PointSet(n, w, std::move(r1));
  return d;
}

std::vector<InvariantResult> check_decomposition(const PointSet& input, const Decomposition& d) {
  std::vector<InvariantResult> out;
  auto report = [&](std::string name, bool ok, std::string detail = {}) {
    out.push_back({std::move(name), ok, std::move(detail)});
  };

  // Partition.
  std::vector<std::uint64_t> all;
  std::size_t total = d.r0.size() + d.r1.size();
  all.insert(all.end(), d.r0.begin(), d.r0.end());
  all.insert(all.end(), d.r1.begin(), d.r1.end());
  for (const auto& c : d.parts) {
    total += c.size();
    all.insert(all.end(), c.begin(), c.end());
  }
  std::sort(all.begin(), all.end());
  const bool disjoint = std::adjacent_find(all.begin(), all.end()) == all.end();
  report("parts pairwise disjoint", disjoint);
  report("union equals input",
         all.size() == total && std::equal(all.begin(), all.end(), input.begin(), input.end()),
         std::to_string(total) + " points in parts, " + std::to_string(input.size()) + " in input");

  // Kept parts: size and slice bounds.
  const long double entropy_gap = (1 + static_cast<long double>(d.params.eps1)) * d.params.alpha_n;
  bool size_ok = true, slice_ok = true, literal_ok = true;
  std::ostringstream why;
  for (unsigned i = 0; i < d.parts.size(); ++i) {
    const auto& c = d.parts[i];
    if (c.empty()) continue;
    if (!above_pow2(c.size(), d.keep_exponent)) {
      size_ok = false;
      why << "C_" << i + 1 << " has only " << c.size() << " points; ";
    }
    std::map<std::uint64_t, std::uint64_t> slices;
    for (const auto x : c) ++slices[c.word(x, i)];
    for (const auto& [value, count] : slices) {
      if (!below_pow2(count, d.slice_exponent)) {
        slice_ok = false;
        why << "C_" << i + 1 << " slice at " << value << " has " << count << " points; ";
      }
      if (!(static_cast<long double>(count) <
            std::exp2l(-entropy_gap) * static_cast<long double>(c.size()))) {
        literal_ok = false;
      }
    }
  }
  report("kept parts exceed 2^{alpha_n (w - eps2)}", size_ok, why.str());
  report("kept part slices below 2^{alpha_n (w - 1 - eps1 - eps2)}", slice_ok, why.str());
  report("kept part slices below 2^{-(1 + eps1) alpha_n} |C_i|", literal_ok);

  const long double r1_cap = static_cast<long double>(d.w) * std::exp2l(d.keep_exponent);
  report("|R1| <= w 2^{(w - eps2) alpha_n}", static_cast<long double>(d.r1.size()) <= r1_cap);

  report("cuts <= |S|", d.slice_log.size() <= input.size(),
         std::to_string(d.slice_log.size()) + " cuts");

  // Replay the log against the input.
  bool replay_ok = true;
  std::vector<std::uint64_t> rest(input.begin(), input.end());
  std::vector<std::vector<std::uint64_t>> cut(d.w);
  for (const auto& entry : d.slice_log) {
    std::vector<std::uint64_t> kept;
    std::uint64_t removed = 0;
    for (const auto x : rest) {
      if (input.word(x, entry.index) == entry.value) {
        cut[entry.index].push_back(x);
        ++removed;
      } else {
        kept.push_back(x);
      }
    }
    if (removed != entry.size || removed == 0 || !below_pow2(removed, d.slice_exponent)) {
      replay_ok = false;
    }
    rest = std::move(kept);
  }
  replay_ok = replay_ok && std::equal(rest.begin(), rest.end(), d.r0.begin(), d.r0.end());
  const auto& no_more = find_bottleneck_slice(d.r0, d.params);
  replay_ok = replay_ok && !no_more.has_value();
  report("slice log replays to R0", replay_ok);
  return out;
}

std::string to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::Pass: return "pass";
    case BoundStatus::Fail: return "fail";
    case BoundStatus::Unverified: return "unverified";
  }
  return "?";
}

ConversePrecondition check_converse_precondition(const PointSet& s, std::uint64_t q,
                                                 const DecompositionParams& p, double eps3) {
  require_params(p);
  ConversePrecondition pre;
  const long double an = p.alpha_n;
  pre.exponent = an * s.w() * (1 - p.eps1 - p.eps2 - static_cast<long double>(eps3) - 1 / an);
  auto best = best_V_for_U(s, q);
  pre.max_intersection = best.count;
  pre.witness = std::move(best.box);
  pre.holds = below_pow2(pre.max_intersection, pre.exponent);
  return pre;
}

ConverseReport verify_converse_bounds(const Decomposition& d, double eps3,
                                      const std::optional<ConversePrecondition>& pre) {
  ConverseReport rep;
  rep.eps3 = eps3;
  rep.precondition = pre;
  const long double an = d.params.alpha_n;

  rep.r1_bound.name = "|R1| <= w 2^{(w - eps2) alpha_n}";
  rep.r1_bound.lhs = static_cast<long double>(d.r1.size());
  rep.r1_bound.rhs = static_cast<long double>(d.w) * std::exp2l(d.keep_exponent);
  rep.r1_bound.status = rep.r1_bound.lhs <= rep.r1_bound.rhs ? BoundStatus::Pass : BoundStatus::Fail;

  const long double r0_exp = (1 - static_cast<long double>(eps3)) * an * d.w;
  rep.r0_bound.name = "|R0| <= 2^{(1 - eps3) alpha_n w}";
  rep.r0_bound.lhs = static_cast<long double>(d.r0.size());
  rep.r0_bound.rhs = std::exp2l(r0_exp);
  if (!pre || !pre->holds) {
    rep.r0_bound.status = BoundStatus::Unverified;
  } else {
    rep.r0_bound.status =
        above_pow2(d.r0.size(), r0_exp) ? BoundStatus::Fail : BoundStatus::Pass;
  }
  return rep;
}

namespace {

TrialProfile profile_trial(const PermutationSpec& spec, std::uint64_t q,
                           const DecompositionParams& params, double target, std::size_t trial,
                           std::uint64_t seed) {
  Rng rng(derive_seed(seed, trial));
  TrialProfile t;
  t.trial = trial;
  t.u = random_qbox(spec.n(), q, spec.w(), rng);
  const PointSet image = image_of_box(spec, t.u);
  t.decomposition = decompose(image, params);
  const auto& d = t.decomposition;
  t.gamma = static_cast<double>(d.r0.size() + d.r1.size()) / static_cast<double>(image.size());
  for (unsigned i = 0; i < d.parts.size(); ++i) {
    const auto& c = d.parts[i];
    if (c.empty()) continue;
    PartEntropy e;
    e.index = i;
    e.size = c.size();
    std::map<std::uint64_t, std::uint64_t> slices;
    for (const auto x : c) e.max_slice = std::max(e.max_slice, ++slices[c.word(x, i)]);
    e.min_entropy = std::log2(static_cast<double>(e.size)) - std::log2(static_cast<double>(e.max_slice));
    e.target_met = e.min_entropy >= target;
    t.parts.push_back(e);
  }
  return t;
}

}  // namespace

CondenserProfile empirical_condenser_profile(const PermutationSpec& spec, std::uint64_t q,
                                             double eps1, double eps2, std::size_t trials,
                                             std::uint64_t seed, unsigned threads) {
  CondenserProfile prof;
  prof.q = q;
  prof.alpha_n = std::log2(static_cast<double>(q));
  prof.eps1 = eps1;
  prof.eps2 = eps2;
  prof.target = (1 + eps1) * prof.alpha_n;
  if (q < 2) throw RangeError("condenser profiles need q >= 2");
  const DecompositionParams params{prof.alpha_n, eps1, eps2};
  prof.trials.resize(trials);

  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(1, trials)));
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned t) {
    try {
      for (std::size_t i = t; i < trials; i += workers) {
        prof.trials[i] = profile_trial(spec, q, params, prof.target, i, seed);
      }
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work, t);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  double sum = 0;
  for (const auto& t : prof.trials) {
    prof.worst_gamma = std::max(prof.worst_gamma, t.gamma);
    sum += t.gamma;
    for (const auto& part : t.parts) prof.all_targets_met &= part.target_met;
  }
  prof.mean_gamma = trials ? sum / static_cast<double>(trials) : 0;
  prof.condenser_like = trials > 0 && prof.worst_gamma <= eps2 && prof.all_targets_met;
  return prof;
}

}  // namespace condlab
