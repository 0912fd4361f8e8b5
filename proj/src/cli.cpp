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

#include "condlab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "condlab/box.hpp"
#include "condlab/condenser.hpp"
#include "condlab/conductance.hpp"
#include "condlab/error.hpp"
#include "condlab/gf2.hpp"
#include "condlab/io.hpp"
#include "condlab/permutation.hpp"
#include "condlab/random.hpp"

namespace condlab::cli {
namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

// Collects every configuration problem so they can be reported together.
class Issues {
 public:
  void add(std::string msg) { items_.push_back(std::move(msg)); }
  void check(bool ok, std::string msg) {
    if (!ok) add(std::move(msg));
  }
  void raise() const {
    if (items_.empty()) return;
    std::string all = "invalid configuration: ";
    for (std::size_t i = 0; i < items_.size(); ++i) all += (i ? "; " : "") + items_[i];
    throw UsageError(all);
  }

 private:
  std::vector<std::string> items_;
};

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

std::string fixed(double v, int digits = 6) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

struct SpecOptions {
  std::string kind = "pi1";
  unsigned n = 2;
  unsigned w = 0;  // 0: the kind's natural width
  std::uint64_t seed = 1;
  std::string table;
};

void add_spec_options(CLI::App* app, SpecOptions& o) {
  app->add_option("--spec", o.kind,
                  "identity, pi1, pi2, pi3, piw, double, random or table")
      ->capture_default_str();
  app->add_option("--n", o.n, "word size in bits")->capture_default_str();
  app->add_option("--w", o.w, "number of words (default 3 for the triple constructions)");
  app->add_option("--perm-seed", o.seed, "seed for --spec random")->capture_default_str();
  app->add_option("--table", o.table, "table file for --spec table");
}

std::optional<PermutationSpec> build_spec(const SpecOptions& o, Issues& issues) {
  static const std::vector<std::string> kinds = {"identity", "pi1",    "pi2",    "pi3",
                                                 "piw",      "double", "random", "table"};
  if (std::find(kinds.begin(), kinds.end(), o.kind) == kinds.end()) {
    issues.add("unknown --spec '" + o.kind + "'");
    return std::nullopt;
  }
  if (o.kind == "table") {
    if (o.table.empty()) {
      issues.add("--spec table needs --table <file>");
      return std::nullopt;
    }
    return io::load_table(o.table);
  }
  const bool triple = o.kind == "pi1" || o.kind == "pi2" || o.kind == "pi3" || o.kind == "double";
  const unsigned w = o.w ? o.w : 3;
  bool ok = true;
  if (o.n < 1 || o.n > gf2::kMaxDegree) {
    issues.add("--n must be in [1, 64]");
    ok = false;
  }
  if (triple && w != 3) {
    issues.add("--spec " + o.kind + " is defined for w = 3 only");
    ok = false;
  }
  if (o.kind == "piw" && w < 3) {
    issues.add("--spec piw needs w >= 3");
    ok = false;
  }
  if (ok && std::uint64_t{o.n} * w > 64) {
    issues.add("w * n must not exceed 64");
    ok = false;
  }
  if (o.kind == "random" && ok && o.n * w > 24) {
    issues.add("--spec random needs w * n <= 24");
    ok = false;
  }
  if (!ok) return std::nullopt;
  if (o.kind == "identity") return PermutationSpec::identity(o.n, w);
  if (o.kind == "pi1") return PermutationSpec::pi1(o.n);
  if (o.kind == "pi2") return PermutationSpec::pi2(o.n);
  if (o.kind == "pi3") return PermutationSpec::pi3(o.n);
  if (o.kind == "piw") return PermutationSpec::pi_w(o.n, w);
  if (o.kind == "double") return PermutationSpec::double_condenser(o.n);
  return PermutationSpec::random_table(o.seed, o.n, w);
}

unsigned default_threads(Issues& issues) {
  const char* env = std::getenv("CONDLAB_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  unsigned v = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto [p, ec] = std::from_chars(env, end, v);
  if (ec != std::errc{} || p != end || v == 0 || v > 1024) {
    issues.add("CONDLAB_THREADS must be an integer in [1, 1024], got '" + std::string(env) + "'");
    return 1;
  }
  return v;
}

void check_q(Issues& issues, std::uint64_t q, unsigned n) {
  issues.check(q >= 1, "--q must be at least 1");
  if (n < 64) issues.check(q <= (std::uint64_t{1} << n), "--q must not exceed 2^n");
}

void check_eps(Issues& issues, double v, const std::string& name) {
  issues.check(std::isfinite(v), name + " must be finite");
}

std::vector<std::uint64_t> parse_words(const std::string& text, unsigned n, unsigned w,
                                       Issues& issues, const std::string& flag) {
  std::vector<std::uint64_t> words;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) words.push_back(parse_hex(item));
  if (words.size() != w) {
    issues.add(flag + " needs " + std::to_string(w) + " comma-separated hex words");
  }
  for (const auto v : words) {
    if (v & ~gf2::degree_mask(n)) issues.add(flag + " word " + value_hex(v, 16) + " exceeds n bits");
  }
  return words;
}

std::string format_words(const WordVector& v) {
  std::string s;
  for (std::size_t i = 0; i < v.words.size(); ++i) s += (i ? "," : "") + value_hex(v.words[i], v.n);
  return s;
}

// ---------------------------------------------------------------------------

struct FieldCmd {
  unsigned n = 0;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
};

int run_field(const FieldCmd& c, std::ostream& out) {
  Issues issues;
  issues.check(c.n >= 1 && c.n <= gf2::kMaxDegree, "--n must be in [1, 64]");
  issues.raise();
  const auto r = gf2::selfcheck(c.n, c.samples, c.seed);
  out << "n=" << r.n << " poly=" << r.poly.to_string() << " irreducible=" << yes_no(r.irreducible)
      << " exhaustive=" << yes_no(r.exhaustive) << " triples=" << r.triples_checked << '\n';
  out << "axiom_failures=" << r.axiom_failures << " inverse_failures=" << r.inverse_failures
      << " reference_mismatches=" << r.reference_mismatches << '\n';
  out << (r.ok() ? "selfcheck ok" : "selfcheck FAILED") << '\n';
  return r.ok() ? kExitOk : kExitInvariant;
}

struct PermCmd {
  SpecOptions spec;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  std::string x;
  std::string out;
};

int run_perm_verify(const PermCmd& c, std::ostream& out) {
  Issues issues;
  const auto spec = build_spec(c.spec, issues);
  issues.raise();
  const auto r = spec->bits() <= kDefaultExhaustiveBits
                     ? verify_bijective(*spec)
                     : verify_bijective_sampled(*spec, c.samples, c.seed);
  out << spec->descriptor() << '\n';
  out << "bijective=" << yes_no(r.bijective) << " exhaustive=" << yes_no(r.exhaustive)
      << " inputs=" << r.inputs_checked << '\n';
  if (r.witness) {
    out << "collision " << packed_hex(r.witness->first, spec->bits()) << " "
        << packed_hex(r.witness->second, spec->bits()) << " -> "
        << packed_hex(r.witness->image, spec->bits()) << '\n';
  }
  return kExitOk;
}

int run_perm_map(const PermCmd& c, bool inverse, std::ostream& out) {
  Issues issues;
  const auto spec = build_spec(c.spec, issues);
  const std::string flag = inverse ? "--y" : "--x";
  issues.check(!c.x.empty(), flag + " is required");
  issues.raise();
  auto words = parse_words(c.x, spec->n(), spec->w(), issues, flag);
  issues.raise();
  const WordVector v{spec->n(), std::move(words)};
  out << format_words(inverse ? spec->invert(v) : spec->eval(v)) << '\n';
  return kExitOk;
}

int run_perm_export(const PermCmd& c, std::ostream& out) {
  Issues issues;
  const auto spec = build_spec(c.spec, issues);
  issues.check(!spec || spec->bits() <= 24, "table export needs w * n <= 24");
  issues.raise();
  if (c.out.empty()) {
    io::write_table(out, *spec);
  } else {
    std::ofstream f(c.out);
    if (!f) throw Error("cannot write " + c.out);
    io::write_table(f, *spec);
  }
  return kExitOk;
}

struct CondCmd {
  SpecOptions spec;
  std::uint64_t q = 2;
  std::string mode = "exact";
  std::uint64_t budget = 0;  // 0: mode default
  std::uint64_t node_budget = kDefaultNodeBudget;
  std::uint64_t seed = 1;
  unsigned restarts = 8;
  unsigned threads = 0;
  std::string checkpoint;
  std::uint64_t checkpoint_every = 4096;
  std::string out = "cond_report.json";
  std::string replay;
};

int run_cond(const CondCmd& c, unsigned env_threads, std::ostream& out) {
  Issues issues;
  const auto spec = build_spec(c.spec, issues);
  if (spec) check_q(issues, c.q, spec->n());
  issues.check(c.mode == "exact" || c.mode == "heuristic", "--mode must be exact or heuristic");
  issues.check(c.restarts >= 1, "--restarts must be at least 1");
  issues.check(c.checkpoint.empty() || c.mode == "exact", "--checkpoint applies to exact mode");
  issues.check(c.checkpoint_every >= 1, "--checkpoint-every must be at least 1");
  issues.raise();
  const unsigned threads = c.threads ? c.threads : env_threads;

  if (!c.replay.empty()) {
    const auto r = io::report_from_json(io::read_json(c.replay));
    const bool same_spec = r.spec == spec->descriptor();
    const std::uint64_t count = replay_witness(*spec, r);
    const bool ok = same_spec && count == r.max_count &&
                    condd_from_count(count, r.q, r.w) == r.condd;
    out << "replay max_count=" << count << " reported=" << r.max_count
        << " spec_match=" << yes_no(same_spec) << ' ' << (ok ? "ok" : "MISMATCH") << '\n';
    return ok ? kExitOk : kExitInvariant;
  }

  ConductanceReport r;
  if (c.mode == "exact") {
    ExactOptions o;
    if (c.budget) o.outer_budget = c.budget;
    o.node_budget = c.node_budget;
    o.threads = threads;
    if (!c.checkpoint.empty()) o.checkpoint = c.checkpoint;
    o.checkpoint_every = c.checkpoint_every;
    r = exact_conductance(*spec, c.q, o);
  } else {
    HeuristicOptions o;
    if (c.budget) o.budget = c.budget;
    o.seed = c.seed;
    o.restarts = c.restarts;
    o.threads = threads;
    r = heuristic_lower_bound(*spec, c.q, o);
  }
  if (!c.out.empty()) io::write_json(c.out, io::to_json(r));
  out << "condd=" << num(r.condd) << " mode=" << to_string(r.mode)
      << " witnesses=" << yes_no(r.witness_u.w() > 0 && r.witness_v.w() > 0) << '\n';
  return kExitOk;
}

struct DecomposeCmd {
  SpecOptions spec;
  std::uint64_t q = 2;
  double alpha_n = 0;  // 0: log2 q
  double eps1 = 0.25;
  double eps2 = 0.25;
  double eps3 = 0.1;
  std::string box;
  std::uint64_t seed = 1;
  std::size_t trials = 1;
  std::uint64_t node_budget = kDefaultNodeBudget;
  std::string out = "decomposition.json";
};

int run_decompose(const DecomposeCmd& c, std::ostream& out) {
  Issues issues;
  const auto spec = build_spec(c.spec, issues);
  if (spec) check_q(issues, c.q, spec->n());
  issues.check(c.alpha_n >= 0 && std::isfinite(c.alpha_n), "--alpha-n must be positive");
  check_eps(issues, c.eps1, "--eps1");
  check_eps(issues, c.eps2, "--eps2");
  check_eps(issues, c.eps3, "--eps3");
  issues.check(c.alpha_n > 0 || c.q >= 2, "--q 1 needs an explicit --alpha-n");
  issues.raise();

  std::vector<QBox> boxes;
  if (!c.box.empty()) {
    QBox b = io::load_box(c.box);
    if (b.n() != spec->n() || b.w() != spec->w()) {
      throw UsageError("box file shape does not match the permutation");
    }
    boxes.push_back(std::move(b));
  } else {
    for (std::size_t t = 0; t < c.trials; ++t) {
      Rng rng(derive_seed(c.seed, t));
      boxes.push_back(random_qbox(spec->n(), c.q, spec->w(), rng));
    }
  }
  const std::uint64_t q = boxes.empty() ? c.q : boxes.front().q();
  const DecompositionParams params{
      c.alpha_n > 0 ? c.alpha_n : std::log2(static_cast<double>(q)), c.eps1, c.eps2};

  io::json runs = io::json::array();
  bool invariants_ok = true;
  std::size_t kept_parts = 0;
  std::uint64_t r0_total = 0, r1_total = 0;
  for (const auto& u : boxes) {
    const PointSet image = image_of_box(*spec, u);
    const Decomposition d = decompose(image, params);
    const auto checks = check_decomposition(image, d);
    io::json inv = io::json::array();
    for (const auto& ch : checks) {
      invariants_ok &= ch.ok;
      inv.push_back({{"name", ch.name}, {"ok", ch.ok}, {"detail", ch.detail}});
    }
    std::optional<ConversePrecondition> pre;
    try {
      pre = check_converse_precondition(image, q, params, c.eps3);
    } catch (const BudgetError&) {
      // Left unchecked; the R0 bound is then reported as unverified.
    }
    const auto converse = verify_converse_bounds(d, c.eps3, pre);
    for (const auto& part : d.parts) kept_parts += !part.empty();
    r0_total += d.r0.size();
    r1_total += d.r1.size();
    runs.push_back({{"box", format_box(u)},
                    {"decomposition", io::to_json(d)},
                    {"invariants", std::move(inv)},
                    {"converse", io::to_json(converse)}});
  }
  io::json doc = {{"spec", spec->descriptor()},
                  {"q", q},
                  {"runs", std::move(runs)},
                  {"summary",
                   {{"trials", boxes.size()},
                    {"kept_parts", kept_parts},
                    {"r0_points", r0_total},
                    {"r1_points", r1_total},
                    {"invariants_ok", invariants_ok}}}};
  if (!c.out.empty()) io::write_json(c.out, doc);
  out << "trials=" << boxes.size() << " kept_parts=" << kept_parts << " r0=" << r0_total
      << " r1=" << r1_total << " invariants=" << (invariants_ok ? "ok" : "VIOLATED") << '\n';
  return invariants_ok ? kExitOk : kExitInvariant;
}

struct ProfileCmd {
  SpecOptions spec;
  std::uint64_t q = 2;
  double eps1 = 0.25;
  double eps2 = 0.25;
  std::size_t trials = 16;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out;
};

int run_profile(const ProfileCmd& c, unsigned env_threads, std::ostream& out) {
  Issues issues;
  const auto spec = build_spec(c.spec, issues);
  if (spec) check_q(issues, c.q, spec->n());
  issues.check(c.q >= 2, "--q must be at least 2 for a profile");
  check_eps(issues, c.eps1, "--eps1");
  check_eps(issues, c.eps2, "--eps2");
  issues.raise();
  const auto p = empirical_condenser_profile(*spec, c.q, c.eps1, c.eps2, c.trials, c.seed,
                                             c.threads ? c.threads : env_threads);
  if (!c.out.empty()) io::write_json(c.out, io::to_json(p));
  out << "trials=" << p.trials.size() << " worst_gamma=" << num(p.worst_gamma)
      << " mean_gamma=" << num(p.mean_gamma) << " targets_met=" << yes_no(p.all_targets_met)
      << " condenser_like=" << yes_no(p.condenser_like) << '\n';
  return kExitOk;
}

int run_bounds(const BoundInputs& in, const std::string& path, std::ostream& out) {
  Issues issues;
  issues.check(in.q >= 1, "--q must be at least 1");
  issues.check(in.w >= 1, "--w must be at least 1");
  issues.check(in.n >= 1 && in.n <= 64, "--n must be in [1, 64]");
  check_eps(issues, in.eps1, "--eps1");
  check_eps(issues, in.eps2, "--eps2");
  check_eps(issues, in.c, "--c");
  issues.raise();
  const auto s = bound_sheet(in);
  if (!path.empty()) io::write_json(path, io::to_json(s));
  auto line = [&](const char* name, const BoundValue& v) {
    out << name << '=' << num(v.value) << (v.vacuous ? " (vacuous)" : "") << '\n';
  };
  out << "alpha=" << num(s.alpha) << " n_prime=" << yes_no(s.n_prime) << '\n';
  line("condenser_bound", s.condenser_bound);
  line("repetition_bound", s.repetition_bound);
  line("random_bound", s.random_bound);
  out << "random_alpha_ok=" << yes_no(s.random_alpha_ok)
      << " random_query_ok=" << yes_no(s.random_query_ok)
      << " agree=" << yes_no(s.random_preconditions_agree) << '\n';
  return kExitOk;
}

struct ExperimentCmd {
  std::size_t count = 100;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  double eps1 = 0;
  double eps2 = 0;
  double c = 0;
  std::string out;
};

constexpr unsigned kExperimentN = 2;
constexpr std::uint64_t kExperimentQ = 2;

int run_experiment(const ExperimentCmd& c, unsigned env_threads, std::ostream& out) {
  Issues issues;
  check_eps(issues, c.eps1, "--eps1");
  check_eps(issues, c.eps2, "--eps2");
  check_eps(issues, c.c, "--c");
  issues.raise();
  ExactOptions opts;
  opts.threads = c.threads ? c.threads : env_threads;

  std::ostringstream csv;
  csv << "row,spec,index,perm_seed,n,w,q,max_count,condd,condenser_bound,repetition_bound,"
         "random_bound,random_alpha_ok,random_query_ok,condd_min,condd_mean,condd_max\n";
  for (const unsigned w : {2u, 3u}) {
    const auto sheet = bound_sheet({kExperimentQ, w, kExperimentN, c.eps1, c.eps2, c.c});
    auto row = [&](const std::string& kind, const std::string& spec, std::size_t index,
                   const std::string& seed, const ConductanceReport& r) {
      csv << kind << ',' << spec << ',' << index << ',' << seed << ',' << kExperimentN << ','
          << w << ',' << kExperimentQ << ',' << r.max_count << ',' << fixed(r.condd) << ','
          << fixed(sheet.condenser_bound.value) << ',' << fixed(sheet.repetition_bound.value)
          << ',' << fixed(sheet.random_bound.value) << ',' << int{sheet.random_alpha_ok} << ','
          << int{sheet.random_query_ok} << ",,,\n";
    };
    const auto control = exact_conductance(PermutationSpec::identity(kExperimentN, w), kExperimentQ, opts);
    row("control", "identity", 0, "", control);

    double lo = 0, hi = 0, sum = 0;
    for (std::size_t i = 0; i < c.count; ++i) {
      const std::uint64_t perm_seed = derive_seed(derive_seed(c.seed, w), i);
      const auto r = exact_conductance(PermutationSpec::random_table(perm_seed, kExperimentN, w),
                                       kExperimentQ, opts);
      row("perm", "random", i, std::to_string(perm_seed), r);
      lo = i ? std::min(lo, r.condd) : r.condd;
      hi = i ? std::max(hi, r.condd) : r.condd;
      sum += r.condd;
    }
    csv << "summary,random," << c.count << ",," << kExperimentN << ',' << w << ',' << kExperimentQ
        << ",,,,,,,," << fixed(lo) << ',' << fixed(c.count ? sum / static_cast<double>(c.count) : 0)
        << ',' << fixed(hi) << '\n';
  }
  if (c.out.empty()) {
    out << csv.str();
  } else {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw Error("cannot write " + c.out);
    f << csv.str();
    out << "wrote " << c.out << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conductance of permutations over ({0,1}^n)^w", "condlab"};
  app.require_subcommand(1);

  FieldCmd field;
  auto* field_app = app.add_subcommand("field", "finite field utilities");
  field_app->require_subcommand(1);
  auto* selfcheck = field_app->add_subcommand("selfcheck", "check GF(2^n) arithmetic");
  selfcheck->add_option("--n", field.n, "field degree")->required();
  selfcheck->add_option("--samples", field.samples, "random triples when not exhaustive")
      ->capture_default_str();
  selfcheck->add_option("--seed", field.seed)->capture_default_str();

  PermCmd perm;
  auto* perm_app = app.add_subcommand("perm", "permutation utilities");
  perm_app->require_subcommand(1);
  auto* verify = perm_app->add_subcommand("verify", "check bijectivity");
  add_spec_options(verify, perm.spec);
  verify->add_option("--samples", perm.samples, "round trips when wn > 24")->capture_default_str();
  verify->add_option("--seed", perm.seed)->capture_default_str();
  auto* eval = perm_app->add_subcommand("eval", "apply the permutation");
  add_spec_options(eval, perm.spec);
  eval->add_option("--x", perm.x, "comma-separated hex words");
  auto* invert = perm_app->add_subcommand("invert", "apply the inverse");
  add_spec_options(invert, perm.spec);
  invert->add_option("--y", perm.x, "comma-separated hex words");
  auto* exporter = perm_app->add_subcommand("export-table", "write the full table");
  add_spec_options(exporter, perm.spec);
  exporter->add_option("--out", perm.out, "output file (default: stdout)");

  CondCmd cond;
  auto* cond_app = app.add_subcommand("cond", "conductance degree of a permutation");
  add_spec_options(cond_app, cond.spec);
  cond_app->add_option("--q", cond.q, "box side")->capture_default_str();
  cond_app->add_option("--mode", cond.mode, "exact or heuristic")->capture_default_str();
  cond_app->add_option("--budget", cond.budget,
                       "exact: max q-boxes enumerated; heuristic: q-box evaluations");
  cond_app->add_option("--node-budget", cond.node_budget, "inner search nodes per box")
      ->capture_default_str();
  cond_app->add_option("--seed", cond.seed, "heuristic seed")->capture_default_str();
  cond_app->add_option("--restarts", cond.restarts)->capture_default_str();
  cond_app->add_option("--threads", cond.threads, "default: CONDLAB_THREADS or 1");
  cond_app->add_option("--checkpoint", cond.checkpoint, "checkpoint file for exact mode");
  cond_app->add_option("--checkpoint-every", cond.checkpoint_every)->capture_default_str();
  cond_app->add_option("--out", cond.out, "JSON report path ('' to skip)")->capture_default_str();
  cond_app->add_option("--replay", cond.replay, "re-check the witnesses of a saved report");

  DecomposeCmd dec;
  auto* dec_app = app.add_subcommand("decompose", "partition the image of a q-box");
  add_spec_options(dec_app, dec.spec);
  dec_app->add_option("--q", dec.q, "box side for seeded boxes")->capture_default_str();
  dec_app->add_option("--alpha-n", dec.alpha_n, "threshold scale (default log2 q)");
  dec_app->add_option("--eps1", dec.eps1)->capture_default_str();
  dec_app->add_option("--eps2", dec.eps2)->capture_default_str();
  dec_app->add_option("--eps3", dec.eps3)->capture_default_str();
  dec_app->add_option("--box", dec.box, "box file; otherwise seeded random boxes");
  dec_app->add_option("--seed", dec.seed, "box seed")->capture_default_str();
  dec_app->add_option("--trials", dec.trials, "number of seeded boxes")->capture_default_str();
  dec_app->add_option("--out", dec.out, "JSON dump path ('' to skip)")->capture_default_str();

  ProfileCmd prof;
  auto* prof_app = app.add_subcommand("condenser-profile", "empirical condenser behaviour");
  add_spec_options(prof_app, prof.spec);
  prof_app->add_option("--q", prof.q)->capture_default_str();
  prof_app->add_option("--eps1", prof.eps1)->capture_default_str();
  prof_app->add_option("--eps2", prof.eps2)->capture_default_str();
  prof_app->add_option("--trials", prof.trials)->capture_default_str();
  prof_app->add_option("--seed", prof.seed)->capture_default_str();
  prof_app->add_option("--threads", prof.threads, "default: CONDLAB_THREADS or 1");
  prof_app->add_option("--out", prof.out, "JSON report path");

  BoundInputs bounds;
  std::string bounds_out;
  auto* bounds_app = app.add_subcommand("bounds", "analytic bound sheet");
  bounds_app->add_option("--q", bounds.q)->capture_default_str();
  bounds_app->add_option("--w", bounds.w)->capture_default_str();
  bounds_app->add_option("--n", bounds.n)->capture_default_str();
  bounds_app->add_option("--eps1", bounds.eps1)->capture_default_str();
  bounds_app->add_option("--eps2", bounds.eps2)->capture_default_str();
  bounds_app->add_option("--c", bounds.c, "per-triple gain")->capture_default_str();
  bounds_app->add_option("--out", bounds_out, "JSON output path");

  ExperimentCmd exp;
  auto* exp_app = app.add_subcommand("experiment", "exact conductance of seeded random tables");
  exp_app->add_option("--count", exp.count, "permutations per width")->capture_default_str();
  exp_app->add_option("--seed", exp.seed)->capture_default_str();
  exp_app->add_option("--threads", exp.threads, "default: CONDLAB_THREADS or 1");
  exp_app->add_option("--eps1", exp.eps1)->capture_default_str();
  exp_app->add_option("--eps2", exp.eps2)->capture_default_str();
  exp_app->add_option("--c", exp.c)->capture_default_str();
  exp_app->add_option("--out", exp.out, "CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Issues env_issues;
    const unsigned env_threads = default_threads(env_issues);
    env_issues.raise();
    if (*selfcheck) return run_field(field, out);
    if (*verify) return run_perm_verify(perm, out);
    if (*eval) return run_perm_map(perm, false, out);
    if (*invert) return run_perm_map(perm, true, out);
    if (*exporter) return run_perm_export(perm, out);
    if (*cond_app) return run_cond(cond, env_threads, out);
    if (*dec_app) return run_decompose(dec, out);
    if (*prof_app) return run_profile(prof, env_threads, out);
    if (*bounds_app) return run_bounds(bounds, bounds_out, out);
    if (*exp_app) return run_experiment(exp, env_threads, out);
    err << "no command\n";
    return kExitUsage;
  } catch (const BudgetError& e) {
    err << "budget refused: " << e.what() << '\n';
    return kExitBudget;
  } catch (const InvariantError& e) {
    err << "invariant violated: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInvariant;
  }
}

}  // namespace condlab::cli
