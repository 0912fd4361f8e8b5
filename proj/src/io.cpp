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

#include "condlab/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "condlab/error.hpp"

namespace condlab::io {
namespace {

// Parses "<magic> v1 key=value ..." and returns the values in order.
std::vector<std::uint64_t> parse_header(const std::string& line, const std::string& magic,
                                        const std::vector<std::string>& keys) {
  std::istringstream in(line);
  std::string word, version;
  in >> word >> version;
  if (word != magic || version != "v1") {
    throw ParseError("expected header '" + magic + " v1 ...'", 1);
  }
  std::vector<std::uint64_t> out;
  for (const auto& key : keys) {
    std::string field;
    if (!(in >> field) || field.rfind(key + "=", 0) != 0) {
      throw ParseError("header is missing " + key + "=<value>", 1);
    }
    const std::string digits = field.substr(key.size() + 1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos ||
        digits.size() > 19) {
      throw ParseError("bad header value '" + field + "'", 1);
    }
    out.push_back(std::stoull(digits));
  }
  std::string extra;
  if (in >> extra) throw ParseError("unexpected header field '" + extra + "'", 1);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Next non-blank, non-comment line; false at end of input.
bool next_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (!line.empty() && line.front() != '#') return true;
  }
  return false;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

json box_json(const QBox& box) {
  json sides = json::array();
  for (const auto& side : box.sides()) {
    json values = json::array();
    for (const auto v : side) values.push_back(value_hex(v, box.n()));
    sides.push_back(std::move(values));
  }
  return sides;
}

QBox box_from_json(const json& j, unsigned n) {
  if (j.is_null()) return {};
  std::vector<std::vector<std::uint64_t>> sides;
  for (const auto& side : j) {
    std::vector<std::uint64_t> values;
    for (const auto& v : side) values.push_back(parse_hex(v.get<std::string>()));
    sides.push_back(std::move(values));
  }
  return QBox(n, std::move(sides));
}

json points_json(const PointSet& s) {
  json out = json::array();
  for (const auto p : s) out.push_back(packed_hex(p, s.n() * s.w()));
  return out;
}

PointSet points_from_json(const json& j, unsigned n, unsigned w) {
  std::vector<std::uint64_t> pts;
  for (const auto& v : j) pts.push_back(parse_hex(v.get<std::string>()));
  return PointSet(n, w, std::move(pts));
}

json bound_json(const BoundValue& v) { return {{"value", v.value}, {"vacuous", v.vacuous}}; }

json check_json(const BoundCheck& c) {
  return {{"name", c.name},
          {"lhs", static_cast<double>(c.lhs)},
          {"rhs", static_cast<double>(c.rhs)},
          {"status", to_string(c.status)}};
}

}  // namespace

void write_table(std::ostream& out, const PermutationSpec& spec) {
  const unsigned bits = spec.bits();
  if (bits > 24) {
    throw BudgetError("table export", "2^" + std::to_string(bits) + " lines", "2^24");
  }
  out << "condlab-table v1 n=" << spec.n() << " w=" << spec.w() << '\n';
  const std::uint64_t size = std::uint64_t{1} << bits;
  for (std::uint64_t x = 0; x < size; ++x) out << packed_hex(spec.eval_packed(x), bits) << '\n';
}

PermutationSpec read_table(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty table file", 1);
  ++lineno;
  const auto hdr = parse_header(trim(line), "condlab-table", {"n", "w"});
  const auto n = static_cast<unsigned>(hdr[0]);
  const auto w = static_cast<unsigned>(hdr[1]);
  if (n == 0 || w == 0 || n * w > 24) {
    throw ParseError("table shape n=" + std::to_string(n) + " w=" + std::to_string(w) +
                         " must have 1 <= wn <= 24",
                     1);
  }
  const unsigned bits = n * w;
  const std::size_t digits = (bits + 3) / 4;
  const std::uint64_t size = std::uint64_t{1} << bits;
  std::vector<std::uint64_t> entries;
  entries.reserve(size);
  while (next_line(in, line, lineno)) {
    if (entries.size() == size) throw ParseError("more than 2^" + std::to_string(bits) + " entries", lineno);
    if (line.size() != digits) {
      throw ParseError("expected " + std::to_string(digits) + " hex digits, got '" + line + "'",
                       lineno);
    }
    const std::uint64_t y = parse_hex(line, lineno);
    if (y >= size) throw ParseError("value " + line + " exceeds " + std::to_string(bits) + " bits", lineno);
    entries.push_back(y);
  }
  if (entries.size() != size) {
    throw ParseError("expected " + std::to_string(size) + " entries, found " +
                         std::to_string(entries.size()),
                     lineno);
  }
  return PermutationSpec::explicit_table(n, w, std::move(entries));
}

PermutationSpec load_table(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_table(in);
}

void write_box(std::ostream& out, const QBox& box) {
  out << "condlab-box v1 n=" << box.n() << " w=" << box.w() << " q=" << box.q() << '\n';
  for (const auto& side : box.sides()) {
    for (std::size_t i = 0; i < side.size(); ++i) out << (i ? "," : "") << value_hex(side[i], box.n());
    out << '\n';
  }
}

QBox read_box(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!next_line(in, line, lineno)) throw ParseError("empty box file", 1);
  const auto hdr = parse_header(line, "condlab-box", {"n", "w", "q"});
  const auto n = static_cast<unsigned>(hdr[0]);
  const auto w = static_cast<unsigned>(hdr[1]);
  const std::uint64_t q = hdr[2];
  if (n == 0 || n > 63 || w == 0 || q == 0 || (n < 63 && q > (std::uint64_t{1} << n))) {
    throw ParseError("box shape n=" + std::to_string(n) + " w=" + std::to_string(w) +
                         " q=" + std::to_string(q) + " is invalid",
                     lineno);
  }
  const std::uint64_t mask = gf2::degree_mask(n);
  std::vector<std::vector<std::uint64_t>> sides;
  while (next_line(in, line, lineno)) {
    if (sides.size() == w) throw ParseError("more than w=" + std::to_string(w) + " sides", lineno);
    std::vector<std::uint64_t> side;
    std::set<std::uint64_t> seen;
    std::istringstream vals(line);
    std::string item;
    while (std::getline(vals, item, ',')) {
      const std::uint64_t v = parse_hex(trim(item), lineno);
      if (v > mask) throw ParseError("value " + trim(item) + " exceeds n bits", lineno);
      if (!seen.insert(v).second) {
        throw ParseError("duplicate value " + trim(item) + " in side " +
                             std::to_string(sides.size() + 1),
                         lineno);
      }
      side.push_back(v);
    }
    if (side.size() != q) {
      throw ParseError("side has " + std::to_string(side.size()) + " values, expected q=" +
                           std::to_string(q),
                       lineno);
    }
    sides.push_back(std::move(side));
  }
  if (sides.size() != w) {
    throw ParseError("expected " + std::to_string(w) + " sides, found " + std::to_string(sides.size()),
                     lineno);
  }
  return QBox(n, std::move(sides));
}

QBox load_box(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_box(in);
}

json to_json(const ConductanceReport& r) {
  return {{"n", r.n},
          {"w", r.w},
          {"q", r.q},
          {"alpha", r.alpha},
          {"mode", to_string(r.mode)},
          {"max_count", r.max_count},
          {"condd", r.condd},
          {"witness_u", box_json(r.witness_u)},
          {"witness_v", box_json(r.witness_v)},
          {"boxes_examined", r.boxes_examined},
          {"exhausted", r.exhausted},
          {"wall_seconds", r.wall_seconds},
          {"spec", r.spec},
          {"q_power_of_two", r.q_power_of_two()}};
}

ConductanceReport report_from_json(const json& j) {
  try {
    ConductanceReport r;
    r.n = j.at("n").get<unsigned>();
    r.w = j.at("w").get<unsigned>();
    r.q = j.at("q").get<std::uint64_t>();
    r.alpha = j.at("alpha").get<double>();
    const auto mode = j.at("mode").get<std::string>();
    if (mode != "exact" && mode != "heuristic") throw ParseError("unknown mode '" + mode + "'", 0);
    r.mode = mode == "exact" ? SearchMode::Exact : SearchMode::Heuristic;
    r.max_count = j.at("max_count").get<std::uint64_t>();
    r.condd = j.at("condd").get<double>();
    r.witness_u = box_from_json(j.at("witness_u"), r.n);
    r.witness_v = box_from_json(j.at("witness_v"), r.n);
    r.boxes_examined = j.at("boxes_examined").get<std::uint64_t>();
    r.exhausted = j.at("exhausted").get<bool>();
    r.wall_seconds = j.at("wall_seconds").get<double>();
    r.spec = j.value("spec", std::string{});
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what(), 0);
  }
}

json to_json(const BoundSheet& s) {
  return {{"q", s.inputs.q},
          {"w", s.inputs.w},
          {"n", s.inputs.n},
          {"eps1", s.inputs.eps1},
          {"eps2", s.inputs.eps2},
          {"c", s.inputs.c},
          {"alpha", s.alpha},
          {"condenser_bound", bound_json(s.condenser_bound)},
          {"repetition_bound", bound_json(s.repetition_bound)},
          {"random_bound", bound_json(s.random_bound)},
          {"random_alpha_ok", s.random_alpha_ok},
          {"random_query_ok", s.random_query_ok},
          {"random_preconditions_agree", s.random_preconditions_agree},
          {"n_prime", s.n_prime}};
}

json to_json(const Decomposition& d) {
  json parts = json::array();
  for (const auto& c : d.parts) parts.push_back(points_json(c));
  json log = json::array();
  for (const auto& cut : d.slice_log) {
    log.push_back({{"iteration", cut.iteration},
                   {"coordinate", cut.index + 1},
                   {"value", value_hex(cut.value, d.n)},
                   {"size", cut.size}});
  }
  return {{"n", d.n},
          {"w", d.w},
          {"alpha_n", d.params.alpha_n},
          {"eps1", d.params.eps1},
          {"eps2", d.params.eps2},
          {"slice_exponent", static_cast<double>(d.slice_exponent)},
          {"keep_exponent", static_cast<double>(d.keep_exponent)},
          {"input_size", d.input_size},
          {"parts", std::move(parts)},
          {"r0", points_json(d.r0)},
          {"r1", points_json(d.r1)},
          {"slice_log", std::move(log)}};
}

Decomposition decomposition_from_json(const json& j) {
  try {
    Decomposition d;
    d.n = j.at("n").get<unsigned>();
    d.w = j.at("w").get<unsigned>();
    d.params = {j.at("alpha_n").get<double>(), j.at("eps1").get<double>(),
                j.at("eps2").get<double>()};
    d.slice_exponent = slice_exponent(d.params, d.w);
    d.keep_exponent = keep_exponent(d.params, d.w);
    d.input_size = j.at("input_size").get<std::uint64_t>();
    for (const auto& part : j.at("parts")) d.parts.push_back(points_from_json(part, d.n, d.w));
    d.r0 = points_from_json(j.at("r0"), d.n, d.w);
    d.r1 = points_from_json(j.at("r1"), d.n, d.w);
    for (const auto& cut : j.at("slice_log")) {
      const auto coord = cut.at("coordinate").get<unsigned>();
      if (coord == 0 || coord > d.w) throw ParseError("slice coordinate out of range", 0);
      d.slice_log.push_back({cut.at("iteration").get<std::size_t>(), coord - 1,
                             parse_hex(cut.at("value").get<std::string>()),
                             cut.at("size").get<std::uint64_t>()});
    }
    return d;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed decomposition: ") + e.what(), 0);
  }
}

json to_json(const ConverseReport& r) {
  json out = {{"eps3", r.eps3}, {"r1_bound", check_json(r.r1_bound)}, {"r0_bound", check_json(r.r0_bound)}};
  if (r.precondition) {
    out["precondition"] = {{"max_intersection", r.precondition->max_intersection},
                           {"witness", box_json(r.precondition->witness)},
                           {"exponent", static_cast<double>(r.precondition->exponent)},
                           {"holds", r.precondition->holds}};
  } else {
    out["precondition"] = nullptr;
  }
  return out;
}

json to_json(const CondenserProfile& p, bool include_parts) {
  json trials = json::array();
  for (const auto& t : p.trials) {
    json entry = {{"trial", t.trial},
                  {"u", box_json(t.u)},
                  {"gamma", t.gamma},
                  {"r0", t.decomposition.r0.size()},
                  {"r1", t.decomposition.r1.size()}};
    json parts = json::array();
    for (const auto& e : t.parts) {
      parts.push_back({{"coordinate", e.index + 1},
                       {"size", e.size},
                       {"max_slice", e.max_slice},
                       {"min_entropy", e.min_entropy},
                       {"target_met", e.target_met}});
    }
    entry["parts"] = std::move(parts);
    if (include_parts) entry["decomposition"] = to_json(t.decomposition);
    trials.push_back(std::move(entry));
  }
  return {{"q", p.q},
          {"alpha_n", p.alpha_n},
          {"eps1", p.eps1},
          {"eps2", p.eps2},
          {"target", p.target},
          {"trials", std::move(trials)},
          {"worst_gamma", p.worst_gamma},
          {"mean_gamma", p.mean_gamma},
          {"all_targets_met", p.all_targets_met},
          {"condenser_like", p.condenser_like}};
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed for " + path.string());
}

json read_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

}  // namespace condlab::io
