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

#include <fstream>
#include <sstream>

#include "condlab/conductance.hpp"
#include "condlab/error.hpp"

namespace condlab {
namespace {

constexpr const char* kHeader = "condlab-ckpt v1";

std::string expect_field(std::istream& in, const std::string& key, std::size_t& line) {
  std::string text;
  ++line;
  if (!std::getline(in, text)) throw ParseError("missing '" + key + "'", line);
  const std::string prefix = key + " ";
  if (text.rfind(prefix, 0) != 0) throw ParseError("expected '" + key + " ...'", line);
  return text.substr(prefix.size());
}

std::uint64_t parse_decimal(const std::string& text, std::size_t line) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError("bad decimal '" + text + "'", line);
  }
  return std::stoull(text);
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  std::ostringstream out;
  out << kHeader << '\n';
  out << "digest " << value_hex(c.digest, 64) << '\n';
  out << "q " << c.q << '\n';
  out << "cursor " << format_cursor(c.cursor) << '\n';
  out << "max_count " << c.max_count << '\n';
  out << "witness_u " << (c.witness_u ? format_box(*c.witness_u) : "-") << '\n';
  out << "witness_v " << (c.witness_v ? format_box(*c.witness_v) : "-") << '\n';
  out << "boxes_examined " << c.boxes_examined << '\n';

  // Write-then-rename so a crash never leaves a torn checkpoint.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream file(tmp, std::ios::trunc);
    if (!file) throw Error("cannot write checkpoint " + tmp.string());
    file << out.str();
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint read_checkpoint(const std::filesystem::path& path, unsigned n) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  std::size_t line = 1;
  std::string header;
  if (!std::getline(in, header) || header != kHeader) {
    throw ParseError("not a checkpoint file (expected '" + std::string(kHeader) + "')", line);
  }
  Checkpoint c;
  c.digest = parse_hex(expect_field(in, "digest", line), line);
  c.q = parse_decimal(expect_field(in, "q", line), line);
  try {
    c.cursor = parse_cursor(expect_field(in, "cursor", line));
  } catch (const ParseError& e) {
    throw ParseError(e.what(), line);
  }
  c.max_count = parse_decimal(expect_field(in, "max_count", line), line);
  for (auto* box : {&c.witness_u, &c.witness_v}) {
    const std::string text = expect_field(in, box == &c.witness_u ? "witness_u" : "witness_v", line);
    if (text == "-") continue;
    try {
      *box = parse_box(text, n);
    } catch (const Error& e) {
      throw ParseError(e.what(), line);
    }
  }
  c.boxes_examined = parse_decimal(expect_field(in, "boxes_examined", line), line);
  return c;
}

}  // namespace condlab
