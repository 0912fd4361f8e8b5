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

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "condlab/box.hpp"
#include "condlab/condenser.hpp"
#include "condlab/conductance.hpp"
#include "condlab/permutation.hpp"

namespace condlab::io {

using nlohmann::json;

// Permutation table: "condlab-table v1 n=<n> w=<w>", then 2^{wn} lines, the
// image of each input in ascending order as ceil(wn/4) hex digits.
void write_table(std::ostream& out, const PermutationSpec& spec);
PermutationSpec read_table(std::istream& in);
PermutationSpec load_table(const std::filesystem::path& path);

// Box file: "condlab-box v1 n=<n> w=<w> q=<q>", then w lines of q
// comma-separated hex values. Blank lines and lines starting with '#' are
// skipped. Errors carry the line number.
void write_box(std::ostream& out, const QBox& box);
QBox read_box(std::istream& in);
QBox load_box(const std::filesystem::path& path);

json to_json(const ConductanceReport& r);
ConductanceReport report_from_json(const json& j);

json to_json(const BoundSheet& s);
json to_json(const Decomposition& d);
json to_json(const ConverseReport& r);
json to_json(const CondenserProfile& p, bool include_parts = true);

// Inverse of to_json(Decomposition); recomputes nothing.
Decomposition decomposition_from_json(const json& j);

void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

}  // namespace condlab::io
