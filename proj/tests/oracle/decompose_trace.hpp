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

// Straight-line replay of the slice-cutting procedure on points stored as
// word vectors, for comparison with the library's partition.

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

namespace oracle {

using Point = std::vector<unsigned>;

struct TraceResult {
  std::vector<std::vector<Point>> kept;  // per coordinate, empty unless kept
  std::vector<Point> r0;
  std::vector<Point> r1;
  std::size_t cuts = 0;
};

// Thresholds are passed as plain doubles; callers pick parameters whose
// thresholds are far from integers.
inline TraceResult trace_decompose(std::vector<Point> rest, unsigned w, double slice_limit,
                                   double keep_limit) {
  std::vector<std::vector<Point>> cut(w);
  std::size_t cuts = 0;
  bool again = true;
  while (again) {
    again = false;
    for (unsigned i = 0; i < w && !again; ++i) {
      std::map<unsigned, std::size_t> count;
      for (const auto& p : rest) ++count[p[i]];
      for (const auto& [value, size] : count) {
        if (size == 0 || static_cast<double>(size) >= slice_limit) continue;
        std::vector<Point> keep;
        for (const auto& p : rest) (p[i] == value ? cut[i] : keep).push_back(p);
        rest = keep;
        ++cuts;
        again = true;
        break;
      }
    }
  }
  TraceResult out;
  out.r0 = rest;
  out.kept.resize(w);
  for (unsigned i = 0; i < w; ++i) {
    if (static_cast<double>(cut[i].size()) > keep_limit) {
      out.kept[i] = cut[i];
    } else {
      out.r1.insert(out.r1.end(), cut[i].begin(), cut[i].end());
    }
  }
  out.cuts = cuts;
  return out;
}

}  // namespace oracle
