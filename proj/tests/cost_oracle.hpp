// Copyright 2026 The spin-inversion Authors
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

// Second, table-driven implementation of the level-sum cost model. Every row
// is (nodes at level i, per-node cost, tasks for the parallel factor); the
// row order is the CostBreakdown term order.

#ifndef SPIN_TESTS_COST_ORACLE_HPP_
#define SPIN_TESTS_COST_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace cost_oracle {

struct Level {
  double n, b, i;
  double pow2(double e) const { return std::pow(2.0, e); }
  double pow4(double e) const { return std::pow(4.0, e); }
  double pow8(double e) const { return std::pow(8.0, e); }
};

struct Row {
  std::function<double(const Level&)> nodes;
  std::function<double(const Level&)> cost;
  std::function<double(const Level&)> tasks;
};

inline double pf(double tasks, double cores) {
  return std::min(tasks < 1.0 ? 1.0 : tasks, cores);
}

/// SPIN total: leaf plus the per-level rows.
inline double spin_total(double n, double b, double cores) {
  const auto nodes = [](const Level& l) { return l.pow2(l.i); };
  const std::vector<Row> rows = {
      // breakMat: one task per block of the node's matrix.
      {nodes, [](const Level& l) { return l.b * l.b / l.pow4(l.i); },
       [](const Level& l) { return l.b * l.b / l.pow4(l.i); }},
      // xy filter: four passes over the node's blocks.
      {nodes, [](const Level& l) { return 4.0 * l.b * l.b / l.pow4(l.i); },
       [](const Level& l) { return l.b * l.b / l.pow4(l.i); }},
      // xy map: four quadrants of half the grid.
      {nodes, [](const Level& l) { return 4.0 * l.b * l.b / l.pow4(l.i + 1); },
       [](const Level& l) { return l.b * l.b / l.pow4(l.i + 1); }},
      // multiply (large): order n / 2^(i+1) products.
      {nodes, [](const Level& l) { return l.n * l.n * l.n / l.pow8(l.i + 1); },
       [](const Level& l) { return l.n * l.n / l.pow4(l.i + 1); }},
      // multiply communication (large).
      {nodes,
       [](const Level& l) {
         return l.b * l.n * l.n / l.pow8(l.i + 1);
       },
       [](const Level& l) { return l.b * l.b / l.pow4(l.i + 1); }},
      // subtract.
      {nodes, [](const Level& l) { return l.n * l.n / l.pow4(l.i + 1); },
       [](const Level& l) { return l.n * l.n / l.pow4(l.i + 1); }},
      // scalarMul.
      {nodes, [](const Level& l) { return l.b * l.b / l.pow4(l.i + 1); },
       [](const Level& l) { return l.b * l.b / l.pow4(l.i + 1); }},
      // arrange.
      {nodes, [](const Level& l) { return l.b * l.b / l.pow4(l.i + 1); },
       [](const Level& l) { return l.b * l.b / l.pow4(l.i + 1); }},
  };
  const double leaf = n * n * n / (b * b) / pf(b * b, cores);
  // Same association as a breakdown total: leaf first, then each row.
  std::vector<double> parts{leaf};
  const int m = static_cast<int>(std::lround(std::log2(b)));
  for (const Row& row : rows) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      const Level l{n, b, static_cast<double>(i)};
      s += row.nodes(l) * row.cost(l) / pf(row.tasks(l), cores);
    }
    parts.push_back(s);
  }
  double total = 0.0;
  for (double v : parts) total += v;
  return total;
}

/// LU total: 2^i - 1 calls per level, leaf, per-level rows, then the seven
/// half-size multiplies once.
inline double lu_total(double n, double b, double cores) {
  const auto calls = [](const Level& l) { return l.pow2(l.i) - 1.0; };
  const std::vector<Row> rows = {
      {calls, [](const Level& l) { return l.b * l.b / l.pow4(l.i); },
       [](const Level& l) { return l.b * l.b / l.pow4(l.i); }},
      {calls, [](const Level& l) { return l.b * l.b / l.pow4(l.i); },
       [](const Level& l) { return l.b * l.b / l.pow4(l.i + 1); }},
      {calls, [](const Level& l) { return l.b * l.b / l.pow4(l.i + 1); },
       [](const Level& l) { return l.b * l.b / l.pow4(l.i + 2); }},
      {calls, [](const Level& l) { return 4.0 * l.n * l.n * l.n / l.pow8(l.i); },
       [](const Level& l) { return l.n * l.n / l.pow4(l.i); }},
      {calls, [](const Level& l) { return 4.0 * l.b * l.n * l.n / l.pow8(l.i); },
       [](const Level& l) { return l.b * l.b / l.pow4(l.i); }},
      {calls, [](const Level& l) { return l.n * l.n * l.n / l.pow8(l.i); },
       [](const Level& l) { return l.n * l.n / l.pow4(l.i + 1); }},
      {calls, [](const Level& l) { return l.b * l.n * l.n / l.pow8(l.i); },
       [](const Level& l) { return l.b * l.b / l.pow4(l.i + 1); }},
      {calls, [](const Level& l) { return l.n * l.n / l.pow4(l.i); },
       [](const Level& l) { return l.n * l.n / l.pow4(l.i); }},
      {calls, [](const Level& l) { return 2.0 * l.b * l.b / l.pow4(l.i); },
       [](const Level& l) { return l.b * l.b / l.pow4(l.i); }},
  };
  const double leaf = 9.0 * n * n * n / (b * b) / pf(b * b, cores);
  std::vector<double> parts{leaf};
  const int m = static_cast<int>(std::lround(std::log2(b)));
  for (const Row& row : rows) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      const Level l{n, b, static_cast<double>(i)};
      s += row.nodes(l) * row.cost(l) / pf(row.tasks(l), cores);
    }
    parts.push_back(s);
  }
  parts.push_back(0.0);  // arrange: not a separate LU row
  parts.push_back(7.0 * (n / 2) * (n / 2) * (n / 2) / pf(n * n / 4, cores));
  double total = 0.0;
  for (double v : parts) total += v;
  return total;
}

}  // namespace cost_oracle

#endif  // SPIN_TESTS_COST_ORACLE_HPP_
