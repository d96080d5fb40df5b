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

#ifndef SPIN__COST_MODEL_HPP_
#define SPIN__COST_MODEL_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "spin/error.hpp"

// Analytical wall-clock model of both inversion algorithms.
//
// Costs are in abstract units (element operations and element transfers,
// added linearly). A level-i recursion node of SPIN works on an order
// n / 2^i matrix split into (b / 2^i)^2 blocks; every per-method cost is
// divided by its parallelization factor min[tasks, cores] at that level and
// summed over the m = log2(b) internal levels. The leaf term is divided by
// min[b^2, cores].

namespace spin {

enum class Algorithm { kSpin, kLu };

inline constexpr std::string_view algorithm_name(Algorithm a) noexcept {
  return a == Algorithm::kSpin ? "spin" : "lu";
}

inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "spin") return Algorithm::kSpin;
  if (s == "lu") return Algorithm::kLu;
  throw InvalidParams("unknown algorithm '" + std::string(s) + "'");
}

struct CostParams {
  double n = 0;
  double b = 0;
  double cores = 1;

  static CostParams make(std::size_t n, std::size_t b, std::size_t cores) {
    if (!is_power_of_two(n) || !is_power_of_two(b) || b > n || cores == 0) {
      throw InvalidParams("cost params need powers of two n, b with b <= n "
                          "and cores >= 1 (n=" + std::to_string(n) +
                          ", b=" + std::to_string(b) +
                          ", cores=" + std::to_string(cores) + ")");
    }
    return {static_cast<double>(n), static_cast<double>(b),
            static_cast<double>(cores)};
  }

  unsigned p() const { return log2_exact(static_cast<std::size_t>(n)); }
  unsigned q() const { return log2_exact(static_cast<std::size_t>(n / b)); }
  unsigned m() const { return p() - q(); }
};

enum class CostTerm : std::size_t {
  kLeafNode,
  kBreakMat,
  kXyFilter,
  kXyMap,
  kMultiplyLarge,
  kMultiplyCommLarge,
  kMultiplySmall,
  kMultiplyCommSmall,
  kSubtract,
  kScalarMul,
  kArrange,
  kAdditionalCost,
};

inline constexpr std::size_t kCostTermCount = 12;

inline constexpr std::array<std::string_view, kCostTermCount> kCostTermNames{
    "leafNode",      "breakMat",          "xyFilter",
    "xyMap",         "multiplyLarge",     "multiplyCommLarge",
    "multiplySmall", "multiplyCommSmall", "subtract",
    "scalarMul",     "arrange",           "additionalCost"};

struct CostBreakdown {
  std::array<double, kCostTermCount> terms{};

  double& operator[](CostTerm t) { return terms[static_cast<std::size_t>(t)]; }
  double operator[](CostTerm t) const {
    return terms[static_cast<std::size_t>(t)];
  }

  double total() const {
    double s = 0.0;
    for (double v : terms) s += v;
    return s;
  }
};

/// min[tasks, cores], never below one task.
inline double parallel_factor(double tasks, double cores) {
  return std::min(std::max(tasks, 1.0), cores);
}

/// Per-level summation of SPIN's per-method costs.
inline CostBreakdown spin_cost_levelsum(const CostParams& p) {
  CostBreakdown c;
  const double n = p.n, b = p.b, cores = p.cores;
  c[CostTerm::kLeafNode] =
      n * n * n / (b * b) / parallel_factor(b * b, cores);
  for (unsigned i = 0; i < p.m(); ++i) {
    const double nodes = std::ldexp(1.0, static_cast<int>(i));
    const double blocks_i = b * b / std::ldexp(1.0, 2 * static_cast<int>(i));
    const double blocks_half = blocks_i / 4.0;
    const double half = n / std::ldexp(1.0, static_cast<int>(i) + 1);
    const double half_grid = b / std::ldexp(1.0, static_cast<int>(i) + 1);
    const double elems_half = half * half;

    c[CostTerm::kBreakMat] +=
        nodes * blocks_i / parallel_factor(blocks_i, cores);
    c[CostTerm::kXyFilter] +=
        nodes * 4.0 * blocks_i / parallel_factor(blocks_i, cores);
    c[CostTerm::kXyMap] +=
        nodes * 4.0 * blocks_half / parallel_factor(blocks_half, cores);
    c[CostTerm::kMultiplyLarge] +=
        nodes * half * half * half / parallel_factor(elems_half, cores);
    c[CostTerm::kMultiplyCommLarge] +=
        nodes * half_grid * elems_half / parallel_factor(blocks_half, cores);
    c[CostTerm::kSubtract] +=
        nodes * elems_half / parallel_factor(elems_half, cores);
    c[CostTerm::kScalarMul] +=
        nodes * blocks_half / parallel_factor(blocks_half, cores);
    c[CostTerm::kArrange] +=
        nodes * blocks_half / parallel_factor(blocks_half, cores);
  }
  return c;
}

/// Per-level summation of the LU baseline's costs; 2^i - 1 LU calls at
/// level i, plus the final seven half-size multiplies.
inline CostBreakdown lu_cost_levelsum(const CostParams& p) {
  CostBreakdown c;
  const double n = p.n, b = p.b, cores = p.cores;
  c[CostTerm::kLeafNode] =
      9.0 * n * n * n / (b * b) / parallel_factor(b * b, cores);
  for (unsigned i = 0; i < p.m(); ++i) {
    const double calls = std::ldexp(1.0, static_cast<int>(i)) - 1.0;
    const double four_i = std::ldexp(1.0, 2 * static_cast<int>(i));
    const double eight_i = std::ldexp(1.0, 3 * static_cast<int>(i));
    const double blocks_i = b * b / four_i;
    const double size_i = n / std::ldexp(1.0, static_cast<int>(i));
    const double grid_i = b / std::ldexp(1.0, static_cast<int>(i));
    const double elems_i = n * n / four_i;

    c[CostTerm::kBreakMat] +=
        calls * blocks_i / parallel_factor(blocks_i, cores);
    c[CostTerm::kXyFilter] +=
        calls * blocks_i / parallel_factor(blocks_i / 4.0, cores);
    c[CostTerm::kXyMap] +=
        calls * (blocks_i / 4.0) / parallel_factor(blocks_i / 16.0, cores);
    c[CostTerm::kMultiplyLarge] +=
        calls * 4.0 * n * n * n / eight_i / parallel_factor(elems_i, cores);
    c[CostTerm::kMultiplyCommLarge] +=
        calls * 4.0 * grid_i * size_i * size_i /
        parallel_factor(blocks_i, cores);
    c[CostTerm::kMultiplySmall] +=
        calls * n * n * n / eight_i / parallel_factor(elems_i / 4.0, cores);
    c[CostTerm::kMultiplyCommSmall] +=
        calls * grid_i * size_i * size_i /
        parallel_factor(blocks_i / 4.0, cores);
    c[CostTerm::kSubtract] +=
        calls * elems_i / parallel_factor(elems_i, cores);
    c[CostTerm::kScalarMul] +=
        calls * 2.0 * blocks_i / parallel_factor(blocks_i, cores);
  }
  const double half = n / 2.0;
  c[CostTerm::kAdditionalCost] =
      7.0 * half * half * half / parallel_factor(n * n / 4.0, cores);
  return c;
}

inline CostBreakdown cost_levelsum(Algorithm alg, const CostParams& p) {
  return alg == Algorithm::kSpin ? spin_cost_levelsum(p) : lu_cost_levelsum(p);
}

/// Closed form of the unparallelized SPIN multiply sum, n^3 (b^2-1) / (6 b^2).
inline double spin_multiply_closed(double n, double b) {
  return n * n * n * (b * b - 1.0) / (6.0 * b * b);
}

/// The four printed terms of SPIN's closed-form wall-clock cost, evaluated
/// at recursion level `level` (the printed form keeps a level index inside
/// its min[] terms).
inline std::array<double, 4> spin_cost_closed_terms(const CostParams& p,
                                                    unsigned level) {
  if (p.b < 2) throw InvalidParams("closed form needs b >= 2");
  const double n = p.n, b = p.b, cores = p.cores;
  const double f = std::ldexp(1.0, 2 * static_cast<int>(level));
  return {
      n * n * n / (b * b),
      (10.0 * b * b - 6.0 * b) / std::min(b * b / f, cores),
      ((b - 1.0) + (9.0 * b * b + n * n * (b + 1.0))) /
          (b * std::min(b * b / (4.0 * f), cores)),
      n * n * (b * b * n + b * b - 2.0 * n) /
          (b * b * std::min(n * n / (4.0 * f), cores)),
  };
}

inline double spin_cost_closed(const CostParams& p, unsigned level) {
  double s = 0.0;
  for (double t : spin_cost_closed_terms(p, level)) s += t;
  return s;
}

/// The seven printed terms of the LU baseline's closed-form cost.
inline std::array<double, 7> lu_cost_closed_terms(const CostParams& p,
                                                  unsigned level) {
  if (p.b < 2) throw InvalidParams("closed form needs b >= 2");
  const double n = p.n, b = p.b, cores = p.cores;
  const double f = std::ldexp(1.0, 2 * static_cast<int>(level));
  const double b2 = b * b;
  const double n2 = n * n;
  return {
      9.0 * n2 * n / b2,
      (b - 1.0) *
          (210.0 * b2 * (b - 2.0) + 64.0 * n2 * (b + 1.0) * (b2 - 14.0)) /
          (105.0 * b2 * std::min(b2 / f, cores)),
      (b - 1.0) *
          (70.0 * b2 * (b - 2.0) + 8.0 * n2 * (b + 1.0) * (b2 - 14.0)) /
          (105.0 * b2 * std::min(b2 / (4.0 * f), cores)),
      (b - 1.0) * (b - 2.0) / (105.0 * b2 * std::min(b2 / (16.0 * f), cores)),
      2.0 * n2 * (b - 1.0) * (8.0 * n * (b2 + b + 6.0) + 7.0 * b * (b - 2.0)) /
          (21.0 * b2 * b * std::min(n2 / f, cores)),
      8.0 * n2 * n * (b - 1.0) * (b2 + b - 6.0) /
          (42.0 * b2 * b * std::min(n2 / (4.0 * f), cores)),
      7.0 * n2 * n / (8.0 * std::min(n2 / 4.0, cores)),
  };
}

inline double lu_cost_closed(const CostParams& p, unsigned level) {
  double s = 0.0;
  for (double t : lu_cost_closed_terms(p, level)) s += t;
  return s;
}

struct CurvePoint {
  std::size_t b = 0;
  double cost = 0.0;
};

struct UCurve {
  std::vector<CurvePoint> points;
  std::size_t argmin_b = 0;
};

/// Level-sum totals over a range of partition sizes.
inline UCurve predict_u_curve(Algorithm alg, std::size_t n, std::size_t cores,
                              const std::vector<std::size_t>& b_values) {
  UCurve out;
  double best = 0.0;
  std::size_t prev = 0;
  for (std::size_t b : b_values) {
    if (b <= prev) throw InvalidParams("b values must be ascending");
    prev = b;
    const double cost = cost_levelsum(alg, CostParams::make(n, b, cores))
                            .total();
    out.points.push_back({b, cost});
    if (out.points.size() == 1 || cost < best) {
      best = cost;
      out.argmin_b = b;
    }
  }
  return out;
}

/// Least-squares scale factor c minimizing sum (measured - c * predicted)^2.
inline double fit_calibration(const std::vector<double>& measured,
                              const std::vector<double>& predicted) {
  if (measured.size() != predicted.size() || measured.empty()) {
    throw InsufficientData("calibration needs matching non-empty series");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < measured.size(); ++i) {
    num += measured[i] * predicted[i];
    den += predicted[i] * predicted[i];
  }
  if (den <= 0.0) throw InsufficientData("all predictions are zero");
  return num / den;
}

/// Number of strict local minima of a series (endpoints count when lower
/// than their single neighbour).
inline std::size_t count_local_minima(const std::vector<double>& v) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const bool left_ok = i == 0 || v[i] < v[i - 1];
    const bool right_ok = i + 1 == v.size() || v[i] < v[i + 1];
    if (left_ok && right_ok && v.size() > 1) ++count;
  }
  return count;
}

inline std::size_t argmin_index(const std::vector<double>& v) {
  return static_cast<std::size_t>(
      std::min_element(v.begin(), v.end()) - v.begin());
}

}  // namespace spin

#endif  // SPIN__COST_MODEL_HPP_
