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

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "cost_oracle.hpp"
#include "spin/cost_model.hpp"

namespace {

using spin::Algorithm;
using spin::CostParams;
using spin::CostTerm;

CostParams params(std::size_t n, std::size_t b, std::size_t cores) {
  return CostParams::make(n, b, cores);
}

TEST(CostParams, DerivedExponents) {
  const CostParams p = params(4096, 16, 30);
  EXPECT_EQ(p.p(), 12u);
  EXPECT_EQ(p.q(), 8u);
  EXPECT_EQ(p.m(), 4u);
}

TEST(CostParams, Validation) {
  EXPECT_THROW(params(100, 2, 4), spin::InvalidParams);
  EXPECT_THROW(params(64, 3, 4), spin::InvalidParams);
  EXPECT_THROW(params(64, 128, 4), spin::InvalidParams);
  EXPECT_THROW(params(64, 2, 0), spin::InvalidParams);
  EXPECT_THROW(spin::parse_algorithm("qr"), spin::InvalidParams);
  EXPECT_EQ(spin::parse_algorithm("lu"), Algorithm::kLu);
}

TEST(SpinCost, OneSplitIsLeafOnly) {
  const auto c = spin::spin_cost_levelsum(params(64, 1, 8));
  EXPECT_EQ(c[CostTerm::kLeafNode], 64.0 * 64 * 64);
  for (std::size_t t = 1; t < spin::kCostTermCount; ++t)
    EXPECT_EQ(c.terms[t], 0.0);
  EXPECT_EQ(c.total(), 64.0 * 64 * 64);
}

TEST(LuCost, OneSplitIsLeafAndAdditional) {
  const auto c = spin::lu_cost_levelsum(params(64, 1, 8));
  EXPECT_EQ(c[CostTerm::kLeafNode], 9.0 * 64 * 64 * 64);
  EXPECT_EQ(c[CostTerm::kAdditionalCost], 7.0 * 32 * 32 * 32 / 8);
  for (std::size_t t = 1; t + 1 < spin::kCostTermCount; ++t)
    EXPECT_EQ(c.terms[t], 0.0);
}

TEST(SpinCost, PartsNonNegativeAndTotalIsSum) {
  for (std::size_t b = 1; b <= 64; b *= 2) {
    for (Algorithm a : {Algorithm::kSpin, Algorithm::kLu}) {
      const auto c = spin::cost_levelsum(a, params(1024, b, 30));
      double s = 0.0;
      for (double v : c.terms) {
        EXPECT_GE(v, 0.0);
        s += v;
      }
      EXPECT_EQ(c.total(), s);
    }
  }
}

// With cores = 1 every factor is one and the level sums collapse to the
// per-method polynomials.
TEST(SpinCost, UnparallelizedMultiplyMatchesClosedForm) {
  for (double b : {2.0, 4.0, 8.0, 16.0}) {
    for (std::size_t n : {256, 4096, 16384}) {
      const auto c = spin::spin_cost_levelsum(
          params(n, static_cast<std::size_t>(b), 1));
      const double nd = static_cast<double>(n);
      EXPECT_EQ(c[CostTerm::kMultiplyLarge], spin::spin_multiply_closed(nd, b));
      // Rational form: n^3 (b^2 - 1) / (6 b^2), all exact in binary64 here.
      EXPECT_NEAR(c[CostTerm::kMultiplyLarge] /
                      (nd * nd * nd * (b * b - 1) / (6 * b * b)),
                  1.0, 1e-15);
    }
  }
}

TEST(SpinCost, UnparallelizedPolynomials) {
  const double n = 1024;
  for (std::size_t bi = 2; bi <= 64; bi *= 2) {
    const double b = static_cast<double>(bi);
    const auto c = spin::spin_cost_levelsum(params(1024, bi, 1));
    EXPECT_EQ(c[CostTerm::kLeafNode], n * n * n / (b * b));
    EXPECT_EQ(c[CostTerm::kBreakMat], 2 * b * (b - 1));
    EXPECT_EQ(c[CostTerm::kSubtract], n * n * (b - 1) / (2 * b));
    EXPECT_EQ(c[CostTerm::kScalarMul], b / 2 * (b - 1));
    EXPECT_EQ(c[CostTerm::kArrange], b / 2 * (b - 1));
    EXPECT_EQ(c[CostTerm::kXyMap], 2 * b * b - 2 * b);
    EXPECT_NEAR(c[CostTerm::kMultiplyCommLarge], n * n * (b * b - 1) / (6 * b),
                1e-12 * n * n * b);
    // Four filter passes per node give 8b^2 - 8b; the printed row reads
    // 8b^2 - 4b. The gap is exactly 4b.
    EXPECT_EQ(c[CostTerm::kXyFilter], 8 * b * b - 8 * b);
    EXPECT_EQ((8 * b * b - 4 * b) - c[CostTerm::kXyFilter], 4 * b);
    EXPECT_EQ(c[CostTerm::kMultiplySmall], 0.0);
    EXPECT_EQ(c[CostTerm::kAdditionalCost], 0.0);
  }
}

TEST(LuCost, UnparallelizedMultiplyPolynomials) {
  const double n = 512;
  for (std::size_t bi = 2; bi <= 64; bi *= 2) {
    const double b = static_cast<double>(bi);
    const auto c = spin::lu_cost_levelsum(params(512, bi, 1));
    const double large = 16 * n * n * n / (21 * b * b * b) *
                         (b * b * b - 7 * b + 6);
    EXPECT_NEAR(c[CostTerm::kMultiplyLarge], large, 1e-9 * n * n * n);
    EXPECT_NEAR(c[CostTerm::kMultiplySmall], large / 4, 1e-9 * n * n * n);
    EXPECT_EQ(c[CostTerm::kAdditionalCost], 7 * (n / 2) * (n / 2) * (n / 2));
  }
}

TEST(LuCost, LeafIsNineTimesSpin) {
  for (std::size_t n : {64, 1024, 8192})
    for (std::size_t b = 1; b <= 32; b *= 2)
      for (std::size_t cores : {1, 4, 30, 1000}) {
        const auto s = spin::spin_cost_levelsum(params(n, b, cores));
        const auto l = spin::lu_cost_levelsum(params(n, b, cores));
        // One rounding each side; equal up to the last bit.
        EXPECT_DOUBLE_EQ(l[CostTerm::kLeafNode], 9 * s[CostTerm::kLeafNode]);
      }
}

TEST(CostModel, DominanceOverGrid) {
  for (std::size_t n : {256, 1024, 4096, 16384})
    for (std::size_t b = 2; b <= 64; b *= 2)
      for (std::size_t cores : {1, 2, 8, 30, 64}) {
        EXPECT_LT(spin::spin_cost_levelsum(params(n, b, cores)).total(),
                  spin::lu_cost_levelsum(params(n, b, cores)).total())
            << n << "/" << b << "/" << cores;
      }
}

TEST(CostModel, MatchesIndependentOracleAtPaperScale) {
  const CostParams p = params(4096, 16, 30);
  EXPECT_EQ(spin::spin_cost_levelsum(p).total(),
            cost_oracle::spin_total(4096, 16, 30));
  EXPECT_EQ(spin::lu_cost_levelsum(p).total(),
            cost_oracle::lu_total(4096, 16, 30));
}

TEST(CostModel, MatchesIndependentOracleAtRandomPoints) {
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<int> log_n(1, 15);
  std::uniform_int_distribution<std::size_t> cores_d(1, 128);
  for (int k = 0; k < 20; ++k) {
    const int pn = log_n(rng);
    std::uniform_int_distribution<int> log_b(0, std::min(pn, 8));
    const std::size_t n = std::size_t{1} << pn;
    const std::size_t b = std::size_t{1} << log_b(rng);
    const std::size_t cores = cores_d(rng);
    const double nd = static_cast<double>(n), bd = static_cast<double>(b),
                 cd = static_cast<double>(cores);
    EXPECT_EQ(spin::spin_cost_levelsum(params(n, b, cores)).total(),
              cost_oracle::spin_total(nd, bd, cd))
        << n << "/" << b << "/" << cores;
    EXPECT_EQ(spin::lu_cost_levelsum(params(n, b, cores)).total(),
              cost_oracle::lu_total(nd, bd, cd))
        << n << "/" << b << "/" << cores;
  }
}

TEST(ClosedForm, SpinPrintedTerms) {
  for (std::size_t b : {2, 4, 16})
    for (unsigned level : {0u, 1u}) {
      const auto t = spin::spin_cost_closed_terms(params(1024, b, 30), level);
      EXPECT_EQ(t[0], 1024.0 * 1024 * 1024 / static_cast<double>(b * b));
    }
  // cores >= b^2: the second denominator is b^2 / 4^i.
  const auto t = spin::spin_cost_closed_terms(params(256, 8, 1000), 1);
  EXPECT_EQ(t[1], (10.0 * 64 - 48) / 16);
  EXPECT_THROW(spin::spin_cost_closed(params(256, 1, 4), 0),
               spin::InvalidParams);
}

TEST(ClosedForm, LuPrintedTerms) {
  const double n = 2048;
  for (std::size_t cores : {std::size_t{1}, std::size_t{30}, std::size_t{1} << 22}) {
    const auto t = spin::lu_cost_closed_terms(params(2048, 8, cores), 0);
    EXPECT_EQ(t[0], 9 * n * n * n / 64);
    EXPECT_EQ(t[6], 7 * n * n * n /
                        (8 * std::min(n * n / 4, static_cast<double>(cores))));
  }
}

// b = 2, one level, cores = 1: the closed form and the level sum would be
// expected to agree term by term. Only the leaf term does; the remaining
// printed terms differ from the per-method sums by fixed amounts.
TEST(ClosedForm, SpinSingleLevelCorrespondence) {
  for (double n : {8.0, 64.0, 1024.0}) {
    const CostParams p = params(static_cast<std::size_t>(n), 2, 1);
    const auto sum = spin::spin_cost_levelsum(p);
    const auto t = spin::spin_cost_closed_terms(p, 0);
    EXPECT_EQ(t[0], sum[CostTerm::kLeafNode]);
    // Block-count rows: printed 10b^2 - 6b = 28, summed 4 + 16 = 20.
    EXPECT_EQ(sum[CostTerm::kBreakMat] + sum[CostTerm::kXyFilter], 20.0);
    EXPECT_EQ(t[1], 28.0);
    // Mixed rows: printed (37 + 3n^2) / 2, summed 6 + n^2 / 4.
    EXPECT_EQ(sum[CostTerm::kXyMap] + sum[CostTerm::kMultiplyCommLarge] +
                  sum[CostTerm::kScalarMul] + sum[CostTerm::kArrange],
              6 + n * n / 4);
    EXPECT_EQ(t[2], (37 + 3 * n * n) / 2);
    // Element rows: printed value is four times the sum.
    const double elem =
        sum[CostTerm::kMultiplyLarge] + sum[CostTerm::kSubtract];
    EXPECT_EQ(elem, n * n * n / 8 + n * n / 4);
    EXPECT_EQ(t[3], 4 * elem);
  }
}

// At b = 2 the LU recursion has no internal calls (2^0 - 1 = 0), so only the
// leaf and the additional multiplies remain in the level sum.
TEST(ClosedForm, LuSingleLevelCorrespondence) {
  const double n = 256;
  const CostParams p = params(256, 2, 1);
  const auto sum = spin::lu_cost_levelsum(p);
  const auto t = spin::lu_cost_closed_terms(p, 0);
  EXPECT_EQ(t[0], sum[CostTerm::kLeafNode]);
  EXPECT_EQ(t[6], sum[CostTerm::kAdditionalCost]);
  for (std::size_t k = 1; k + 1 < spin::kCostTermCount; ++k)
    EXPECT_EQ(sum.terms[k], 0.0);
  EXPECT_EQ(t[3], 0.0);
  // The printed b^2 - 14 factor makes the second term negative at b = 2.
  EXPECT_EQ(t[1], 64.0 * n * n * 3 * (4 - 14) / (105.0 * 4));
  EXPECT_LT(t[1], 0.0);
}

TEST(ClosedForm, GapToLevelSumGrowsWithB) {
  // Relative gap (closed - sum) / sum at level 0; recorded, not minimized.
  const double n = 4096;
  double prev = 0.0;
  for (std::size_t b : {4, 8, 16, 32}) {
    const CostParams p = params(4096, b, 1);
    const double sum = spin::spin_cost_levelsum(p).total();
    const double closed = spin::spin_cost_closed(p, 0);
    const double gap = (closed - sum) / sum;
    EXPECT_GT(gap, 0.0) << b;
    EXPECT_GT(gap, prev) << b;
    prev = gap;
    (void)n;
  }
}

TEST(UCurve, LeafDominatedRangeDecreases) {
  const auto u = spin::predict_u_curve(Algorithm::kSpin, 16384, 1, {1, 2, 4});
  EXPECT_GT(u.points[0].cost, u.points[1].cost);
  EXPECT_GT(u.points[1].cost, u.points[2].cost);
  EXPECT_EQ(u.argmin_b, 4u);
}

TEST(UCurve, SingleInteriorMinimumAtDeskAndPaperScale) {
  const std::vector<std::size_t> bs{2, 4, 8, 16, 32, 64};
  for (std::size_t n : {2048, 4096}) {
    for (std::size_t cores : {8, 30}) {
      const auto u = spin::predict_u_curve(Algorithm::kSpin, n, cores, bs);
      std::vector<double> costs;
      for (const auto& pt : u.points) costs.push_back(pt.cost);
      EXPECT_EQ(spin::count_local_minima(costs), 1u) << n << "/" << cores;
      EXPECT_NE(u.argmin_b, bs.front());
      EXPECT_NE(u.argmin_b, bs.back()) << n << "/" << cores;
    }
  }
}

TEST(UCurve, ArgminInvariantUnderScaling) {
  const auto u =
      spin::predict_u_curve(Algorithm::kSpin, 4096, 30, {2, 4, 8, 16, 32, 64});
  std::vector<double> costs;
  for (const auto& pt : u.points) costs.push_back(pt.cost);
  for (double s : {1e-9, 0.37, 3.0, 1e6}) {
    std::vector<double> scaled;
    for (double c : costs) scaled.push_back(c * s);
    EXPECT_EQ(spin::argmin_index(scaled), spin::argmin_index(costs));
  }
}

TEST(UCurve, RejectsUnsortedB) {
  EXPECT_THROW(spin::predict_u_curve(Algorithm::kSpin, 64, 4, {4, 2}),
               spin::InvalidParams);
}

TEST(Calibration, RecoversScale) {
  const std::vector<double> pred{1559, 579, 337, 309, 465};
  std::vector<double> meas;
  for (double p : pred) meas.push_back(2.5 * p);
  EXPECT_DOUBLE_EQ(spin::fit_calibration(meas, pred), 2.5);
  EXPECT_THROW(spin::fit_calibration({1.0}, {1.0, 2.0}),
               spin::InsufficientData);
  EXPECT_THROW(spin::fit_calibration({}, {}), spin::InsufficientData);
  EXPECT_THROW(spin::fit_calibration({1.0}, {0.0}), spin::InsufficientData);
}

TEST(LocalMinima, Counting) {
  // The paper's n = 8192 series: theoretical and experimental.
  EXPECT_EQ(spin::count_local_minima({1559, 579, 337, 309, 465}), 1u);
  EXPECT_EQ(spin::count_local_minima({1281, 583, 296, 246, 323}), 1u);
  EXPECT_EQ(spin::argmin_index({1559, 579, 337, 309, 465}), 3u);
  EXPECT_EQ(spin::count_local_minima({3, 1, 2, 0, 5}), 2u);
  EXPECT_EQ(spin::count_local_minima({5, 4, 3}), 1u);
  EXPECT_EQ(spin::count_local_minima({2, 2, 2}), 0u);
  EXPECT_EQ(spin::count_local_minima({7}), 0u);
}

}  // namespace
