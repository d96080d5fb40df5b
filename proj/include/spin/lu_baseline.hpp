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

#ifndef SPIN__LU_BASELINE_HPP_
#define SPIN__LU_BASELINE_HPP_

#include <cstddef>
#include <utility>

#include "spin/block_matrix.hpp"
#include "spin/dense_tile.hpp"
#include "spin/executor.hpp"
#include "spin/spin_inversion.hpp"
#include "spin/trace.hpp"

namespace spin {

struct BlockLUResult {
  BlockMatrix lower;  // unit lower triangular
  BlockMatrix upper;
};

enum class Triangle { kLower, kUpper };

/// LU factors of one tile together with the inverses of both factors.
struct TileFactors {
  DenseTile lower;
  DenseTile upper;
  DenseTile lower_inv;
  DenseTile upper_inv;
  std::size_t leaf_ops = 0;  // cubic kernel calls of the leaf body
};

/// Inverts a triangular factor with the general leaf kernel, so that every
/// leaf operation costs the same as one full-tile inversion, and clears the
/// rounding residue outside the triangle.
inline DenseTile leaf_triangular_inverse(const DenseTile& t, Triangle side) {
  DenseTile inv = leaf_invert(t);
  const std::size_t d = inv.dim();
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < d; ++i) {
      if (side == Triangle::kLower ? i < j : i > j) inv(i, j) = 0.0;
    }
  }
  return inv;
}

/// Factors a tile at an LU leaf node.
///
/// The tile is split in half and processed as a 2x2 block system with two
/// half-size LU decompositions, four inversions of the triangular factors and three
/// multiplies (nine cubic operations). The full-tile factor inverses are then
/// assembled like an internal node does it. A 1x1 tile is factored directly.
inline TileFactors lu_leaf_kernel(const DenseTile& a) {
  const std::size_t d = a.dim();
  if (d == 1) {
    TileLU f = lu_nopivot(a);
    TileFactors out{f.lower, f.upper, invert_unit_lower(f.lower),
                    invert_upper(f.upper), 3};
    return out;
  }
  const DenseTile a11 = tile_quadrant(a, 0, 0);
  const DenseTile a12 = tile_quadrant(a, 0, 1);
  const DenseTile a21 = tile_quadrant(a, 1, 0);
  const DenseTile a22 = tile_quadrant(a, 1, 1);

  // LU, 2 inversions, 3 multiplies, LU, 2 inversions.
  TileLU f1 = lu_nopivot(a11);
  const DenseTile l1i = leaf_triangular_inverse(f1.lower, Triangle::kLower);
  const DenseTile u1i = leaf_triangular_inverse(f1.upper, Triangle::kUpper);
  const DenseTile u2 = gemm(l1i, a12);
  const DenseTile l2 = gemm(a21, u1i);
  const DenseTile s = tile_sub(a22, gemm(l2, u2));
  TileLU f3 = lu_nopivot(s);
  const DenseTile l3i = leaf_triangular_inverse(f3.lower, Triangle::kLower);
  const DenseTile u3i = leaf_triangular_inverse(f3.upper, Triangle::kUpper);

  const DenseTile zero(d / 2);
  TileFactors out;
  out.lower = tile_join(f1.lower, zero, l2, f3.lower);
  out.upper = tile_join(f1.upper, u2, zero, f3.upper);
  out.lower_inv =
      tile_join(l1i, zero, tile_scale(gemm(gemm(l3i, l2), l1i), -1.0), l3i);
  out.upper_inv =
      tile_join(u1i, tile_scale(gemm(gemm(u1i, u2), u3i), -1.0), zero, u3i);
  out.leaf_ops = 9;
  return out;
}

namespace detail {

struct BlockFactors {
  BlockMatrix lower;
  BlockMatrix upper;
  BlockMatrix lower_inv;
  BlockMatrix upper_inv;
};

inline BlockMatrix single_block(std::size_t bs, DenseTile t) {
  return BlockMatrix(bs, bs, {MatrixBlock{0, 0, make_tile(std::move(t))}});
}

// Inverse of a 2x2 block triangular matrix from its diagonal-block inverses
// and its off-diagonal block:
//   lower: [[T11^-1, 0], [-T22^-1 T21 T11^-1, T22^-1]]
//   upper: [[T11^-1, -T11^-1 T12 T22^-1], [0, T22^-1]]
inline BlockMatrix assemble_triangular_inverse(Triangle side,
                                               const BlockMatrix& t11_inv,
                                               const BlockMatrix& off,
                                               const BlockMatrix& t22_inv,
                                               TraceRecorder& rec,
                                               std::size_t level,
                                               std::size_t id) {
  Executor& ex = rec.executor();
  const BlockMatrix zero = BlockMatrix::zeros(t11_inv.n(),
                                              t11_inv.block_size());
  if (side == Triangle::kLower) {
    const BlockMatrix t = multiply(t22_inv, off, ex);
    rec.collect(level, id, "getLU.L1");
    const BlockMatrix u = multiply(t, t11_inv, ex);
    rec.collect(level, id, "getLU.L2");
    const BlockMatrix neg = scalar_mul(u, -1.0, ex);
    rec.collect(level, id, "getLU.Lneg");
    BlockMatrix out = arrange(t11_inv, zero, neg, t22_inv, ex);
    rec.collect(level, id, "getLU.Larrange");
    return out;
  }
  const BlockMatrix t = multiply(t11_inv, off, ex);
  rec.collect(level, id, "getLU.U1");
  const BlockMatrix u = multiply(t, t22_inv, ex);
  rec.collect(level, id, "getLU.U2");
  const BlockMatrix neg = scalar_mul(u, -1.0, ex);
  rec.collect(level, id, "getLU.Uneg");
  BlockMatrix out = arrange(t11_inv, neg, zero, t22_inv, ex);
  rec.collect(level, id, "getLU.Uarrange");
  return out;
}

struct Quadrants {
  BlockMatrix a11, a12, a21, a22;
};

inline Quadrants split(const BlockMatrix& a, TraceRecorder& rec,
                       std::size_t level, std::size_t id) {
  Executor& ex = rec.executor();
  const QuadrantSet q = break_mat(a, ex);
  rec.collect(level, id, "breakMat");
  Quadrants out;
  out.a11 = quadrant(q, Quadrant::kA11, ex);
  rec.collect(level, id, "xy11");
  out.a12 = quadrant(q, Quadrant::kA12, ex);
  rec.collect(level, id, "xy12");
  out.a21 = quadrant(q, Quadrant::kA21, ex);
  rec.collect(level, id, "xy21");
  out.a22 = quadrant(q, Quadrant::kA22, ex);
  rec.collect(level, id, "xy22");
  return out;
}

inline BlockFactors lu_leaf(const BlockMatrix& a, std::size_t level,
                            TraceRecorder& rec) {
  const std::size_t id = rec.open_node(level, false);
  const TilePtr& tile = a.blocks().front().tile;
  auto f = rec.executor().run_stage(Method::kLeafNode, 1, [&](std::size_t) {
    return lu_leaf_kernel(*tile);
  });
  rec.collect(level, id, "leaf");
  rec.trace().leaf_kernel_ops += f[0].leaf_ops;
  const std::size_t bs = a.block_size();
  return {single_block(bs, std::move(f[0].lower)),
          single_block(bs, std::move(f[0].upper)),
          single_block(bs, std::move(f[0].lower_inv)),
          single_block(bs, std::move(f[0].upper_inv))};
}

// Schur-style elimination shared by the LU recursion and the top level of
// the inversion:
//   (L11, U11) = LU(A11); U12 = L11^-1 A12; L21 = A21 U11^-1;
//   (L22, U22) = LU(A22 - L21 U12)
struct Elimination {
  BlockFactors f11;
  BlockFactors f22;
  BlockMatrix u12;
  BlockMatrix l21;
};

inline BlockFactors lu_node(const BlockMatrix& a, std::size_t level,
                            TraceRecorder& rec);

inline Elimination eliminate(const Quadrants& q, std::size_t level,
                             std::size_t id, TraceRecorder& rec) {
  Executor& ex = rec.executor();
  Elimination e;
  e.f11 = lu_node(q.a11, level + 1, rec);
  e.u12 = multiply(e.f11.lower_inv, q.a12, ex);
  rec.collect(level, id, "U12");
  e.l21 = multiply(q.a21, e.f11.upper_inv, ex);
  rec.collect(level, id, "L21");
  const BlockMatrix prod = multiply(e.l21, e.u12, ex);
  rec.collect(level, id, "L21U12");
  const BlockMatrix schur = subtract(q.a22, prod, ex);
  rec.collect(level, id, "S");
  e.f22 = lu_node(schur, level + 1, rec);
  return e;
}

inline BlockFactors lu_node(const BlockMatrix& a, std::size_t level,
                            TraceRecorder& rec) {
  if (a.grid() == 1) return lu_leaf(a, level, rec);
  const std::size_t id = rec.open_node(level, true);
  Executor& ex = rec.executor();
  const Quadrants q = split(a, rec, level, id);
  const Elimination e = eliminate(q, level, id, rec);

  // getLU: compose the factors and their inverses from the half-size parts.
  const BlockMatrix zero = BlockMatrix::zeros(q.a11.n(), q.a11.block_size());
  BlockFactors out;
  out.lower = arrange(e.f11.lower, zero, e.l21, e.f22.lower, ex);
  rec.collect(level, id, "getLU.L");
  out.upper = arrange(e.f11.upper, e.u12, zero, e.f22.upper, ex);
  rec.collect(level, id, "getLU.U");
  out.lower_inv =
      assemble_triangular_inverse(Triangle::kLower, e.f11.lower_inv, e.l21,
                                  e.f22.lower_inv, rec, level, id);
  out.upper_inv =
      assemble_triangular_inverse(Triangle::kUpper, e.f11.upper_inv, e.u12,
                                  e.f22.upper_inv, rec, level, id);
  return out;
}

inline BlockMatrix triangular_node(const BlockMatrix& t, Triangle side,
                                   std::size_t level, TraceRecorder& rec) {
  Executor& ex = rec.executor();
  if (t.grid() == 1) {
    const std::size_t id = rec.open_node(level, false);
    const TilePtr& tile = t.blocks().front().tile;
    auto out = ex.run_stage(Method::kLeafNode, 1, [&](std::size_t) {
      return MatrixBlock{0, 0,
                         make_tile(side == Triangle::kLower
                                       ? invert_lower(*tile)
                                       : invert_upper(*tile))};
    });
    ++rec.trace().leaf_kernel_ops;
    rec.collect(level, id, "leaf");
    return BlockMatrix(t.n(), t.block_size(), std::move(out));
  }
  const std::size_t id = rec.open_node(level, true);
  const Quadrants q = split(t, rec, level, id);
  const BlockMatrix t11_inv = triangular_node(q.a11, side, level + 1, rec);
  const BlockMatrix t22_inv = triangular_node(q.a22, side, level + 1, rec);
  const BlockMatrix& off = side == Triangle::kLower ? q.a21 : q.a12;
  return assemble_triangular_inverse(side, t11_inv, off, t22_inv, rec, level,
                                     id);
}

}  // namespace detail

/// Block-recursive LU decomposition without pivoting.
inline BlockLUResult block_lu(const BlockMatrix& a, Executor& ex,
                              InversionTrace* trace = nullptr) {
  ex.take_reports();
  InversionTrace local;
  detail::TraceRecorder rec(ex, trace ? *trace : local);
  detail::BlockFactors f = detail::lu_node(a, 0, rec);
  return {std::move(f.lower), std::move(f.upper)};
}

/// Block-recursive inverse of a triangular block matrix.
inline BlockMatrix triangular_invert(const BlockMatrix& t, Triangle side,
                                     Executor& ex,
                                     InversionTrace* trace = nullptr) {
  ex.take_reports();
  InversionTrace local;
  detail::TraceRecorder rec(ex, trace ? *trace : local);
  return detail::triangular_node(t, side, 0, rec);
}

/// LU-based inversion baseline.
///
/// The top level eliminates A11 and the Schur complement recursively and then
/// forms A^-1 = U^-1 L^-1 blockwise with seven half-size multiplies:
///   A11^-1 = U11^-1 L11^-1     S^-1 = U22^-1 L22^-1
///   X = U11^-1 U12             Y = L21 L11^-1
///   C12 = -X S^-1              C21 = -S^-1 Y
///   C11 = A11^-1 - X C21       C22 = S^-1
/// These are recorded as Method::kAdditional stages.
inline InversionResult lu_invert(const BlockMatrix& a, Executor& ex) {
  ex.take_reports();
  InversionResult result;
  detail::TraceRecorder rec(ex, result.trace);

  if (a.grid() == 1) {
    const detail::BlockFactors f = detail::lu_leaf(a, 0, rec);
    result.inverse = multiply(f.upper_inv, f.lower_inv, ex,
                              Method::kAdditional);
    rec.collect(0, 0, "U^-1 L^-1");
    return result;
  }

  const std::size_t id = rec.open_node(0, true);
  const detail::Quadrants q = detail::split(a, rec, 0, id);
  const detail::Elimination e = detail::eliminate(q, 0, id, rec);

  const Method add = Method::kAdditional;
  const BlockMatrix a11_inv =
      multiply(e.f11.upper_inv, e.f11.lower_inv, ex, add);
  rec.collect(0, id, "A11inv");
  const BlockMatrix s_inv = multiply(e.f22.upper_inv, e.f22.lower_inv, ex, add);
  rec.collect(0, id, "Sinv");
  const BlockMatrix x = multiply(e.f11.upper_inv, e.u12, ex, add);
  rec.collect(0, id, "X");
  const BlockMatrix y = multiply(e.l21, e.f11.lower_inv, ex, add);
  rec.collect(0, id, "Y");
  const BlockMatrix c12 =
      scalar_mul(multiply(x, s_inv, ex, add), -1.0, ex);
  rec.collect(0, id, "C12");
  const BlockMatrix c21 =
      scalar_mul(multiply(s_inv, y, ex, add), -1.0, ex);
  rec.collect(0, id, "C21");
  const BlockMatrix c11 = subtract(a11_inv, multiply(x, c21, ex, add), ex);
  rec.collect(0, id, "C11");
  result.inverse = arrange(c11, c12, c21, s_inv, ex);
  rec.collect(0, id, "arrange");
  return result;
}

}  // namespace spin

#endif  // SPIN__LU_BASELINE_HPP_
