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

#ifndef SPIN__SPIN_INVERSION_HPP_
#define SPIN__SPIN_INVERSION_HPP_

#include <cstddef>
#include <utility>

#include "spin/block_matrix.hpp"
#include "spin/dense_tile.hpp"
#include "spin/executor.hpp"
#include "spin/trace.hpp"

namespace spin {

struct InversionResult {
  BlockMatrix inverse;
  InversionTrace trace;
};

namespace detail {

// Strassen's block inversion of
//
//   A = | A11 A12 |
//       | A21 A22 |
//
//   I   = A11^-1          V   = IV - A22        (the negated Schur complement)
//   II  = A21 I           VI  = V^-1
//   III = I A12           C12 = III VI
//   IV  = A21 III         C21 = VI II
//                         VII = III C21
//   A^-1 = | I - VII   C12 |
//          | C21       -VI |
//
// Two recursive inversions and six multiplies per internal node.
inline BlockMatrix spin_node(const BlockMatrix& a, std::size_t level,
                             TraceRecorder& rec) {
  Executor& ex = rec.executor();
  if (a.grid() == 1) {
    const std::size_t id = rec.open_node(level, false);
    const TilePtr& tile = a.blocks().front().tile;
    auto out = ex.run_stage(Method::kLeafNode, 1, [&](std::size_t) {
      return MatrixBlock{0, 0, make_tile(leaf_invert(*tile))};
    });
    ++rec.trace().leaf_kernel_ops;
    rec.collect(level, id, "leaf");
    return BlockMatrix(a.n(), a.block_size(), std::move(out));
  }

  const std::size_t id = rec.open_node(level, true);
  const QuadrantSet q = break_mat(a, ex);
  rec.collect(level, id, "breakMat");
  const BlockMatrix a11 = quadrant(q, Quadrant::kA11, ex);
  rec.collect(level, id, "xy11");
  const BlockMatrix a12 = quadrant(q, Quadrant::kA12, ex);
  rec.collect(level, id, "xy12");
  const BlockMatrix a21 = quadrant(q, Quadrant::kA21, ex);
  rec.collect(level, id, "xy21");
  const BlockMatrix a22 = quadrant(q, Quadrant::kA22, ex);
  rec.collect(level, id, "xy22");

  const BlockMatrix i1 = spin_node(a11, level + 1, rec);
  const BlockMatrix i2 = multiply(a21, i1, ex);
  rec.collect(level, id, "II");
  const BlockMatrix i3 = multiply(i1, a12, ex);
  rec.collect(level, id, "III");
  const BlockMatrix i4 = multiply(a21, i3, ex);
  rec.collect(level, id, "IV");
  const BlockMatrix i5 = subtract(i4, a22, ex);
  rec.collect(level, id, "V");
  const BlockMatrix i6 = spin_node(i5, level + 1, rec);
  const BlockMatrix c12 = multiply(i3, i6, ex);
  rec.collect(level, id, "C12");
  const BlockMatrix c21 = multiply(i6, i2, ex);
  rec.collect(level, id, "C21");
  const BlockMatrix i7 = multiply(i3, c21, ex);
  rec.collect(level, id, "VII");
  const BlockMatrix c11 = subtract(i1, i7, ex);
  rec.collect(level, id, "C11");
  const BlockMatrix c22 = scalar_mul(i6, -1.0, ex);
  rec.collect(level, id, "C22");
  BlockMatrix c = arrange(c11, c12, c21, c22, ex);
  rec.collect(level, id, "arrange");
  return c;
}

}  // namespace detail

/// Inverts a block matrix with the distributed Strassen scheme.
///
/// Every block operation runs as an executor stage; the recursion itself is
/// sequential. Throws SingularTile when a leaf (or a Schur complement leaf)
/// is not invertible: no pivoting is done across blocks.
inline InversionResult spin_invert(const BlockMatrix& a, Executor& ex) {
  ex.take_reports();
  InversionResult result;
  detail::TraceRecorder rec(ex, result.trace);
  result.inverse = detail::spin_node(a, 0, rec);
  return result;
}

/// Single-process dense Strassen inversion with recursion cutoff `threshold`.
inline DenseTile spin_invert_serial(const DenseTile& a, std::size_t threshold) {
  if (threshold == 0) throw InvalidParams("threshold must be >= 1");
  const std::size_t n = a.dim();
  if (n <= threshold || n % 2 != 0) return leaf_invert(a);
  const DenseTile a11 = tile_quadrant(a, 0, 0);
  const DenseTile a12 = tile_quadrant(a, 0, 1);
  const DenseTile a21 = tile_quadrant(a, 1, 0);
  const DenseTile a22 = tile_quadrant(a, 1, 1);
  const DenseTile i1 = spin_invert_serial(a11, threshold);
  const DenseTile i2 = gemm(a21, i1);
  const DenseTile i3 = gemm(i1, a12);
  const DenseTile i4 = gemm(a21, i3);
  const DenseTile i5 = tile_sub(i4, a22);
  const DenseTile i6 = spin_invert_serial(i5, threshold);
  const DenseTile c12 = gemm(i3, i6);
  const DenseTile c21 = gemm(i6, i2);
  const DenseTile i7 = gemm(i3, c21);
  const DenseTile c11 = tile_sub(i1, i7);
  const DenseTile c22 = tile_scale(i6, -1.0);
  return tile_join(c11, c12, c21, c22);
}

}  // namespace spin

#endif  // SPIN__SPIN_INVERSION_HPP_
