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

#ifndef SPIN__BLOCK_MATRIX_HPP_
#define SPIN__BLOCK_MATRIX_HPP_

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spin/dense_tile.hpp"
#include "spin/error.hpp"
#include "spin/executor.hpp"

namespace spin {

using TilePtr = std::shared_ptr<const DenseTile>;

inline TilePtr make_tile(DenseTile t) {
  return std::make_shared<const DenseTile>(std::move(t));
}

/// One tile of a block matrix, addressed by its block-grid coordinates.
struct MatrixBlock {
  std::size_t row = 0;
  std::size_t col = 0;
  TilePtr tile;
};

/// Square matrix of order n stored as a grid x grid arrangement of
/// block_size x block_size tiles.
///
/// Blocks are kept in row-major (row, col) order, which is the canonical
/// order every stage emits its results in. Tiles are shared and immutable,
/// so re-indexing a block never copies its payload.
class BlockMatrix {
 public:
  BlockMatrix() = default;

  BlockMatrix(std::size_t n, std::size_t block_size,
              std::vector<MatrixBlock> blocks)
      : n_(n), block_size_(block_size), blocks_(std::move(blocks)) {
    if (block_size_ == 0 || n_ == 0 || n_ % block_size_ != 0) {
      throw BadBlockSize("block size " + std::to_string(block_size_) +
                         " does not divide n = " + std::to_string(n_));
    }
    grid_ = n_ / block_size_;
    if (!is_power_of_two(n_) || !is_power_of_two(grid_)) {
      throw NonPowerOfTwo("n = " + std::to_string(n_) + " and b = " +
                          std::to_string(grid_) +
                          " must both be powers of two");
    }
    if (blocks_.size() != grid_ * grid_) {
      throw DimensionMismatch("expected " + std::to_string(grid_ * grid_) +
                              " blocks, got " +
                              std::to_string(blocks_.size()));
    }
    std::sort(blocks_.begin(), blocks_.end(),
              [](const MatrixBlock& x, const MatrixBlock& y) {
                return std::pair(x.row, x.col) < std::pair(y.row, y.col);
              });
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const auto& blk = blocks_[k];
      if (blk.row != k / grid_ || blk.col != k % grid_) {
        throw DimensionMismatch("block grid has a duplicate or a gap near (" +
                                std::to_string(blk.row) + ", " +
                                std::to_string(blk.col) + ")");
      }
      if (!blk.tile || blk.tile->dim() != block_size_) {
        throw DimensionMismatch("tile at (" + std::to_string(blk.row) + ", " +
                                std::to_string(blk.col) +
                                ") does not match block size");
      }
    }
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t block_size() const noexcept { return block_size_; }
  /// Splits per side (b).
  std::size_t grid() const noexcept { return grid_; }

  const std::vector<MatrixBlock>& blocks() const noexcept { return blocks_; }
  const MatrixBlock& block(std::size_t row, std::size_t col) const {
    return blocks_[row * grid_ + col];
  }
  const DenseTile& tile(std::size_t row, std::size_t col) const {
    return *block(row, col).tile;
  }

  static BlockMatrix filled(std::size_t n, std::size_t block_size,
                            const TilePtr& diag, const TilePtr& off) {
    const std::size_t g = n / block_size;
    std::vector<MatrixBlock> blocks;
    blocks.reserve(g * g);
    for (std::size_t r = 0; r < g; ++r)
      for (std::size_t c = 0; c < g; ++c)
        blocks.push_back({r, c, r == c ? diag : off});
    return BlockMatrix(n, block_size, std::move(blocks));
  }

  static BlockMatrix identity(std::size_t n, std::size_t block_size) {
    return filled(n, block_size,
                  make_tile(DenseTile::identity(block_size)),
                  make_tile(DenseTile::zeros(block_size)));
  }

  static BlockMatrix zeros(std::size_t n, std::size_t block_size) {
    auto z = make_tile(DenseTile::zeros(block_size));
    return filled(n, block_size, z, z);
  }

  /// Blockwise exact equality of layout and values.
  friend bool operator==(const BlockMatrix& x, const BlockMatrix& y) {
    if (x.n_ != y.n_ || x.block_size_ != y.block_size_) return false;
    for (std::size_t k = 0; k < x.blocks_.size(); ++k) {
      if (*x.blocks_[k].tile != *y.blocks_[k].tile) return false;
    }
    return true;
  }

 private:
  std::size_t n_ = 0;
  std::size_t block_size_ = 0;
  std::size_t grid_ = 0;
  std::vector<MatrixBlock> blocks_;
};

enum class Quadrant : std::uint8_t { kA11 = 0, kA12 = 1, kA21 = 2, kA22 = 3 };

inline constexpr std::string_view quadrant_name(Quadrant q) noexcept {
  constexpr std::array<std::string_view, 4> names{"A11", "A12", "A21", "A22"};
  return names[static_cast<std::size_t>(q)];
}

struct TaggedBlock {
  Quadrant tag;
  MatrixBlock block;  // indices local to the quadrant
};

/// Output of break_mat: every block tagged with its quadrant.
struct QuadrantSet {
  std::vector<TaggedBlock> tagged;
  std::size_t half_grid = 0;
  std::size_t block_size = 0;
};

namespace detail {

inline void require_conformable(const BlockMatrix& a, const BlockMatrix& b,
                                const char* op) {
  if (a.n() != b.n() || a.block_size() != b.block_size()) {
    throw DimensionMismatch(std::string(op) + ": (n=" +
                            std::to_string(a.n()) + ", bs=" +
                            std::to_string(a.block_size()) + ") vs (n=" +
                            std::to_string(b.n()) + ", bs=" +
                            std::to_string(b.block_size()) + ")");
  }
}

}  // namespace detail

/// Tags each block with its quadrant using integer div/mod against the
/// half-grid size and remaps it to quadrant-local indices.
inline QuadrantSet break_mat(const BlockMatrix& a, Executor& ex) {
  if (a.grid() < 2 || a.grid() % 2 != 0) {
    throw OddGrid("break_mat needs an even block grid, got b = " +
                  std::to_string(a.grid()));
  }
  const std::size_t size = a.grid() / 2;
  const auto& blocks = a.blocks();
  QuadrantSet out;
  out.half_grid = size;
  out.block_size = a.block_size();
  out.tagged = ex.run_stage(Method::kBreakMat, blocks.size(),
                            [&](std::size_t k) {
    const MatrixBlock& blk = blocks[k];
    const std::size_t ri = blk.row;
    const std::size_t ci = blk.col;
    Quadrant tag;
    if (ri / size == 0 && ci / size == 0) {
      tag = Quadrant::kA11;
    } else if (ri / size == 0 && ci / size == 1) {
      tag = Quadrant::kA12;
    } else if (ri / size == 1 && ci / size == 0) {
      tag = Quadrant::kA21;
    } else {
      tag = Quadrant::kA22;
    }
    return TaggedBlock{tag, MatrixBlock{ri % size, ci % size, blk.tile}};
  });
  return out;
}

/// Filters one quadrant out of a tagged set (the xy method).
inline BlockMatrix quadrant(const QuadrantSet& q, Quadrant which,
                            Executor& ex) {
  const auto keep = ex.run_stage(Method::kXy, q.tagged.size(),
                                 [&](std::size_t k) -> char {
    return q.tagged[k].tag == which ? 1 : 0;
  });
  std::vector<std::size_t> selected;
  selected.reserve(q.half_grid * q.half_grid);
  for (std::size_t k = 0; k < keep.size(); ++k)
    if (keep[k]) selected.push_back(k);
  auto blocks = ex.run_stage(Method::kXy, selected.size(),
                             [&](std::size_t k) {
    return q.tagged[selected[k]].block;
  });
  return BlockMatrix(q.half_grid * q.block_size, q.block_size,
                     std::move(blocks));
}

/// Reassembles four quadrant matrices by shifting their block indices.
inline BlockMatrix arrange(const BlockMatrix& c11, const BlockMatrix& c12,
                           const BlockMatrix& c21, const BlockMatrix& c22,
                           Executor& ex) {
  detail::require_conformable(c11, c12, "arrange");
  detail::require_conformable(c11, c21, "arrange");
  detail::require_conformable(c11, c22, "arrange");
  const std::size_t size = c11.grid();
  const std::size_t per = size * size;
  const BlockMatrix* parts[4] = {&c11, &c12, &c21, &c22};
  auto blocks = ex.run_stage(Method::kArrange, 4 * per, [&](std::size_t k) {
    const std::size_t which = k / per;
    MatrixBlock blk = parts[which]->blocks()[k % per];
    if (which == 1 || which == 3) blk.col += size;
    if (which == 2 || which == 3) blk.row += size;
    return blk;
  });
  return BlockMatrix(2 * c11.n(), c11.block_size(), std::move(blocks));
}

inline BlockMatrix scalar_mul(const BlockMatrix& a, double s, Executor& ex,
                              Method label = Method::kScalarMul) {
  const auto& blocks = a.blocks();
  auto out = ex.run_stage(label, blocks.size(), [&](std::size_t k) {
    const MatrixBlock& blk = blocks[k];
    return MatrixBlock{blk.row, blk.col, make_tile(tile_scale(*blk.tile, s))};
  });
  return BlockMatrix(a.n(), a.block_size(), std::move(out));
}

/// Blockwise a - b, joined on (row, col).
inline BlockMatrix subtract(const BlockMatrix& a, const BlockMatrix& b,
                            Executor& ex,
                            Method label = Method::kSubtract) {
  detail::require_conformable(a, b, "subtract");
  const auto& xa = a.blocks();
  const auto& xb = b.blocks();
  auto out = ex.run_stage(label, xa.size(), [&](std::size_t k) {
    return MatrixBlock{xa[k].row, xa[k].col,
                       make_tile(tile_sub(*xa[k].tile, *xb[k].tile))};
  });
  return BlockMatrix(a.n(), a.block_size(), std::move(out));
}

/// Bytes moved across the grouping boundary of a cogroup multiply: each of
/// the b^2 blocks of both operands is replicated to the b output blocks that
/// consume it.
inline std::uint64_t account_multiply_shuffle(const BlockMatrix& a,
                                              const BlockMatrix& b) {
  detail::require_conformable(a, b, "multiply");
  const std::uint64_t g = a.grid();
  const std::uint64_t bs = a.block_size();
  return 8ull * 2ull * g * g * g * bs * bs;
}

/// Block product C(i,j) = sum_k A(i,k) B(k,j).
///
/// Runs as one stage with a task per output block; each task receives the
/// row i of A and column j of B (the cogrouped operands) and accumulates the
/// partial products in ascending k.
inline BlockMatrix multiply(const BlockMatrix& a, const BlockMatrix& b,
                            Executor& ex, Method label = Method::kMultiply) {
  detail::require_conformable(a, b, "multiply");
  const std::size_t g = a.grid();
  const std::size_t bs = a.block_size();
  const std::uint64_t shuffle = account_multiply_shuffle(a, b);
  // Operand groups: rows of A and columns of B as contiguous tile pointers.
  std::vector<const DenseTile*> a_rows(g * g), b_cols(g * g);
  for (std::size_t r = 0; r < g; ++r) {
    for (std::size_t c = 0; c < g; ++c) {
      a_rows[r * g + c] = &a.tile(r, c);
      b_cols[c * g + r] = &b.tile(r, c);
    }
  }
  auto out = ex.run_stage(
      label, g * g,
      [&](std::size_t k) {
        const std::size_t i = k / g;
        const std::size_t j = k % g;
        const DenseTile* const* row = &a_rows[i * g];
        const DenseTile* const* col = &b_cols[j * g];
        DenseTile acc(bs);
        for (std::size_t p = 0; p < g; ++p) {
          gemm_accumulate(acc, *row[p], *col[p]);
        }
        return MatrixBlock{i, j, make_tile(std::move(acc))};
      },
      shuffle);
  return BlockMatrix(a.n(), bs, std::move(out));
}

/// Assembles the dense order-n matrix.
inline DenseTile densify(const BlockMatrix& a) {
  const std::size_t bs = a.block_size();
  DenseTile out(a.n());
  for (const auto& blk : a.blocks()) {
    for (std::size_t j = 0; j < bs; ++j) {
      const double* src = blk.tile->column(j);
      std::copy(src, src + bs, out.column(blk.col * bs + j) + blk.row * bs);
    }
  }
  return out;
}

/// Cuts a dense matrix into block_size tiles.
inline BlockMatrix partition(const DenseTile& dense, std::size_t block_size) {
  const std::size_t n = dense.dim();
  if (block_size == 0 || n % block_size != 0 || !is_power_of_two(block_size) ||
      !is_power_of_two(n)) {
    throw BadBlockSize("cannot partition order " + std::to_string(n) +
                       " into tiles of " + std::to_string(block_size));
  }
  const std::size_t g = n / block_size;
  std::vector<MatrixBlock> blocks;
  blocks.reserve(g * g);
  for (std::size_t r = 0; r < g; ++r) {
    for (std::size_t c = 0; c < g; ++c) {
      DenseTile t(block_size);
      for (std::size_t j = 0; j < block_size; ++j) {
        const double* src = dense.column(c * block_size + j) + r * block_size;
        std::copy(src, src + block_size, t.column(j));
      }
      blocks.push_back({r, c, make_tile(std::move(t))});
    }
  }
  return BlockMatrix(n, block_size, std::move(blocks));
}

}  // namespace spin

#endif  // SPIN__BLOCK_MATRIX_HPP_
