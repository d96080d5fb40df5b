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

#ifndef SPIN__DENSE_TILE_HPP_
#define SPIN__DENSE_TILE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstring>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spin/error.hpp"

namespace spin {

/// Square dense matrix of doubles stored column-major.
///
/// Tiles are the payload of a block and the unit of work of every serial
/// kernel below. All kernels are pure: inputs are never modified.
class DenseTile {
 public:
  DenseTile() = default;

  explicit DenseTile(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {
    if (dim == 0) throw DimensionMismatch("tile dimension must be >= 1");
  }

  DenseTile(std::size_t dim, std::vector<double> data)
      : dim_(dim), data_(std::move(data)) {
    if (dim == 0) throw DimensionMismatch("tile dimension must be >= 1");
    if (data_.size() != dim * dim) {
      throw DimensionMismatch("tile data length " +
                              std::to_string(data_.size()) + " != dim^2 = " +
                              std::to_string(dim * dim));
    }
  }

  static DenseTile identity(std::size_t dim) {
    DenseTile t(dim);
    for (std::size_t i = 0; i < dim; ++i) t(i, i) = 1.0;
    return t;
  }

  static DenseTile zeros(std::size_t dim) { return DenseTile(dim); }

  /// Builds a tile from row-major nested initializer data (test convenience).
  static DenseTile from_rows(
      const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    DenseTile t(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n) throw DimensionMismatch("ragged row data");
      for (std::size_t j = 0; j < n; ++j) t(i, j) = rows[i][j];
    }
    return t;
  }

  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return dim_ == 0; }

  double& operator()(std::size_t row, std::size_t col) noexcept {
    return data_[col * dim_ + row];
  }
  double operator()(std::size_t row, std::size_t col) const noexcept {
    return data_[col * dim_ + row];
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  double* column(std::size_t col) noexcept { return data_.data() + col * dim_; }
  const double* column(std::size_t col) const noexcept {
    return data_.data() + col * dim_;
  }

  friend bool operator==(const DenseTile&, const DenseTile&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

namespace detail {

inline void require_same_dim(const DenseTile& a, const DenseTile& b,
                             const char* op) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch(std::string(op) + ": " + std::to_string(a.dim()) +
                            " vs " + std::to_string(b.dim()));
  }
}

// k-panel width of the gemm loop nest. Per output element the k order stays
// ascending, so blocking does not change any rounding.
inline constexpr std::size_t kGemmPanel = 128;
inline constexpr std::size_t kGemmRows = 16;
inline constexpr std::size_t kGemmCols = 4;

// Fixed-width SIMD lane for the gemm micro-kernel (GCC/Clang extension).
inline constexpr std::size_t kLaneWidth = 4;
using Lane = double __attribute__((vector_size(kLaneWidth * sizeof(double))));

inline Lane load_lane(const double* p) {
  Lane v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

inline void store_lane(double* p, Lane v) { std::memcpy(p, &v, sizeof v); }

}  // namespace detail

/// Maximum absolute row sum.
inline double inf_norm(const DenseTile& a) {
  const std::size_t n = a.dim();
  std::vector<double> row_sum(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double* col = a.column(j);
    for (std::size_t i = 0; i < n; ++i) row_sum[i] += std::abs(col[i]);
  }
  double best = 0.0;
  for (double s : row_sum) best = std::max(best, s);
  return best;
}

inline double frobenius_norm(const DenseTile& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

/// c += a * b, summing over k in ascending order for every element.
inline void gemm_accumulate(DenseTile& c, const DenseTile& a,
                            const DenseTile& b) {
  detail::require_same_dim(a, b, "gemm");
  detail::require_same_dim(a, c, "gemm accumulator");
  const std::size_t n = a.dim();
  constexpr std::size_t mr = detail::kGemmRows;
  constexpr std::size_t nr = detail::kGemmCols;
  // Every c(i, j) still receives its products in ascending k, so the result
  // is bit-identical to the naive triple loop (with contraction disabled).
  for (std::size_t kk = 0; kk < n; kk += detail::kGemmPanel) {
    const std::size_t k_end = std::min(n, kk + detail::kGemmPanel);
    std::size_t j = 0;
    for (; j + nr <= n; j += nr) {
      std::size_t i = 0;
      static_assert(nr == 4);
      const double* b0 = b.column(j);
      const double* b1 = b.column(j + 1);
      const double* b2 = b.column(j + 2);
      const double* b3 = b.column(j + 3);
      for (; i + mr <= n; i += mr) {
        double* __restrict c0 = c.column(j) + i;
        double* __restrict c1 = c.column(j + 1) + i;
        double* __restrict c2 = c.column(j + 2) + i;
        double* __restrict c3 = c.column(j + 3) + i;
        using detail::Lane;
        constexpr std::size_t lanes = mr / detail::kLaneWidth;
        Lane acc0[lanes], acc1[lanes], acc2[lanes], acc3[lanes];
        for (std::size_t v = 0; v < lanes; ++v) {
          acc0[v] = detail::load_lane(c0 + v * detail::kLaneWidth);
          acc1[v] = detail::load_lane(c1 + v * detail::kLaneWidth);
          acc2[v] = detail::load_lane(c2 + v * detail::kLaneWidth);
          acc3[v] = detail::load_lane(c3 + v * detail::kLaneWidth);
        }
        for (std::size_t k = kk; k < k_end; ++k) {
          const double* ak = a.column(k) + i;
          const double x0 = b0[k], x1 = b1[k], x2 = b2[k], x3 = b3[k];
          for (std::size_t v = 0; v < lanes; ++v) {
            const Lane av = detail::load_lane(ak + v * detail::kLaneWidth);
            acc0[v] += av * x0;
            acc1[v] += av * x1;
            acc2[v] += av * x2;
            acc3[v] += av * x3;
          }
        }
        for (std::size_t v = 0; v < lanes; ++v) {
          detail::store_lane(c0 + v * detail::kLaneWidth, acc0[v]);
          detail::store_lane(c1 + v * detail::kLaneWidth, acc1[v]);
          detail::store_lane(c2 + v * detail::kLaneWidth, acc2[v]);
          detail::store_lane(c3 + v * detail::kLaneWidth, acc3[v]);
        }
      }
      for (std::size_t q = 0; q < nr; ++q) {
        for (std::size_t k = kk; k < k_end; ++k) {
          const double bkj = b(k, j + q);
          for (std::size_t r = i; r < n; ++r) c(r, j + q) += a(r, k) * bkj;
        }
      }
    }
    for (; j < n; ++j) {
      for (std::size_t k = kk; k < k_end; ++k) {
        const double bkj = b(k, j);
        for (std::size_t r = 0; r < n; ++r) c(r, j) += a(r, k) * bkj;
      }
    }
  }
}

/// Returns a * b (+ accumulator when given).
inline DenseTile gemm(const DenseTile& a, const DenseTile& b,
                      const DenseTile* accumulate_into = nullptr) {
  detail::require_same_dim(a, b, "gemm");
  DenseTile c = accumulate_into ? *accumulate_into : DenseTile(a.dim());
  gemm_accumulate(c, a, b);
  return c;
}

inline DenseTile tile_sub(const DenseTile& a, const DenseTile& b) {
  detail::require_same_dim(a, b, "tile_sub");
  DenseTile c(a.dim());
  auto out = c.data();
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - y[i];
  return c;
}

inline DenseTile tile_add(const DenseTile& a, const DenseTile& b) {
  detail::require_same_dim(a, b, "tile_add");
  DenseTile c(a.dim());
  auto out = c.data();
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
  return c;
}

inline DenseTile tile_scale(const DenseTile& a, double s) {
  DenseTile c(a.dim());
  auto out = c.data();
  auto x = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * x[i];
  return c;
}

/// Inverts a tile by Gauss-Jordan elimination with partial pivoting.
///
/// Throws SingularTile when a pivot magnitude drops below
/// 1e-12 * ||a||_inf. The input is left untouched.
inline DenseTile leaf_invert(const DenseTile& a) {
  const std::size_t n = a.dim();
  const double tol = 1e-12 * inf_norm(a);
  DenseTile work = a;
  DenseTile inv = DenseTile::identity(n);
  std::vector<double> factor(n);

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(work(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(work(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (!(best >= tol) || best == 0.0) {
      throw SingularTile("pivot " + std::to_string(best) + " at column " +
                         std::to_string(k) + " below tolerance " +
                         std::to_string(tol));
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(work(k, j), work(piv, j));
        std::swap(inv(k, j), inv(piv, j));
      }
    }
    const double rp = 1.0 / work(k, k);
    for (std::size_t j = 0; j < n; ++j) {
      work(k, j) *= rp;
      inv(k, j) *= rp;
    }
    const double* wk = work.column(k);
    std::copy(wk, wk + n, factor.begin());
    factor[k] = 0.0;
    for (std::size_t j = k; j < n; ++j) {
      double* __restrict col = work.column(j);
      const double pivot_row = col[k];
      if (pivot_row == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) col[i] -= factor[i] * pivot_row;
    }
    for (std::size_t j = 0; j < n; ++j) {
      double* __restrict col = inv.column(j);
      const double pivot_row = col[k];
      if (pivot_row == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) col[i] -= factor[i] * pivot_row;
    }
  }
  return inv;
}

/// Unit-lower / upper factors of a tile.
struct TileLU {
  DenseTile lower;
  DenseTile upper;
};

/// Doolittle LU without pivoting. Pivot tolerance as in leaf_invert.
inline TileLU lu_nopivot(const DenseTile& a) {
  const std::size_t n = a.dim();
  const double tol = 1e-12 * inf_norm(a);
  DenseTile w = a;
  for (std::size_t k = 0; k < n; ++k) {
    const double p = w(k, k);
    if (!(std::abs(p) >= tol) || p == 0.0) {
      throw SingularTile("LU pivot " + std::to_string(p) + " at " +
                         std::to_string(k) + " below tolerance " +
                         std::to_string(tol));
    }
    double* ck = w.column(k);
    const double rp = 1.0 / p;
    for (std::size_t i = k + 1; i < n; ++i) ck[i] *= rp;
    for (std::size_t j = k + 1; j < n; ++j) {
      double* __restrict cj = w.column(j);
      const double ukj = cj[k];
      for (std::size_t i = k + 1; i < n; ++i) cj[i] -= ck[i] * ukj;
    }
  }
  TileLU out{DenseTile::identity(n), DenseTile(n)};
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i <= j; ++i) out.upper(i, j) = w(i, j);
    for (std::size_t i = j + 1; i < n; ++i) out.lower(i, j) = w(i, j);
  }
  return out;
}

/// Inverse of a unit lower-triangular tile (diagonal is assumed to be 1).
inline DenseTile invert_unit_lower(const DenseTile& l) {
  const std::size_t n = l.dim();
  DenseTile x = DenseTile::identity(n);
  // Column j of X solves L x = e_j by forward substitution.
  for (std::size_t j = 0; j < n; ++j) {
    double* __restrict xj = x.column(j);
    for (std::size_t k = j; k < n; ++k) {
      const double xk = xj[k];
      if (xk == 0.0) continue;
      const double* lk = l.column(k);
      for (std::size_t i = k + 1; i < n; ++i) xj[i] -= lk[i] * xk;
    }
  }
  return x;
}

/// Inverse of a lower-triangular tile with a general diagonal.
inline DenseTile invert_lower(const DenseTile& l) {
  const std::size_t n = l.dim();
  const double tol = 1e-12 * inf_norm(l);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(std::abs(l(k, k)) >= tol) || l(k, k) == 0.0)
      throw SingularTile("zero diagonal in lower-triangular tile");
  }
  DenseTile x = DenseTile::identity(n);
  for (std::size_t j = 0; j < n; ++j) {
    double* __restrict xj = x.column(j);
    for (std::size_t k = j; k < n; ++k) {
      xj[k] /= l(k, k);
      const double xk = xj[k];
      if (xk == 0.0) continue;
      const double* lk = l.column(k);
      for (std::size_t i = k + 1; i < n; ++i) xj[i] -= lk[i] * xk;
    }
  }
  return x;
}

/// Inverse of an upper-triangular tile.
inline DenseTile invert_upper(const DenseTile& u) {
  const std::size_t n = u.dim();
  const double tol = 1e-12 * inf_norm(u);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(std::abs(u(k, k)) >= tol) || u(k, k) == 0.0)
      throw SingularTile("zero diagonal in upper-triangular tile");
  }
  DenseTile x(n);
  // Column j of X solves U x = e_j by back substitution; x(j+1:, j) = 0.
  for (std::size_t j = 0; j < n; ++j) {
    double* __restrict xj = x.column(j);
    xj[j] = 1.0;
    for (std::size_t k = j + 1; k-- > 0;) {
      xj[k] /= u(k, k);
      const double xk = xj[k];
      if (xk == 0.0) continue;
      const double* uk = u.column(k);
      for (std::size_t i = 0; i < k; ++i) xj[i] -= uk[i] * xk;
    }
  }
  return x;
}

/// Extracts the half-size quadrant (qr, qc) of an even-dimension tile.
inline DenseTile tile_quadrant(const DenseTile& a, std::size_t qr,
                               std::size_t qc) {
  const std::size_t h = a.dim() / 2;
  DenseTile q(h);
  for (std::size_t j = 0; j < h; ++j) {
    const double* src = a.column(qc * h + j) + qr * h;
    std::copy(src, src + h, q.column(j));
  }
  return q;
}

/// Inverse of tile_quadrant: assembles four half-size tiles.
inline DenseTile tile_join(const DenseTile& c11, const DenseTile& c12,
                           const DenseTile& c21, const DenseTile& c22) {
  const std::size_t h = c11.dim();
  detail::require_same_dim(c11, c12, "tile_join");
  detail::require_same_dim(c11, c21, "tile_join");
  detail::require_same_dim(c11, c22, "tile_join");
  DenseTile out(2 * h);
  const DenseTile* parts[2][2] = {{&c11, &c12}, {&c21, &c22}};
  for (std::size_t qr = 0; qr < 2; ++qr) {
    for (std::size_t qc = 0; qc < 2; ++qc) {
      for (std::size_t j = 0; j < h; ++j) {
        const double* src = parts[qr][qc]->column(j);
        std::copy(src, src + h, out.column(qc * h + j) + qr * h);
      }
    }
  }
  return out;
}

}  // namespace spin

#endif  // SPIN__DENSE_TILE_HPP_
