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

#ifndef SPIN__MATRIX_IO_HPP_
#define SPIN__MATRIX_IO_HPP_

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "spin/block_matrix.hpp"
#include "spin/error.hpp"

// SPINMAT1 binary layout (all integers and doubles little-endian):
//
//   "SPINMAT1"                 8 ASCII bytes
//   u64 n, u64 blockSize
//   b^2 records in ascending (rowIndex, colIndex) order:
//     u64 rowIndex, u64 colIndex, blockSize^2 f64 values (column-major)

namespace spin {

inline constexpr char kMatrixMagic[8] = {'S', 'P', 'I', 'N',
                                         'M', 'A', 'T', '1'};

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> buf;
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(buf.data(), 8);
}

inline std::uint64_t get_u64(std::istream& is) {
  std::array<unsigned char, 8> buf;
  if (!is.read(reinterpret_cast<char*>(buf.data()), 8)) {
    throw FormatError("unexpected end of matrix file");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

inline void put_f64(std::ostream& os, double d) {
  put_u64(os, std::bit_cast<std::uint64_t>(d));
}

inline double get_f64(std::istream& is) {
  return std::bit_cast<double>(get_u64(is));
}

}  // namespace detail

inline void write_matrix(std::ostream& os, const BlockMatrix& a) {
  os.write(kMatrixMagic, 8);
  detail::put_u64(os, a.n());
  detail::put_u64(os, a.block_size());
  for (const auto& blk : a.blocks()) {
    detail::put_u64(os, blk.row);
    detail::put_u64(os, blk.col);
    for (double v : blk.tile->data()) detail::put_f64(os, v);
  }
  if (!os) throw FormatError("failed writing matrix");
}

inline BlockMatrix read_matrix(std::istream& is) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMatrixMagic, 8) != 0) {
    throw FormatError("bad magic: not a SPINMAT1 file");
  }
  const std::uint64_t n = detail::get_u64(is);
  const std::uint64_t bs = detail::get_u64(is);
  if (n == 0 || bs == 0 || n % bs != 0 || !is_power_of_two(n) ||
      !is_power_of_two(bs) || n > (1ull << 20)) {
    throw FormatError("bad header: n=" + std::to_string(n) +
                      " blockSize=" + std::to_string(bs));
  }
  const std::uint64_t g = n / bs;
  std::vector<MatrixBlock> blocks;
  blocks.reserve(g * g);
  for (std::uint64_t k = 0; k < g * g; ++k) {
    const std::uint64_t r = detail::get_u64(is);
    const std::uint64_t c = detail::get_u64(is);
    if (r != k / g || c != k % g) {
      throw FormatError("block record " + std::to_string(k) +
                        " out of order: (" + std::to_string(r) + ", " +
                        std::to_string(c) + ")");
    }
    std::vector<double> data(bs * bs);
    for (auto& v : data) v = detail::get_f64(is);
    blocks.push_back({r, c, make_tile(DenseTile(bs, std::move(data)))});
  }
  if (is.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after last block");
  }
  return BlockMatrix(n, bs, std::move(blocks));
}

inline void save_matrix(const std::string& path, const BlockMatrix& a) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open '" + path + "' for writing");
  write_matrix(os, a);
}

inline BlockMatrix load_matrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open '" + path + "'");
  return read_matrix(is);
}

/// Dense CSV: one matrix row per line, comma separated, round-trip precision.
inline void write_dense_csv(std::ostream& os, const DenseTile& a) {
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < a.dim(); ++j) {
      if (j) os << ',';
      os << a(i, j);
    }
    os << '\n';
  }
}

inline DenseTile read_dense_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const char* first = cell.data();
      while (first < cell.data() + cell.size() && *first == ' ') ++first;
      auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
      if (ec != std::errc()) throw FormatError("bad CSV value '" + cell + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError("empty CSV matrix");
  for (const auto& r : rows) {
    if (r.size() != rows.size()) throw FormatError("CSV matrix is not square");
  }
  return DenseTile::from_rows(rows);
}

}  // namespace spin

#endif  // SPIN__MATRIX_IO_HPP_
