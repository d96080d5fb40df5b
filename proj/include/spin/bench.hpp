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

#ifndef SPIN__BENCH_HPP_
#define SPIN__BENCH_HPP_

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spin/block_matrix.hpp"
#include "spin/cost_model.hpp"
#include "spin/executor.hpp"
#include "spin/lu_baseline.hpp"
#include "spin/spin_inversion.hpp"

namespace spin {

// ---------------------------------------------------------------------------
// Matrix generation

enum class MatrixKind { kSpd, kDiagonallyDominant, kUniform };

inline MatrixKind parse_matrix_kind(std::string_view s) {
  if (s == "spd") return MatrixKind::kSpd;
  if (s == "dd") return MatrixKind::kDiagonallyDominant;
  if (s == "uniform") return MatrixKind::kUniform;
  throw BadSpec("unknown matrix kind '" + std::string(s) + "'");
}

struct GenSpec {
  std::size_t n = 0;
  std::size_t block_size = 0;
  std::uint64_t seed = 0;
  MatrixKind kind = MatrixKind::kSpd;
};

/// Uniform doubles in [-1, 1) from a portable 64-bit Mersenne Twister.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}
  double next() {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
  }

 private:
  std::mt19937_64 engine_;
};

inline DenseTile generate_dense(const GenSpec& spec) {
  if (!is_power_of_two(spec.n) || !is_power_of_two(spec.block_size) ||
      spec.block_size > spec.n) {
    throw BadSpec("n and block size must be powers of two with "
                  "block size <= n");
  }
  const std::size_t n = spec.n;
  UniformSource rng(spec.seed);
  DenseTile m(n);
  for (auto& v : m.data()) v = rng.next();
  switch (spec.kind) {
    case MatrixKind::kUniform:
      return m;
    case MatrixKind::kDiagonallyDominant: {
      for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::abs(m(i, j));
        m(i, i) += row + 1.0;
      }
      return m;
    }
    case MatrixKind::kSpd: {
      DenseTile mt(n);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) mt(i, j) = m(j, i);
      DenseTile a = gemm(mt, m);
      for (std::size_t i = 0; i < n; ++i) a(i, i) += static_cast<double>(n);
      return a;
    }
  }
  return m;
}

inline BlockMatrix gen(const GenSpec& spec) {
  return partition(generate_dense(spec), spec.block_size);
}

// ---------------------------------------------------------------------------
// Benchmark records

inline constexpr std::string_view kSweepHeader =
    "algorithm,n,block_size,b,cores,run_id,status,wall_ms,leaf_ms,"
    "breakmat_ms,xy_ms,multiply_ms,subtract_ms,scalarmul_ms,arrange_ms,"
    "additional_ms,shuffle_bytes,residual_inf";

struct BenchRecord {
  std::string algorithm;
  std::size_t n = 0;
  std::size_t block_size = 0;
  std::size_t b = 0;
  std::size_t cores = 0;
  std::string run_id;
  std::string status = "ok";
  double wall_ms = 0.0;
  // Indexed by Method.
  std::array<double, kMethodCount> stage_ms{};
  std::uint64_t shuffle_bytes = 0;
  double residual_inf = 0.0;

  double stage(Method m) const {
    return stage_ms[static_cast<std::size_t>(m)];
  }
  bool is_summary() const { return run_id == "median"; }
};

namespace detail {

inline std::string format_double(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

inline std::string format_ms(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw FormatError("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("bad number '" + s + "'");
  }
}

inline std::uint64_t parse_u64(const std::string& s) {
  try {
    std::size_t pos = 0;
    const auto v = std::stoull(s, &pos);
    if (pos != s.size()) throw FormatError("bad integer '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("bad integer '" + s + "'");
  }
}

// CSV column order of the per-stage times.
inline constexpr std::array<Method, kMethodCount> kStageColumns{
    Method::kLeafNode, Method::kBreakMat,  Method::kXy,
    Method::kMultiply, Method::kSubtract,  Method::kScalarMul,
    Method::kArrange,  Method::kAdditional};

}  // namespace detail

inline void write_record(std::ostream& os, const BenchRecord& r) {
  os << r.algorithm << ',' << r.n << ',' << r.block_size << ',' << r.b << ','
     << r.cores << ',' << r.run_id << ',' << r.status << ','
     << detail::format_ms(r.wall_ms);
  for (Method m : detail::kStageColumns) {
    os << ',' << detail::format_ms(r.stage(m));
  }
  os << ',' << r.shuffle_bytes << ','
     << detail::format_double(r.residual_inf, 17) << '\n';
}

inline void write_records(std::ostream& os,
                          const std::vector<BenchRecord>& records) {
  os << kSweepHeader << '\n';
  for (const auto& r : records) write_record(os, r);
}

inline std::vector<BenchRecord> read_records(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty sweep CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSweepHeader) throw FormatError("unexpected sweep CSV header");
  std::vector<BenchRecord> out;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 18) throw FormatError("sweep row has wrong field count");
    BenchRecord r;
    r.algorithm = f[0];
    r.n = detail::parse_u64(f[1]);
    r.block_size = detail::parse_u64(f[2]);
    r.b = detail::parse_u64(f[3]);
    r.cores = detail::parse_u64(f[4]);
    r.run_id = f[5];
    r.status = f[6];
    r.wall_ms = detail::parse_double(f[7]);
    for (std::size_t k = 0; k < kMethodCount; ++k) {
      r.stage_ms[static_cast<std::size_t>(detail::kStageColumns[k])] =
          detail::parse_double(f[8 + k]);
    }
    r.shuffle_bytes = detail::parse_u64(f[16]);
    r.residual_inf = detail::parse_double(f[17]);
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Single inversion run

/// ||a * c - I||_inf, computed blockwise through the executor.
inline double residual_inf_norm(const BlockMatrix& a, const BlockMatrix& c,
                                Executor& ex) {
  const BlockMatrix prod = multiply(a, c, ex);
  ex.take_reports();
  const std::size_t bs = a.block_size();
  std::vector<double> row_sum(a.n(), 0.0);
  for (const auto& blk : prod.blocks()) {
    const DenseTile& t = *blk.tile;
    for (std::size_t j = 0; j < bs; ++j) {
      for (std::size_t i = 0; i < bs; ++i) {
        const double expect = (blk.row == blk.col && i == j) ? 1.0 : 0.0;
        row_sum[blk.row * bs + i] += std::abs(t(i, j) - expect);
      }
    }
  }
  return *std::max_element(row_sum.begin(), row_sum.end());
}

struct RunOutcome {
  BenchRecord record;
  BlockMatrix inverse;
  InversionTrace trace;
};

/// Inverts `a`, timing the whole call and every stage. Singular inputs are
/// reported through status "singular" rather than thrown.
inline RunOutcome run_inversion(const BlockMatrix& a, Algorithm alg,
                                Executor& ex, std::string run_id = "0") {
  RunOutcome out;
  BenchRecord& r = out.record;
  r.algorithm = std::string(algorithm_name(alg));
  r.n = a.n();
  r.block_size = a.block_size();
  r.b = a.grid();
  r.cores = ex.cores();
  r.run_id = std::move(run_id);

  const auto t0 = std::chrono::steady_clock::now();
  try {
    InversionResult res =
        alg == Algorithm::kSpin ? spin_invert(a, ex) : lu_invert(a, ex);
    const auto t1 = std::chrono::steady_clock::now();
    r.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    out.inverse = std::move(res.inverse);
    out.trace = std::move(res.trace);
  } catch (const SingularTile&) {
    const auto t1 = std::chrono::steady_clock::now();
    r.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    r.status = "singular";
    r.residual_inf = std::nan("");
    ex.take_reports();
    return out;
  }
  for (const auto& e : out.trace.events) {
    r.stage_ms[static_cast<std::size_t>(e.report.method)] += e.report.wall_ms;
    r.shuffle_bytes += e.report.shuffle_bytes;
  }
  r.residual_inf = residual_inf_norm(a, out.inverse, ex);
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

inline double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

struct SweepConfig {
  std::size_t n = 0;
  std::vector<Algorithm> algorithms{Algorithm::kSpin, Algorithm::kLu};
  std::vector<std::size_t> b_values;
  std::size_t cores = 1;
  std::size_t repeats = 3;
  std::uint64_t seed = 1;
  MatrixKind kind = MatrixKind::kSpd;
};

/// Median row of a set of runs of one (algorithm, b) cell.
inline BenchRecord summarize(const std::vector<BenchRecord>& runs) {
  BenchRecord s = runs.front();
  s.run_id = "median";
  std::vector<double> wall, resid;
  std::array<std::vector<double>, kMethodCount> stages;
  std::vector<double> shuffle;
  std::size_t ok = 0;
  for (const auto& r : runs) {
    if (r.status != "ok") continue;
    ++ok;
    wall.push_back(r.wall_ms);
    resid.push_back(r.residual_inf);
    shuffle.push_back(static_cast<double>(r.shuffle_bytes));
    for (std::size_t k = 0; k < kMethodCount; ++k)
      stages[k].push_back(r.stage_ms[k]);
  }
  s.status = ok == runs.size() ? "summary" : "partial";
  if (ok == 0) {
    s.status = "failed";
    s.wall_ms = std::nan("");
    return s;
  }
  s.wall_ms = median(wall);
  s.residual_inf = median(resid);
  s.shuffle_bytes = static_cast<std::uint64_t>(median(shuffle));
  for (std::size_t k = 0; k < kMethodCount; ++k)
    s.stage_ms[k] = median(stages[k]);
  return s;
}

/// Runs every (algorithm, b, repeat) cell on one generated matrix and
/// appends a median row per cell. Repeats are the outer loop so slow drift
/// of the machine affects all cells alike.
template <class Progress = void (*)(const BenchRecord&)>
std::vector<BenchRecord> sweep(const SweepConfig& cfg,
                               Progress progress = [](const BenchRecord&) {}) {
  if (cfg.repeats == 0) throw InvalidParams("repeats must be >= 1");
  for (std::size_t b : cfg.b_values) {
    if (!is_power_of_two(b) || b > cfg.n) {
      throw InvalidParams("b = " + std::to_string(b) +
                          " does not split n = " + std::to_string(cfg.n) +
                          " into a power-of-two grid");
    }
  }
  const DenseTile dense =
      generate_dense(GenSpec{cfg.n, cfg.n, cfg.seed, cfg.kind});
  std::map<std::size_t, BlockMatrix> inputs;
  for (std::size_t b : cfg.b_values) inputs[b] = partition(dense, cfg.n / b);

  Executor ex(ExecConfig{cfg.cores, true});
  std::vector<BenchRecord> runs;
  for (std::size_t rep = 0; rep < cfg.repeats; ++rep) {
    for (std::size_t b : cfg.b_values) {
      for (Algorithm alg : cfg.algorithms) {
        BenchRecord r;
        try {
          r = run_inversion(inputs.at(b), alg, ex, std::to_string(rep))
                  .record;
        } catch (const Error&) {
          r.algorithm = std::string(algorithm_name(alg));
          r.n = cfg.n;
          r.block_size = cfg.n / b;
          r.b = b;
          r.cores = cfg.cores;
          r.run_id = std::to_string(rep);
          r.status = "error";
          r.wall_ms = std::nan("");
          r.residual_inf = std::nan("");
        }
        progress(r);
        runs.push_back(std::move(r));
      }
    }
  }
  std::vector<BenchRecord> out = runs;
  for (Algorithm alg : cfg.algorithms) {
    for (std::size_t b : cfg.b_values) {
      std::vector<BenchRecord> cell;
      for (const auto& r : runs)
        if (r.algorithm == algorithm_name(alg) && r.b == b) cell.push_back(r);
      out.push_back(summarize(cell));
    }
  }
  return out;
}

/// Median wall time per b for one algorithm, from summary rows when present
/// and recomputed from raw runs otherwise. Sorted by b.
inline std::vector<std::pair<std::size_t, double>> median_by_b(
    const std::vector<BenchRecord>& records, std::string_view algorithm,
    std::size_t n) {
  std::map<std::size_t, double> from_summary;
  std::map<std::size_t, std::vector<double>> raw;
  for (const auto& r : records) {
    if (r.algorithm != algorithm || r.n != n) continue;
    if (r.is_summary()) {
      if (r.status == "summary") from_summary[r.b] = r.wall_ms;
    } else if (r.status == "ok") {
      raw[r.b].push_back(r.wall_ms);
    }
  }
  std::vector<std::pair<std::size_t, double>> out;
  if (!from_summary.empty()) {
    for (const auto& [b, v] : from_summary) out.emplace_back(b, v);
  } else {
    for (const auto& [b, v] : raw) out.emplace_back(b, median(v));
  }
  return out;
}

/// Median of one per-stage column per b.
inline std::vector<std::pair<std::size_t, double>> stage_median_by_b(
    const std::vector<BenchRecord>& records, std::string_view algorithm,
    std::size_t n, Method m) {
  std::map<std::size_t, std::vector<double>> raw;
  for (const auto& r : records) {
    if (r.algorithm != algorithm || r.n != n || r.is_summary() ||
        r.status != "ok")
      continue;
    raw[r.b].push_back(r.stage(m));
  }
  std::vector<std::pair<std::size_t, double>> out;
  for (const auto& [b, v] : raw) out.emplace_back(b, median(v));
  return out;
}

// ---------------------------------------------------------------------------
// Model comparison

struct CompareRow {
  std::size_t b = 0;
  double measured_ms = 0.0;
  double predicted_cost = 0.0;
  double calibrated_ms = 0.0;
  double ratio = 0.0;
};

struct CompareReport {
  std::vector<CompareRow> rows;
  double ms_per_unit = 0.0;
  std::size_t measured_argmin_b = 0;
  std::size_t predicted_argmin_b = 0;
  bool argmin_within_one_step = false;
  double sign_agreement = 0.0;  // fraction of adjacent b pairs
};

inline constexpr std::string_view kCompareHeader =
    "b,measured_ms,predicted_cost,calibrated_ms,ratio";

/// Argmin agreement and slope-sign agreement between two series over the
/// same ascending b grid.
inline void fill_shape_agreement(CompareReport& rep,
                                 const std::vector<double>& measured,
                                 const std::vector<double>& predicted) {
  const std::size_t im = argmin_index(measured);
  const std::size_t ip = argmin_index(predicted);
  rep.measured_argmin_b = rep.rows[im].b;
  rep.predicted_argmin_b = rep.rows[ip].b;
  rep.argmin_within_one_step = (im > ip ? im - ip : ip - im) <= 1;
  std::size_t agree = 0;
  for (std::size_t k = 0; k + 1 < measured.size(); ++k) {
    const double dm = measured[k + 1] - measured[k];
    const double dp = predicted[k + 1] - predicted[k];
    if ((dm > 0) == (dp > 0)) ++agree;
  }
  rep.sign_agreement = measured.size() > 1
                           ? static_cast<double>(agree) /
                                 static_cast<double>(measured.size() - 1)
                           : 1.0;
}

/// Joins measured medians with level-sum predictions and calibrates the
/// model's single unit constant by least squares.
inline CompareReport compare_model(const std::vector<BenchRecord>& records,
                                   std::size_t n, std::size_t cores,
                                   Algorithm alg = Algorithm::kSpin) {
  const auto med = median_by_b(records, algorithm_name(alg), n);
  if (med.size() < 3) {
    throw InsufficientData("need at least 3 b values for n = " +
                           std::to_string(n) + ", got " +
                           std::to_string(med.size()));
  }
  CompareReport rep;
  std::vector<double> measured, predicted;
  for (const auto& [b, ms] : med) {
    const double cost =
        cost_levelsum(alg, CostParams::make(n, b, cores)).total();
    measured.push_back(ms);
    predicted.push_back(cost);
    rep.rows.push_back({b, ms, cost, 0.0, 0.0});
  }
  rep.ms_per_unit = fit_calibration(measured, predicted);
  for (auto& row : rep.rows) {
    row.calibrated_ms = rep.ms_per_unit * row.predicted_cost;
    row.ratio = row.measured_ms / row.calibrated_ms;
  }
  fill_shape_agreement(rep, measured, predicted);
  return rep;
}

inline void write_compare(std::ostream& os, const CompareReport& rep) {
  os << kCompareHeader << '\n';
  for (const auto& r : rep.rows) {
    os << r.b << ',' << detail::format_ms(r.measured_ms) << ','
       << detail::format_double(r.predicted_cost, 17) << ','
       << detail::format_ms(r.calibrated_ms) << ','
       << detail::format_double(r.ratio, 6) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Scalability

struct ScaleRow {
  std::size_t cores = 0;
  double wall_ms = 0.0;
  double ideal_ms = 0.0;
  double efficiency = 0.0;
};

inline constexpr std::string_view kScaleHeader =
    "cores,wall_ms,ideal_ms,efficiency";

/// Median wall time per core count and its efficiency against the ideal
/// line wall(min cores) * min cores / cores.
inline std::vector<ScaleRow> scalability(const BlockMatrix& a, Algorithm alg,
                                         std::vector<std::size_t> cores_list,
                                         std::size_t repeats = 3) {
  if (cores_list.empty()) throw InvalidParams("empty cores list");
  std::sort(cores_list.begin(), cores_list.end());
  std::vector<ScaleRow> rows;
  for (std::size_t c : cores_list) {
    Executor ex(ExecConfig{c, true});
    std::vector<double> walls;
    for (std::size_t r = 0; r < repeats; ++r) {
      auto out = run_inversion(a, alg, ex, std::to_string(r));
      if (out.record.status != "ok") {
        throw SingularTile("inversion failed during scalability run");
      }
      walls.push_back(out.record.wall_ms);
    }
    rows.push_back({c, median(walls), 0.0, 0.0});
  }
  const double base = rows.front().wall_ms * static_cast<double>(rows.front().cores);
  for (auto& r : rows) {
    r.ideal_ms = base / static_cast<double>(r.cores);
    r.efficiency = r.ideal_ms / r.wall_ms;
  }
  return rows;
}

inline void write_scale(std::ostream& os, const std::vector<ScaleRow>& rows) {
  os << kScaleHeader << '\n';
  for (const auto& r : rows) {
    os << r.cores << ',' << detail::format_ms(r.wall_ms) << ','
       << detail::format_ms(r.ideal_ms) << ','
       << detail::format_double(r.efficiency, 6) << '\n';
  }
}

/// CostBreakdown as CSV rows method,term,value.
inline void write_cost_breakdown(std::ostream& os, Algorithm alg,
                                 const CostBreakdown& c) {
  os << "method,term,value\n";
  for (std::size_t k = 0; k < kCostTermCount; ++k) {
    os << algorithm_name(alg) << ',' << kCostTermNames[k] << ','
       << detail::format_double(c.terms[k], 17) << '\n';
  }
  os << algorithm_name(alg) << ",total,"
     << detail::format_double(c.total(), 17) << '\n';
}

}  // namespace spin

#endif  // SPIN__BENCH_HPP_
