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

#ifndef SPIN__TRACE_HPP_
#define SPIN__TRACE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "spin/executor.hpp"

namespace spin {

struct StageEvent {
  std::size_t level = 0;
  std::size_t node = 0;
  std::string step;  // "I".."VII", "C11".."C22", "breakMat", "xy11", ...
  StageReport report;
};

struct NodeInfo {
  std::size_t level = 0;
  bool internal = false;
};

/// Stage-by-stage record of one inversion run.
struct InversionTrace {
  std::size_t depth = 0;  // recursion levels m = log2(b)
  std::vector<NodeInfo> nodes;
  std::vector<StageEvent> events;
  std::size_t leaf_nodes = 0;
  std::size_t leaf_kernel_ops = 0;  // cubic tile operations at leaf nodes

  std::size_t stage_count(Method m) const {
    std::size_t c = 0;
    for (const auto& e : events)
      if (e.report.method == m) ++c;
    return c;
  }

  double method_ms(Method m) const {
    double s = 0.0;
    for (const auto& e : events)
      if (e.report.method == m) s += e.report.wall_ms;
    return s;
  }

  std::uint64_t shuffle_bytes() const {
    std::uint64_t s = 0;
    for (const auto& e : events) s += e.report.shuffle_bytes;
    return s;
  }

  /// Number of `m` stages issued by each node, keyed by node id.
  std::map<std::size_t, std::size_t> per_node(Method m) const {
    std::map<std::size_t, std::size_t> out;
    for (std::size_t id = 0; id < nodes.size(); ++id) out[id] = 0;
    for (const auto& e : events)
      if (e.report.method == m) ++out[e.node];
    return out;
  }

  std::size_t internal_nodes() const {
    std::size_t c = 0;
    for (const auto& n : nodes) c += n.internal ? 1 : 0;
    return c;
  }

  /// Node count per recursion level (internal and leaf).
  std::vector<std::size_t> nodes_per_level() const {
    std::vector<std::size_t> out;
    for (const auto& n : nodes) {
      if (out.size() <= n.level) out.resize(n.level + 1, 0);
      ++out[n.level];
    }
    return out;
  }
};

namespace detail {

/// Moves executor reports into a trace, labelled with the current step.
class TraceRecorder {
 public:
  TraceRecorder(Executor& ex, InversionTrace& trace) : ex_(ex), trace_(trace) {}

  std::size_t open_node(std::size_t level, bool internal) {
    trace_.nodes.push_back({level, internal});
    if (!internal) ++trace_.leaf_nodes;
    if (internal && level + 1 > trace_.depth) trace_.depth = level + 1;
    return trace_.nodes.size() - 1;
  }

  void collect(std::size_t level, std::size_t node, std::string step) {
    for (auto& r : ex_.take_reports()) {
      trace_.events.push_back({level, node, step, r});
    }
  }

  Executor& executor() noexcept { return ex_; }
  InversionTrace& trace() noexcept { return trace_; }

 private:
  Executor& ex_;
  InversionTrace& trace_;
};

}  // namespace detail
}  // namespace spin

#endif  // SPIN__TRACE_HPP_
