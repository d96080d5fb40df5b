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

#ifndef SPIN__EXECUTOR_HPP_
#define SPIN__EXECUTOR_HPP_

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <type_traits>
#include <vector>

#include "spin/error.hpp"

namespace spin {

/// Stage labels; one per distributed method of the inversion algorithms.
enum class Method {
  kLeafNode,
  kBreakMat,
  kXy,
  kMultiply,
  kSubtract,
  kScalarMul,
  kArrange,
  kAdditional,  // LU's final half-size multiplies
};

inline constexpr std::size_t kMethodCount = 8;

inline constexpr std::string_view method_name(Method m) noexcept {
  switch (m) {
    case Method::kLeafNode: return "leafNode";
    case Method::kBreakMat: return "breakMat";
    case Method::kXy: return "xy";
    case Method::kMultiply: return "multiply";
    case Method::kSubtract: return "subtract";
    case Method::kScalarMul: return "scalarMul";
    case Method::kArrange: return "arrange";
    case Method::kAdditional: return "additional";
  }
  return "unknown";
}

struct ExecConfig {
  std::size_t cores = 1;
  bool instrumentation = true;

  /// Applies the SPIN_CORES environment override, if set and valid.
  static ExecConfig with_env_override(ExecConfig base) {
    if (const char* env = std::getenv("SPIN_CORES")) {
      char* end = nullptr;
      const long long v = std::strtoll(env, &end, 10);
      if (end != env && *end == '\0' && v >= 1) {
        base.cores = static_cast<std::size_t>(v);
      } else {
        throw InvalidParams("SPIN_CORES must be a positive integer, got '" +
                            std::string(env) + "'");
      }
    }
    return base;
  }
};

struct StageReport {
  Method method = Method::kLeafNode;
  std::size_t tasks = 0;
  std::size_t concurrency = 0;       // min(tasks, cores)
  std::size_t peak_concurrency = 0;  // observed
  double wall_ms = 0.0;
  std::uint64_t shuffle_bytes = 0;
};

/// Fixed pool of `cores` workers running one stage at a time.
///
/// A stage is a set of independent tasks indexed 0..n-1; results are returned
/// in index order regardless of completion order. At most min(n, cores) tasks
/// run concurrently. The calling thread takes part in every stage, so the pool
/// owns cores - 1 threads.
class Executor {
 public:
  explicit Executor(ExecConfig config) : config_(config) {
    if (config_.cores == 0) throw InvalidParams("cores must be >= 1");
    workers_.reserve(config_.cores - 1);
    for (std::size_t i = 0; i + 1 < config_.cores; ++i) {
      workers_.emplace_back([this] { worker_loop(); });
    }
  }

  Executor(const Executor&) = delete;
  Executor& operator=(const Executor&) = delete;

  ~Executor() {
    {
      std::lock_guard lock(mutex_);
      stop_ = true;
    }
    work_cv_.notify_all();
    for (auto& t : workers_) t.join();
  }

  const ExecConfig& config() const noexcept { return config_; }
  std::size_t cores() const noexcept { return config_.cores; }

  /// Runs body(i) for i in [0, n_tasks) and returns the results in order.
  ///
  /// The first exception thrown by any task is rethrown after every task
  /// already started has finished; tasks not yet started are skipped.
  template <class Body>
  auto run_stage(Method method, std::size_t n_tasks, Body&& body,
                 std::uint64_t shuffle_bytes = 0)
      -> std::vector<std::invoke_result_t<Body&, std::size_t>> {
    using R = std::invoke_result_t<Body&, std::size_t>;
    std::vector<std::optional<R>> slots(n_tasks);
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t peak = dispatch(n_tasks, [&](std::size_t i) {
      slots[i].emplace(body(i));
    });
    const auto t1 = std::chrono::steady_clock::now();

    if (config_.instrumentation) {
      StageReport r;
      r.method = method;
      r.tasks = n_tasks;
      r.concurrency = std::min(n_tasks, config_.cores);
      r.peak_concurrency = peak;
      r.wall_ms =
          std::chrono::duration<double, std::milli>(t1 - t0).count();
      r.shuffle_bytes = shuffle_bytes;
      reports_.push_back(r);
    }
    std::vector<R> out;
    out.reserve(n_tasks);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
  }

  /// Removes and returns every report recorded since the last call.
  std::vector<StageReport> take_reports() {
    std::vector<StageReport> out;
    out.swap(reports_);
    return out;
  }

 private:
  struct Job {
    const std::function<void(std::size_t)>* fn = nullptr;
    std::size_t count = 0;
    std::size_t worker_slots = 0;  // guarded by mutex_
    std::size_t active = 0;        // guarded by mutex_
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> in_flight{0};
    std::atomic<std::size_t> peak{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;  // first error, guarded by error_mutex
    std::mutex error_mutex;
  };

  static void drain(Job& job) {
    for (;;) {
      const std::size_t i = job.next.fetch_add(1, std::memory_order_relaxed);
      if (i >= job.count) return;
      if (job.failed.load(std::memory_order_relaxed)) continue;
      const std::size_t now =
          job.in_flight.fetch_add(1, std::memory_order_relaxed) + 1;
      std::size_t prev = job.peak.load(std::memory_order_relaxed);
      while (now > prev &&
             !job.peak.compare_exchange_weak(prev, now,
                                             std::memory_order_relaxed)) {
      }
      try {
        (*job.fn)(i);
      } catch (...) {
        std::lock_guard lock(job.error_mutex);
        if (!job.error) job.error = std::current_exception();
        job.failed.store(true, std::memory_order_relaxed);
      }
      job.in_flight.fetch_sub(1, std::memory_order_relaxed);
    }
  }

  std::size_t dispatch(std::size_t n_tasks,
                       const std::function<void(std::size_t)>& fn) {
    if (n_tasks == 0) return 0;
    Job job;
    job.fn = &fn;
    job.count = n_tasks;
    const std::size_t helpers = std::min(n_tasks, config_.cores) - 1;
    if (helpers > 0) {
      {
        std::lock_guard lock(mutex_);
        job.worker_slots = helpers;
        job_ = &job;
        ++generation_;
      }
      work_cv_.notify_all();
    }
    drain(job);
    if (helpers > 0) {
      std::unique_lock lock(mutex_);
      // Close the job to late arrivals, then wait for the joined workers.
      job.worker_slots = 0;
      done_cv_.wait(lock, [&] { return job.active == 0; });
      job_ = nullptr;
    }
    if (job.error) std::rethrow_exception(job.error);
    return job.peak.load();
  }

  void worker_loop() {
    std::uint64_t seen = 0;
    std::unique_lock lock(mutex_);
    for (;;) {
      work_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      Job* job = job_;
      if (job == nullptr || job->worker_slots == 0) continue;
      --job->worker_slots;
      ++job->active;
      lock.unlock();
      drain(*job);
      lock.lock();
      if (--job->active == 0) done_cv_.notify_all();
    }
  }

  ExecConfig config_;
  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable work_cv_;
  std::condition_variable done_cv_;
  Job* job_ = nullptr;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
  std::vector<StageReport> reports_;
};

}  // namespace spin

#endif  // SPIN__EXECUTOR_HPP_
