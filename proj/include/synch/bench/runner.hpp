#pragma once

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "synch/bench/config.hpp"
#include "synch/bench/report.hpp"
#include "synch/bench/targets.hpp"
#include "synch/bench/workload.hpp"
#include "synch/runtime.hpp"

namespace synch::bench {

namespace detail {

/// Shared by the caller and the thread that runs the team, so the caller can
/// give up on a hung run and leave the team behind.
struct Execution {
  explicit Execution(const BenchConfig& c)
      : config(c),
        target(make_target(c)),
        progress(static_cast<std::size_t>(c.n_threads)),
        finished_at(static_cast<std::size_t>(c.n_threads)) {}

  BenchConfig config;
  std::unique_ptr<Target> target;
  std::vector<Padded<AtomicWord>> progress;  // completed runs per thread
  std::vector<Padded<AtomicWord>> finished_at;
  AtomicWord started_at;

  std::mutex mutex;
  std::condition_variable cv;
  bool done = false;
  std::exception_ptr error;

  Tally tally() const {
    Tally t;
    for (const auto& p : progress) t.runs.push_back(p.value.load());
    return t;
  }

  void run_range(int tid, WorkloadStream& stream, std::uint64_t begin, std::uint64_t end) {
    AtomicWord& mine = progress[static_cast<std::size_t>(tid)].value;
    for (std::uint64_t seq = begin; seq < end; ++seq) {
      const GeneratedOp op = stream.next();
      target->run(tid, seq, op);
      // Relaxed: read only by the watchdog for partial results and after join.
      mine.store_relaxed(seq + 1);
      busy_work(op.work);
    }
  }

  /// Starts `body` on a team in a helper thread; `finish` runs afterwards.
  template <class Body>
  static std::thread launch(const std::shared_ptr<Execution>& self, Body body) {
    return std::thread([self, body]() mutable {
      try {
        ThreadTeamConfig team{self->config.n_threads, self->config.pin, self->config.group_size};
        spawn_team(team, [&](int tid) { body(*self, tid); });
      } catch (...) {
        self->error = std::current_exception();
      }
      std::lock_guard lock(self->mutex);
      self->done = true;
      self->cv.notify_all();
    });
  }

  bool wait_done(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex);
    return cv.wait_for(lock, timeout, [&] { return done; });
  }
};

inline void finish_report(BenchReport& report, const Execution& ex, std::uint64_t wall_ns) {
  report.wall_time_ns = wall_ns;
  report.total_ops = ex.tally().total() * ex.target->ops_per_run();
  report.finish_rates();
}

/// Stalls the victim the first time it reaches the target point, until released.
class StallHook final : public YieldHook {
 public:
  StallHook(int victim, YieldPoint point) : victim_(victim), point_(point) {}

  void on_yield(YieldPoint point, int tid, const void*, std::uint64_t) override {
    if (tid != victim_ || point != point_ || armed_.exchange(false) == false) return;
    stalled_.store(true);
    while (!released_.load()) std::this_thread::sleep_for(std::chrono::microseconds(200));
  }

  bool stalled() const noexcept { return stalled_.load(); }
  void release() noexcept { released_.store(true); }

 private:
  int victim_;
  YieldPoint point_;
  std::atomic<bool> armed_{true};
  std::atomic<bool> stalled_{false};
  std::atomic<bool> released_{false};
};

}  // namespace detail

/// Runs the configured workload (throughput or correctness mode). If the
/// team does not finish within the watchdog, the report is marked failed and
/// carries the operations completed so far; the team is left running.
inline BenchReport run_benchmark(const BenchConfig& config) {
  config.validate();
  if (config.mode == Mode::kStallInjection) {
    throw std::invalid_argument("run_benchmark: use run_stall_injection for stall-injection mode");
  }
  auto ex = std::make_shared<detail::Execution>(config);
  auto start = std::make_shared<Barrier>(config.n_threads);

  std::thread runner = detail::Execution::launch(ex, [start](detail::Execution& e, int tid) {
    WorkloadStream stream(e.config, tid);
    start->wait();
    if (tid == 0) e.started_at.store(now());
    e.run_range(tid, stream, 0, e.config.runs);
    e.finished_at[static_cast<std::size_t>(tid)].value.store(now());
  });

  BenchReport report;
  report.config = config;
  report.seed = config.seed;
  if (!ex->wait_done(std::chrono::milliseconds(config.watchdog_ms))) {
    runner.detach();
    report.watchdog_fired = true;
    const std::uint64_t t0 = ex->started_at.load();
    detail::finish_report(report, *ex, t0 != 0 ? now() - t0 : 0);
    report.add_check("watchdog", false, "run did not finish within " + std::to_string(config.watchdog_ms) + " ms");
    return report;
  }
  runner.join();
  if (ex->error) std::rethrow_exception(ex->error);

  std::uint64_t end = 0;
  for (const auto& f : ex->finished_at) end = std::max(end, f.value.load());
  detail::finish_report(report, *ex, end - ex->started_at.load());
  ex->target->check(report, ex->tally());
  return report;
}

/// Stalls `victim` at the first time it reaches `point` and reports whether
/// the other threads still finish their runs within the watchdog.
///
/// The victim first runs alone, so points on its uncontended path are hit
/// before anyone else starts. If it finishes without reaching the point, the
/// others start and the victim runs a second batch alongside them. Verdict:
/// "completed" (others finished while the victim was stalled), "blocked"
/// (watchdog fired) or "not-reached". The victim is released afterwards and,
/// unless everything is still stuck, the run is joined and fully checked.
inline BenchReport run_stall_injection(const BenchConfig& config, int victim, YieldPoint point) {
  if constexpr (!kInstrumented) {
    throw std::logic_error("stall injection needs a build with SYNCH_INSTRUMENT");
  }
  BenchConfig c = config;
  c.mode = Mode::kStallInjection;
  c.victim = victim;
  c.yield_point = point;
  c.validate();

  auto ex = std::make_shared<detail::Execution>(c);
  auto hook = std::make_shared<detail::StallHook>(victim, point);
  auto go = std::make_shared<std::atomic<bool>>(false);
  auto live_done = std::make_shared<std::atomic<int>>(0);
  auto live_end = std::make_shared<std::atomic<std::uint64_t>>(0);

  ScopedYieldHook installed(*hook);
  std::thread runner = detail::Execution::launch(ex, [=](detail::Execution& e, int tid) {
    WorkloadStream stream(e.config, tid);
    const std::uint64_t runs = e.config.runs;
    if (tid == victim) {
      e.run_range(tid, stream, 0, runs);
      if (!hook->stalled()) {
        go->store(true);
        e.run_range(tid, stream, runs, 2 * runs);
      }
      return;
    }
    while (!go->load() && !hook->stalled()) std::this_thread::sleep_for(std::chrono::microseconds(100));
    if (tid == (victim == 0 ? 1 : 0)) e.started_at.store(now());
    e.run_range(tid, stream, 0, runs);
    const std::uint64_t t = now();
    std::uint64_t seen = live_end->load();
    while (seen < t && !live_end->compare_exchange_weak(seen, t)) {
    }
    live_done->fetch_add(1);
  });

  BenchReport report;
  report.config = c;
  report.seed = c.seed;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(c.watchdog_ms);
  const int n_live = c.n_threads - 1;
  while (live_done->load() < n_live && std::chrono::steady_clock::now() < deadline) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  const bool live_finished = live_done->load() == n_live;
  const bool stalled = hook->stalled();
  report.watchdog_fired = !live_finished;
  report.stall_verdict = !live_finished ? "blocked" : stalled ? "completed" : "not-reached";
  const std::uint64_t t0 = ex->started_at.load();
  report.wall_time_ns = t0 == 0 ? 0 : (live_finished ? live_end->load() : now()) - t0;

  if (live_finished && stalled) {
    if (const auto counter = ex->target->live_counter()) {
      // The victim's stalled operation counts once it has flipped its
      // announcement, i.e. at every point after "announce".
      const Tally t = ex->tally();
      const std::uint64_t expected = t.total() + (point == YieldPoint::kAnnounce ? 0 : 1);
      report.add_check("victim_helped", *counter == expected,
                       "counter " + std::to_string(*counter) + " while stalled, expected " + std::to_string(expected));
    }
  }

  hook->release();
  if (!ex->wait_done(std::chrono::milliseconds(c.watchdog_ms))) {
    runner.detach();
    report.total_ops = ex->tally().total() * ex->target->ops_per_run();
    report.finish_rates();
    report.add_check("join_after_release", false, "threads still running after the victim was released");
    return report;
  }
  runner.join();
  if (ex->error) std::rethrow_exception(ex->error);
  report.total_ops = ex->tally().total() * ex->target->ops_per_run();
  report.finish_rates();
  ex->target->check(report, ex->tally());
  return report;
}

/// Dispatches on the configured mode.
inline BenchReport run(const BenchConfig& config) {
  if (config.mode == Mode::kStallInjection) {
    config.validate();
    return run_stall_injection(config, config.victim, *config.yield_point);
  }
  return run_benchmark(config);
}

}  // namespace synch::bench
