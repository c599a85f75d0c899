#pragma once

// Small programs (3 threads, up to 2 container operations each) run against a
// concurrent container and checked with the exhaustive linearizability checker.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "linearizability.hpp"
#include "synch/runtime.hpp"

namespace synch::testing {

using Program = std::vector<std::vector<ContainerOp>>;  // per thread

/// Every program with `threads` threads of 0..max_ops operations each.
inline std::vector<Program> all_programs(int threads = 3, int max_ops = 2) {
  std::vector<std::vector<ContainerOp>> per_thread{{}};
  for (int len = 1; len <= max_ops; ++len) {
    for (int mask = 0; mask < (1 << len); ++mask) {
      std::vector<ContainerOp> ops;
      for (int i = 0; i < len; ++i) ops.push_back((mask >> i) & 1 ? ContainerOp::kRemove : ContainerOp::kInsert);
      per_thread.push_back(ops);
    }
  }
  std::vector<Program> out{Program{}};
  for (int t = 0; t < threads; ++t) {
    std::vector<Program> next;
    for (const auto& p : out) {
      for (const auto& ops : per_thread) {
        Program q = p;
        q.push_back(ops);
        next.push_back(q);
      }
    }
    out = std::move(next);
  }
  return out;
}

/// Uniform view of a container under test.
struct ContainerHandle {
  std::function<void(std::uint64_t, int)> insert;
  std::function<std::optional<std::uint64_t>(int)> remove;
};

using ContainerFactory = std::function<std::pair<std::shared_ptr<void>, ContainerHandle>(int n_threads)>;

inline std::uint64_t value_for(int thread, std::size_t index) { return 100 * static_cast<std::uint64_t>(thread) + index + 1; }

/// Runs every interleaving of `program` one operation at a time (each
/// operation issued under its own thread id) and checks each history.
/// Returns the number of interleavings whose history failed the check.
template <class Model>
int check_all_interleavings(const ContainerFactory& factory, const Program& program) {
  const int n = static_cast<int>(program.size());
  std::vector<std::size_t> next(program.size(), 0);
  std::vector<int> order;
  int failures = 0;

  std::function<void()> recurse = [&] {
    bool any = false;
    for (int t = 0; t < n; ++t) {
      if (next[t] == program[t].size()) continue;
      any = true;
      order.push_back(t);
      ++next[t];
      recurse();
      --next[t];
      order.pop_back();
    }
    if (any) return;
    auto [owner, c] = factory(n);
    std::vector<std::size_t> done(program.size(), 0);
    std::vector<HistoryOp> history;
    std::uint64_t clock = 0;
    for (int t : order) {
      const ContainerOp op = program[t][done[t]];
      HistoryOp h{t, ++clock, 0, op, 0, std::nullopt};
      if (op == ContainerOp::kInsert) {
        h.arg = value_for(t, done[t]);
        c.insert(h.arg, t);
      } else {
        h.result = c.remove(t);
      }
      h.response = ++clock;
      history.push_back(h);
      ++done[t];
    }
    failures += !is_linearizable<Model>(history);
  };
  recurse();
  return failures;
}

/// Runs `program` on real threads `reps` times; returns failing repetitions.
template <class Model>
int check_concurrent(const ContainerFactory& factory, const Program& program, int reps) {
  const int n = static_cast<int>(program.size());
  int failures = 0;
  for (int r = 0; r < reps; ++r) {
    auto [owner, c] = factory(n);
    LogicalClock clock;
    Barrier start(n);
    auto histories = spawn_team(ThreadTeamConfig{n}, [&](int t) {
      std::vector<HistoryOp> mine;
      start.wait();
      for (std::size_t i = 0; i < program[t].size(); ++i) {
        HistoryOp h{t, clock.tick(), 0, program[t][i], 0, std::nullopt};
        if (h.op == ContainerOp::kInsert) {
          h.arg = value_for(t, i);
          c.insert(h.arg, t);
        } else {
          h.result = c.remove(t);
        }
        h.response = clock.tick();
        mine.push_back(h);
      }
      return mine;
    });
    std::vector<HistoryOp> all;
    for (auto& h : histories) all.insert(all.end(), h.begin(), h.end());
    failures += !is_linearizable<Model>(all);
  }
  return failures;
}

}  // namespace synch::testing
