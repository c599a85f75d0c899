#pragma once

// Exhaustive linearizability check for small histories (Wing & Gong style
// search). Fine for up to ~10 operations.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

namespace synch::testing {

enum class ContainerOp { kInsert, kRemove };

struct HistoryOp {
  int thread = 0;
  std::uint64_t invoke = 0;    // logical timestamps from one shared clock
  std::uint64_t response = 0;
  ContainerOp op = ContainerOp::kInsert;
  std::uint64_t arg = 0;
  std::optional<std::uint64_t> result;  // removals only; nullopt = empty
};

struct StackModel {
  std::vector<std::uint64_t> items;
  std::optional<std::uint64_t> apply(ContainerOp op, std::uint64_t arg) {
    if (op == ContainerOp::kInsert) {
      items.push_back(arg);
      return std::nullopt;
    }
    if (items.empty()) return std::nullopt;
    const std::uint64_t v = items.back();
    items.pop_back();
    return v;
  }
};

struct QueueModel {
  std::deque<std::uint64_t> items;
  std::optional<std::uint64_t> apply(ContainerOp op, std::uint64_t arg) {
    if (op == ContainerOp::kInsert) {
      items.push_back(arg);
      return std::nullopt;
    }
    if (items.empty()) return std::nullopt;
    const std::uint64_t v = items.front();
    items.pop_front();
    return v;
  }
};

namespace detail {

template <class Model>
bool search(const std::vector<HistoryOp>& h, std::vector<char>& done, std::size_t remaining, const Model& model) {
  if (remaining == 0) return true;
  // An operation may go next only if no pending operation responded before
  // it was invoked.
  std::uint64_t horizon = UINT64_MAX;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!done[i]) horizon = std::min(horizon, h[i].response);
  }
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (done[i] || h[i].invoke > horizon) continue;
    Model next = model;
    const auto out = next.apply(h[i].op, h[i].arg);
    if (h[i].op == ContainerOp::kRemove && out != h[i].result) continue;
    done[i] = 1;
    if (search(h, done, remaining - 1, next)) return true;
    done[i] = 0;
  }
  return false;
}

}  // namespace detail

template <class Model>
bool is_linearizable(const std::vector<HistoryOp>& history, Model initial = {}) {
  std::vector<char> done(history.size(), 0);
  return detail::search(history, done, history.size(), initial);
}

/// Shared logical clock for recording histories.
class LogicalClock {
 public:
  std::uint64_t tick() noexcept { return now_.fetch_add(1) + 1; }

 private:
  std::atomic<std::uint64_t> now_{0};
};

}  // namespace synch::testing
