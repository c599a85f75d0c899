#pragma once

#include <pthread.h>
#include <sched.h>

#include <atomic>
#include <cstdlib>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <thread>
#include <type_traits>
#include <vector>

#ifndef SYNCH_MAX_THREADS
#define SYNCH_MAX_THREADS 512
#endif

namespace synch {

inline constexpr int kMaxThreads = SYNCH_MAX_THREADS;

enum class PinPolicy { kNone, kCompact, kScatter };

constexpr std::string_view to_string(PinPolicy p) noexcept {
  switch (p) {
    case PinPolicy::kNone: return "none";
    case PinPolicy::kCompact: return "compact";
    case PinPolicy::kScatter: return "scatter";
  }
  return "none";
}

constexpr std::optional<PinPolicy> parse_pin_policy(std::string_view s) noexcept {
  if (s == "none") return PinPolicy::kNone;
  if (s == "compact") return PinPolicy::kCompact;
  if (s == "scatter") return PinPolicy::kScatter;
  return std::nullopt;
}

/// SYNCHRO_PIN, when set to a valid policy name, overrides the configured one.
inline PinPolicy effective_pin_policy(PinPolicy configured) {
  if (const char* env = std::getenv("SYNCHRO_PIN")) {
    if (auto p = parse_pin_policy(env)) return *p;
  }
  return configured;
}

struct ThreadTeamConfig {
  int n_threads = 1;
  PinPolicy pin = PinPolicy::kNone;
  int group_size = 0;  // 0 means one group holding every thread

  int effective_group_size() const noexcept { return group_size > 0 ? group_size : n_threads; }
  int group_of(int tid) const noexcept { return tid / effective_group_size(); }
  int n_groups() const noexcept { return (n_threads + effective_group_size() - 1) / effective_group_size(); }

  void validate() const {
    if (n_threads < 1 || n_threads > kMaxThreads) {
      throw std::out_of_range("n_threads must be in [1, " + std::to_string(kMaxThreads) + "]");
    }
    if (group_size < 0) throw std::out_of_range("group_size must be positive");
  }
};

/// CPU for thread `tid`, or -1 when no pinning applies.
/// compact: CPUs in id order. scatter: round-robin over CPU groups of
/// `group_size`, filling one slot of every group before the next slot.
inline int cpu_for(PinPolicy policy, int tid, int group_size, int n_cpus) noexcept {
  if (n_cpus <= 0) return -1;
  switch (policy) {
    case PinPolicy::kNone: return -1;
    case PinPolicy::kCompact: return tid % n_cpus;
    case PinPolicy::kScatter: {
      const int g = group_size > 0 ? std::min(group_size, n_cpus) : n_cpus;
      const int n_groups = (n_cpus + g - 1) / g;
      const int group = tid % n_groups;
      const int slot = (tid / n_groups) % g;
      return (group * g + slot) % n_cpus;
    }
  }
  return -1;
}

class TeamError : public std::runtime_error {
 public:
  TeamError(int index, const std::string& what)
      : std::runtime_error("thread " + std::to_string(index) + ": " + what), index_(index) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

namespace detail {

inline void pin_current_thread(int cpu) noexcept {
  if (cpu < 0) return;
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(cpu, &set);
  // Failure (restricted cpuset, container limits) is ignored on purpose.
  (void)pthread_setaffinity_np(pthread_self(), sizeof(set), &set);
}

}  // namespace detail

/// Runs `body(tid)` on n_threads threads and returns results in id order.
/// Threads are released together once all of them exist; if any creation
/// fails none of the bodies run and TeamError names the failing index.
/// An exception escaping a body is rethrown after every thread is joined.
template <class F>
auto spawn_team(const ThreadTeamConfig& config, F&& body) {
  using R = std::invoke_result_t<F&, int>;
  config.validate();
  const int n = config.n_threads;
  const PinPolicy policy = effective_pin_policy(config.pin);
  const int n_cpus = static_cast<int>(std::thread::hardware_concurrency());

  constexpr bool kVoid = std::is_void_v<R>;
  using Slot = std::conditional_t<kVoid, char, std::optional<R>>;
  std::vector<Slot> results(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<int> gate{0};  // 0 wait, 1 go, 2 abort
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(n));

  auto run = [&](int tid) {
    while (gate.load() == 0) std::this_thread::yield();
    if (gate.load() != 1) return;
    detail::pin_current_thread(cpu_for(policy, tid, config.effective_group_size(), n_cpus));
    try {
      if constexpr (kVoid) {
        body(tid);
      } else {
        results[static_cast<std::size_t>(tid)].emplace(body(tid));
      }
    } catch (...) {
      errors[static_cast<std::size_t>(tid)] = std::current_exception();
    }
  };

  for (int i = 0; i < n; ++i) {
    try {
      threads.emplace_back(run, i);
    } catch (const std::system_error& e) {
      gate.store(2);
      for (auto& t : threads) t.join();
      throw TeamError(i, std::string("thread creation failed: ") + e.what());
    }
  }
  gate.store(1);
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  if constexpr (!kVoid) {
    std::vector<R> out;
    out.reserve(results.size());
    for (auto& r : results) out.push_back(std::move(*r));
    return out;
  }
}

}  // namespace synch
