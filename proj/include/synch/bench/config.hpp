#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "synch/runtime/instrument.hpp"
#include "synch/runtime/thread_team.hpp"

namespace synch::bench {

enum class Structure {
  kCcSynch, kDsmSynch, kHSynch, kPSim, kOyama,
  kCcQueue, kDsmQueue, kHQueue, kSimQueue, kClhQueue, kMsQueue,
  kCcStack, kDsmStack, kHStack, kSimStack, kClhStack, kLfStack,
  kClhLock, kMcsLock,
  kClhHash, kDsmHash,
};

inline constexpr std::array<std::pair<Structure, std::string_view>, 21> kStructureNames{{
    {Structure::kCcSynch, "cc-synch"},   {Structure::kDsmSynch, "dsm-synch"}, {Structure::kHSynch, "h-synch"},
    {Structure::kPSim, "psim"},          {Structure::kOyama, "oyama"},        {Structure::kCcQueue, "cc-queue"},
    {Structure::kDsmQueue, "dsm-queue"}, {Structure::kHQueue, "h-queue"},     {Structure::kSimQueue, "sim-queue"},
    {Structure::kClhQueue, "clh-queue"}, {Structure::kMsQueue, "ms-queue"},   {Structure::kCcStack, "cc-stack"},
    {Structure::kDsmStack, "dsm-stack"}, {Structure::kHStack, "h-stack"},     {Structure::kSimStack, "sim-stack"},
    {Structure::kClhStack, "clh-stack"}, {Structure::kLfStack, "lf-stack"},   {Structure::kClhLock, "clh-lock"},
    {Structure::kMcsLock, "mcs-lock"},   {Structure::kClhHash, "clh-hash"},   {Structure::kDsmHash, "dsm-hash"},
}};

constexpr std::string_view to_string(Structure s) noexcept {
  for (const auto& [k, name] : kStructureNames) {
    if (k == s) return name;
  }
  return "unknown";
}

constexpr std::optional<Structure> parse_structure(std::string_view name) noexcept {
  for (const auto& [k, n] : kStructureNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

enum class Family { kCounter, kQueue, kStack, kLock, kHash };

constexpr Family family_of(Structure s) noexcept {
  if (s <= Structure::kOyama) return Family::kCounter;
  if (s <= Structure::kMsQueue) return Family::kQueue;
  if (s <= Structure::kLfStack) return Family::kStack;
  if (s <= Structure::kMcsLock) return Family::kLock;
  return Family::kHash;
}

/// Structures whose every operation is wait-free.
constexpr bool is_wait_free(Structure s) noexcept {
  return s == Structure::kPSim || s == Structure::kSimQueue || s == Structure::kSimStack;
}

enum class Mode { kThroughput, kCorrectness, kStallInjection };
enum class Format { kText, kJsonLines };

constexpr std::string_view to_string(Mode m) noexcept {
  switch (m) {
    case Mode::kThroughput: return "throughput";
    case Mode::kCorrectness: return "correctness";
    case Mode::kStallInjection: return "stall-injection";
  }
  return "throughput";
}

constexpr std::optional<Mode> parse_mode(std::string_view s) noexcept {
  if (s == "throughput") return Mode::kThroughput;
  if (s == "correctness") return Mode::kCorrectness;
  if (s == "stall-injection") return Mode::kStallInjection;
  return std::nullopt;
}

constexpr std::string_view to_string(Format f) noexcept { return f == Format::kText ? "text" : "json-lines"; }

constexpr std::optional<Format> parse_format(std::string_view s) noexcept {
  if (s == "text") return Format::kText;
  if (s == "json-lines") return Format::kJsonLines;
  return std::nullopt;
}

/// Keys drawn by the hash workload.
inline constexpr std::uint64_t kHashKeySpace = 256;
inline constexpr std::uint64_t kMaxTotalRuns = std::uint64_t{1} << 40;

struct BenchConfig {
  Structure structure = Structure::kCcSynch;
  int n_threads = 1;
  std::uint64_t runs = 10000;  // per thread
  std::uint64_t max_work = 0;
  std::uint64_t seed = 1;
  PinPolicy pin = PinPolicy::kNone;
  int group_size = 0;             // 0 = one group
  std::uint64_t pool_capacity = 0;  // 0 = sized from the workload
  Mode mode = Mode::kThroughput;
  int victim = 0;
  std::optional<YieldPoint> yield_point;
  Format format = Format::kText;
  std::uint64_t watchdog_ms = 120000;

  bool operator==(const BenchConfig&) const = default;

  /// Pool size used when pool_capacity is 0. Paired workloads keep at most
  /// one element per thread in flight.
  std::uint64_t effective_pool_capacity() const noexcept {
    if (pool_capacity != 0) return pool_capacity;
    if (family_of(structure) == Family::kHash) return kHashKeySpace + 64;
    return 4 * static_cast<std::uint64_t>(n_threads) + 64;
  }

  void validate() const {
    if (n_threads < 1 || n_threads > kMaxThreads) {
      throw std::out_of_range("--threads must be in [1, " + std::to_string(kMaxThreads) + "]");
    }
    if (runs < 1) throw std::out_of_range("--runs must be positive");
    if (runs > kMaxTotalRuns / static_cast<std::uint64_t>(n_threads)) {
      throw std::out_of_range("--runs: runs * threads must not exceed 2^40");
    }
    if (group_size < 0) throw std::out_of_range("--group-size must be positive");
    if (victim < 0 || victim >= n_threads) throw std::out_of_range("--victim must name a thread in [0, threads)");
    if (mode == Mode::kStallInjection && !yield_point) {
      throw std::invalid_argument("--yield-point is required in stall-injection mode");
    }
    if (mode == Mode::kStallInjection && n_threads < 2) {
      throw std::out_of_range("--threads must be at least 2 in stall-injection mode");
    }
    if (watchdog_ms == 0) throw std::out_of_range("--watchdog-ms must be positive");
  }
};

}  // namespace synch::bench
