#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "synch/runtime/reply.hpp"

namespace synch {

enum class QueueKind { kCc, kDsm, kH, kSim, kClh, kMs };

constexpr std::string_view to_string(QueueKind k) noexcept {
  switch (k) {
    case QueueKind::kCc: return "cc-queue";
    case QueueKind::kDsm: return "dsm-queue";
    case QueueKind::kH: return "h-queue";
    case QueueKind::kSim: return "sim-queue";
    case QueueKind::kClh: return "clh-queue";
    case QueueKind::kMs: return "ms-queue";
  }
  return "unknown";
}

inline constexpr QueueKind kAllQueueKinds[] = {QueueKind::kCc,  QueueKind::kDsm, QueueKind::kH,
                                               QueueKind::kSim, QueueKind::kClh, QueueKind::kMs};

/// Multi-producer multi-consumer FIFO queue of 64-bit words. Emptiness is
/// reported out of band, so every word value can be stored.
class ConcurrentQueue {
 public:
  virtual ~ConcurrentQueue() = default;
  virtual OpStatus enqueue(std::uint64_t value, int tid) = 0;
  virtual std::optional<std::uint64_t> dequeue(int tid) = 0;
  virtual QueueKind kind() const noexcept = 0;
};

namespace detail {

inline void check_container_params(int n_threads, int cap, std::size_t pool_capacity, const char* what) {
  if (n_threads < 1 || n_threads > cap) {
    throw std::out_of_range(std::string(what) + ": n_threads must be in [1, " + std::to_string(cap) + "]");
  }
  if (pool_capacity < 2 * static_cast<std::size_t>(n_threads)) {
    throw std::invalid_argument(std::string(what) + ": pool_capacity must be at least 2 * n_threads");
  }
}

}  // namespace detail
}  // namespace synch
