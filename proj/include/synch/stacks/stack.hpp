#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "synch/queues/queue.hpp"
#include "synch/runtime/reply.hpp"

namespace synch {

enum class StackKind { kCc, kDsm, kH, kSim, kClh, kLf };

constexpr std::string_view to_string(StackKind k) noexcept {
  switch (k) {
    case StackKind::kCc: return "cc-stack";
    case StackKind::kDsm: return "dsm-stack";
    case StackKind::kH: return "h-stack";
    case StackKind::kSim: return "sim-stack";
    case StackKind::kClh: return "clh-stack";
    case StackKind::kLf: return "lf-stack";
  }
  return "unknown";
}

inline constexpr StackKind kAllStackKinds[] = {StackKind::kCc,  StackKind::kDsm, StackKind::kH,
                                               StackKind::kSim, StackKind::kClh, StackKind::kLf};

class ConcurrentStack {
 public:
  virtual ~ConcurrentStack() = default;
  virtual OpStatus push(std::uint64_t value, int tid) = 0;
  virtual std::optional<std::uint64_t> pop(int tid) = 0;
  virtual StackKind kind() const noexcept = 0;
};

}  // namespace synch
