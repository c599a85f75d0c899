#pragma once

#include <chrono>
#include <cstdint>

namespace synch {

/// Monotonic nanoseconds since an unspecified epoch.
inline std::uint64_t now() noexcept {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now().time_since_epoch())
          .count());
}

}  // namespace synch
