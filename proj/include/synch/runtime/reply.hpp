#pragma once

#include <cstdint>
#include <optional>

namespace synch {

enum class OpStatus { kOk, kExhausted };

/// Two-word result used by the container objects: `ok` false means empty
/// (removal) or pool exhausted (insertion).
struct Reply {
  std::uint64_t value = 0;
  bool ok = false;

  std::optional<std::uint64_t> as_optional() const noexcept {
    return ok ? std::optional<std::uint64_t>(value) : std::nullopt;
  }
  OpStatus as_status() const noexcept { return ok ? OpStatus::kOk : OpStatus::kExhausted; }
};

}  // namespace synch
