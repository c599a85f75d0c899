#pragma once

#include <concepts>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace synch {

/// Object-defined operation code. Opcode 0 is READ and never changes state.
using Opcode = std::uint16_t;
inline constexpr Opcode kReadOp = 0;

class UnknownOpcode : public std::invalid_argument {
 public:
  explicit UnknownOpcode(Opcode op) : std::invalid_argument("unknown opcode " + std::to_string(op)) {}
};

/// A sequential object simulated by a combining construction: a trivially
/// copyable state plus a deterministic `apply` over its declared opcodes.
template <class S>
concept SequentialObject = requires(const S& s, typename S::State& state, Opcode op, std::uint64_t arg) {
  typename S::State;
  typename S::Result;
  requires std::is_trivially_copyable_v<typename S::State>;
  requires std::is_trivially_copyable_v<typename S::Result>;
  { s.accepts(op) } -> std::convertible_to<bool>;
};

/// Sequential objects applied in place by the blocking constructions.
template <class S>
concept InPlaceObject = SequentialObject<S> && requires(const S& s, typename S::State& state, Opcode op, std::uint64_t arg) {
  { s.apply(state, op, arg) } -> std::same_as<typename S::Result>;
};

/// Shared counter: READ returns the value, ADD returns the value before adding.
struct CounterObject {
  using State = std::uint64_t;
  using Result = std::uint64_t;
  static constexpr Opcode kRead = kReadOp;
  static constexpr Opcode kAdd = 1;

  constexpr bool accepts(Opcode op) const noexcept { return op == kRead || op == kAdd; }

  constexpr Result apply(State& state, Opcode op, std::uint64_t arg) const noexcept {
    const State before = state;
    if (op == kAdd) state += arg;
    return before;
  }
};

struct CombiningOptions {
  int group_size = 0;                 // H-Synch: threads per group, 0 = one group
  int combining_bound = 0;            // requests served per combiner stint, 0 = 3 * n_threads
  std::size_t state_block_bytes = 128;  // PSim: replicated state capacity
  std::uint32_t backoff_cap = 1024;   // PSim: cap for backoff after a failed swap

  int bound_for(int n_threads) const noexcept { return combining_bound > 0 ? combining_bound : 3 * n_threads; }
};

namespace detail {

inline void check_thread_count(int n_threads, int cap, const char* what) {
  if (n_threads < 1 || n_threads > cap) {
    throw std::out_of_range(std::string(what) + ": n_threads must be in [1, " + std::to_string(cap) + "]");
  }
}

}  // namespace detail
}  // namespace synch
