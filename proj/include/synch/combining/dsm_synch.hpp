#pragma once

#include <cstdint>
#include <utility>

#include "synch/combining/request_list.hpp"
#include "synch/combining/seq_object.hpp"
#include "synch/runtime/thread_team.hpp"

namespace synch {

/// DSM-Synch: like CC-Synch, but every waiter spins on its own node, which
/// suits machines where remote spinning is expensive.
template <InPlaceObject Seq>
class DsmSynch {
 public:
  using State = typename Seq::State;
  using Result = typename Seq::Result;

  DsmSynch(int n_threads, Seq seq = {}, State initial = {}, CombiningOptions options = {})
      : n_threads_(checked(n_threads)),
        seq_(std::move(seq)),
        state_(initial),
        list_(n_threads, options.bound_for(n_threads)) {}

  Result apply(Opcode op, std::uint64_t arg, int tid) {
    if (!seq_.accepts(op)) throw UnknownOpcode(op);
    return list_.submit(op, arg, tid, tid, [this](Opcode o, std::uint64_t a) { return seq_.apply(state_, o, a); });
  }

  const State& state() const noexcept { return state_; }
  int n_threads() const noexcept { return n_threads_; }

 private:
  static int checked(int n) {
    detail::check_thread_count(n, kMaxThreads, "DsmSynch");
    return n;
  }

  int n_threads_;
  Seq seq_;
  State state_;
  detail::DsmRequestList<Result> list_;
};

}  // namespace synch
