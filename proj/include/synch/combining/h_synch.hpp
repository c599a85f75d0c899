#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "synch/combining/request_list.hpp"
#include "synch/combining/seq_object.hpp"
#include "synch/locks/clh_lock.hpp"
#include "synch/runtime/thread_team.hpp"

namespace synch {

/// H-Synch: one CC-Synch list per thread group; a group's combiner takes a
/// global CLH lock for its stint and serves only its own group's list.
/// Group combiners are admitted in CLH FIFO order.
template <InPlaceObject Seq>
class HSynch {
 public:
  using State = typename Seq::State;
  using Result = typename Seq::Result;

  HSynch(int n_threads, Seq seq = {}, State initial = {}, CombiningOptions options = {})
      : n_threads_(checked(n_threads)),
        group_size_(options.group_size > 0 ? std::min(options.group_size, n_threads) : n_threads),
        n_groups_((n_threads + group_size_ - 1) / group_size_),
        seq_(std::move(seq)),
        state_(initial),
        global_(n_groups_) {
    groups_.reserve(static_cast<std::size_t>(n_groups_));
    const int bound = options.bound_for(n_threads);
    for (int g = 0; g < n_groups_; ++g) {
      const int members = std::min(group_size_, n_threads - g * group_size_);
      groups_.push_back(std::make_unique<detail::CcRequestList<Result>>(members, bound));
    }
  }

  Result apply(Opcode op, std::uint64_t arg, int tid) {
    if (!seq_.accepts(op)) throw UnknownOpcode(op);
    const int group = tid / group_size_;
    auto stint = [this, group, tid](auto&& body) {
      global_.acquire(group, tid);
      body();
      global_.release(group);
    };
    return groups_[static_cast<std::size_t>(group)]->submit(
        op, arg, tid - group * group_size_, tid, [this](Opcode o, std::uint64_t a) { return seq_.apply(state_, o, a); },
        stint);
  }

  const State& state() const noexcept { return state_; }
  int n_threads() const noexcept { return n_threads_; }
  int group_size() const noexcept { return group_size_; }
  int n_groups() const noexcept { return n_groups_; }

 private:
  static int checked(int n) {
    detail::check_thread_count(n, kMaxThreads, "HSynch");
    return n;
  }

  int n_threads_;
  int group_size_;
  int n_groups_;
  Seq seq_;
  State state_;
  ClhLock global_;
  std::vector<std::unique_ptr<detail::CcRequestList<Result>>> groups_;
};

}  // namespace synch
