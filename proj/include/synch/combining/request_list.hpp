#pragma once

// Request lists shared by the blocking combining constructions. A thread
// announces (opcode, argument) in a request node and spins until a combiner
// either completes the request or hands it the combiner role. A combiner
// serves at most `bound` requests per stint.

#include <cstdint>
#include <memory>
#include <utility>

#include "synch/combining/seq_object.hpp"
#include "synch/runtime/atomic_word.hpp"
#include "synch/runtime/instrument.hpp"

namespace synch::detail {

inline constexpr std::uint64_t kNoNode = UINT64_MAX;

template <class Result>
struct alignas(kCacheLine) CombineRequest {
  // Plain fields: written by the owner before the request is linked, read by
  // the combiner after it observes the link (and the reverse for `ret`).
  Opcode opcode = 0;
  std::uint64_t arg = 0;
  Result ret{};
  AtomicWord wait;
  AtomicWord completed;
  AtomicWord next{kNoNode};
};

struct IdentityStint {
  template <class F>
  void operator()(F&& body) const {
    std::forward<F>(body)();
  }
};

/// CC-Synch list. Nodes migrate between threads: a thread brings a fresh node,
/// swaps it in as the new tail and fills the previous tail with its request,
/// so n_threads + 1 nodes circulate.
template <class Result>
class CcRequestList {
 public:
  CcRequestList(int n_threads, int bound)
      : bound_(static_cast<std::uint64_t>(bound)),
        nodes_(new Node[static_cast<std::size_t>(n_threads) + 1]),
        my_node_(new Padded<std::uint64_t>[static_cast<std::size_t>(n_threads)]) {
    for (int t = 0; t < n_threads; ++t) my_node_[t].value = static_cast<std::uint64_t>(t);
    // The initial tail is an idle node: its first claimant becomes combiner.
    nodes_[n_threads].wait.store(0);
    tail_.value.store(static_cast<std::uint64_t>(n_threads));
  }

  /// `slot` indexes the thread's private bookkeeping; `tid` is reported to hooks.
  template <class Serve, class Stint = IdentityStint>
  Result submit(Opcode op, std::uint64_t arg, int slot, int tid, Serve&& serve, Stint&& stint = {}) {
    const std::uint64_t fresh = my_node_[slot].value;
    Node& fresh_node = nodes_[fresh];
    fresh_node.next.store(kNoNode);
    fresh_node.wait.store(1);
    fresh_node.completed.store(0);
    yield_point(YieldPoint::kAnnounce, tid, &fresh_node);

    const std::uint64_t cur = tail_.value.exchange(fresh);
    Node& mine = nodes_[cur];
    mine.opcode = op;
    mine.arg = arg;
    mine.next.store(fresh);
    my_node_[slot].value = cur;
    yield_point(YieldPoint::kPostAnnounce, tid, &mine);

    SpinWait spin;
    while (mine.wait.load() != 0) {
      yield_point(YieldPoint::kSpin, tid, &mine.wait);
      spin();
    }
    if (mine.completed.load() != 0) return mine.ret;

    Node* p = &mine;
    stint([&] {
      std::uint64_t passes = 0;
      for (;;) {
        const std::uint64_t next = p->next.load();
        if (next == kNoNode || passes >= bound_) break;
        ++passes;
        yield_point(YieldPoint::kCombinePass, tid, p, passes);
        p->ret = serve(p->opcode, p->arg);
        p->completed.store(1);
        p->wait.store(0);
        p = &nodes_[next];
      }
    });
    // Either the idle tail or the first unserved request: its owner takes over.
    p->wait.store(0);
    return mine.ret;
  }

 private:
  using Node = CombineRequest<Result>;

  std::uint64_t bound_;
  std::unique_ptr<Node[]> nodes_;
  std::unique_ptr<Padded<std::uint64_t>[]> my_node_;
  Padded<AtomicWord> tail_;
};

/// DSM-Synch list. Each thread owns two nodes and alternates them; a waiter
/// spins only on its own node, and the successor link is attached after the
/// tail swap.
template <class Result>
class DsmRequestList {
 public:
  DsmRequestList(int n_threads, int bound)
      : bound_(static_cast<std::uint64_t>(bound)),
        nodes_(new Node[2 * static_cast<std::size_t>(n_threads)]),
        toggle_(new Padded<std::uint64_t>[static_cast<std::size_t>(n_threads)]) {
    tail_.value.store(kNoNode);
  }

  template <class Serve, class Stint = IdentityStint>
  Result submit(Opcode op, std::uint64_t arg, int slot, int tid, Serve&& serve, Stint&& stint = {}) {
    std::uint64_t& toggle = toggle_[slot].value;
    toggle ^= 1;
    const std::uint64_t index = 2 * static_cast<std::uint64_t>(slot) + toggle;
    Node& mine = nodes_[index];
    mine.opcode = op;
    mine.arg = arg;
    mine.next.store(kNoNode);
    mine.completed.store(0);
    mine.wait.store(1);
    yield_point(YieldPoint::kAnnounce, tid, &mine);

    const std::uint64_t pred = tail_.value.exchange(index);
    if (pred != kNoNode) {
      nodes_[pred].next.store(index);
      yield_point(YieldPoint::kPostAnnounce, tid, &mine);
      SpinWait spin;
      while (mine.wait.load() != 0) {
        yield_point(YieldPoint::kSpin, tid, &mine.wait);
        spin();
      }
      if (mine.completed.load() != 0) return mine.ret;
    } else {
      yield_point(YieldPoint::kPostAnnounce, tid, &mine);
    }

    Node* handoff = nullptr;
    stint([&] {
      Node* p = &mine;
      std::uint64_t passes = 0;
      for (;;) {
        ++passes;
        yield_point(YieldPoint::kCombinePass, tid, p, passes);
        p->ret = serve(p->opcode, p->arg);
        p->completed.store(1);
        std::uint64_t next = p->next.load();
        if (next == kNoNode) {
          if (tail_.value.compare_and_swap(static_cast<std::uint64_t>(p - nodes_.get()), kNoNode)) {
            p->wait.store(0);
            return;
          }
          SpinWait spin;
          while ((next = p->next.load()) == kNoNode) spin();
        }
        // `next` must be read before release: the owner may reuse the node.
        p->wait.store(0);
        p = &nodes_[next];
        if (passes >= bound_) {
          handoff = p;
          return;
        }
      }
    });
    if (handoff != nullptr) handoff->wait.store(0);
    return mine.ret;
  }

 private:
  using Node = CombineRequest<Result>;

  std::uint64_t bound_;
  std::unique_ptr<Node[]> nodes_;
  std::unique_ptr<Padded<std::uint64_t>[]> toggle_;
  Padded<AtomicWord> tail_;
};

}  // namespace synch::detail
