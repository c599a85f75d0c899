#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "synch/combining/seq_object.hpp"
#include "synch/runtime/atomic_word.hpp"
#include "synch/runtime/instrument.hpp"

namespace synch {

/// Sequential objects whose apply has side effects outside the copied state
/// (node allocation). PSim drives them through begin/commit/abort around each
/// attempt, passing a per-thread Local.
template <class S>
concept TransactionalObject =
    SequentialObject<S> &&
    requires(const S& s, typename S::State& state, typename S::Local& local, Opcode op, std::uint64_t arg) {
      typename S::Local;
      { s.apply(state, op, arg, local) } -> std::same_as<typename S::Result>;
      s.begin(state, local);
      s.commit(local);
      s.abort(local);
    };

template <class S>
concept HelpingObject = requires(const S& s, const typename S::State& state) { s.help(state); };

template <class S>
concept PSimCompatible = InPlaceObject<S> || TransactionalObject<S>;

/// PSim wait-free universal construction.
///
/// A thread announces its request, flips its bit in the shared toggle vector
/// and then makes at most two attempts: copy the published state, apply every
/// request whose toggle differs from the copy's applied vector, and swing
/// `sp_` to the new copy. If both attempts fail, a swap that started after the
/// announcement has already applied the request. Each thread owns two state
/// copies and alternates them across successful swaps.
///
/// Copies are guarded by a per-copy sequence lock because a lagging reader may
/// still be copying a state that its owner is rewriting. `sp_` packs the copy
/// index in the low 16 bits and a 48-bit swap counter above it.
template <PSimCompatible Seq>
class PSim {
 public:
  using State = typename Seq::State;
  using Result = typename Seq::Result;

  static constexpr int kMaxThreads = 64;

  PSim(int n_threads, Seq seq = {}, State initial = {}, CombiningOptions options = {})
      : n_threads_(checked(n_threads, options)),
        seq_(std::move(seq)),
        backoff_cap_(options.backoff_cap),
        result_base_(1),
        state_base_(1 + static_cast<std::size_t>(n_threads) * kResultWords),
        stride_(round_up(state_base_ + kStateWords, 8)),
        n_copies_(2 * static_cast<std::size_t>(n_threads) + 1),
        words_(new AtomicWord[n_copies_ * stride_]),
        versions_(new Padded<AtomicWord>[n_copies_]),
        announce_(new Announce[static_cast<std::size_t>(n_threads)]),
        threads_(static_cast<std::size_t>(n_threads)) {
    for (auto& t : threads_) t.scratch.assign(stride_, 0);

    std::vector<std::uint64_t> init(stride_, 0);
    store_state(init, initial);
    const std::size_t first = n_copies_ - 1;
    write_copy(first, init);
    sp_.value.store(make_sp(first, 0));
  }

  PSim(const PSim&) = delete;
  PSim& operator=(const PSim&) = delete;

  Result apply(Opcode op, std::uint64_t arg, int tid) {
    if (!seq_.accepts(op)) throw UnknownOpcode(op);
    ThreadData& me = threads_[static_cast<std::size_t>(tid)];
    Announce& ann = announce_[tid];
    ann.opcode.store(op);
    ann.arg.store(arg);
    yield_point(YieldPoint::kAnnounce, tid, &ann);

    const std::uint64_t bit = std::uint64_t{1} << tid;
    const std::uint64_t want = (toggles_.value.fetch_xor(bit) ^ bit) & bit;
    yield_point(YieldPoint::kPostAnnounce, tid, &ann);

    std::vector<std::uint64_t>& buf = me.scratch;
    Backoff backoff(backoff_cap_);
    for (int attempt = 0; attempt < 2; ++attempt) {
      const std::uint64_t observed = sp_.value.load();
      if (!read_copy(copy_of(observed), buf)) {
        backoff();  // torn copy: the state was republished meanwhile
        continue;
      }
      yield_point(YieldPoint::kPostCopy, tid, &buf);
      if ((buf[0] & bit) == want) return load_result(buf, tid);

      State state = load_state(buf);
      if constexpr (HelpingObject<Seq>) seq_.help(state);
      if constexpr (TransactionalObject<Seq>) seq_.begin(state, me.local);
      const std::uint64_t active = toggles_.value.load();
      for (std::uint64_t pending = active ^ buf[0]; pending != 0; pending &= pending - 1) {
        const int k = std::countr_zero(pending);
        const auto k_op = static_cast<Opcode>(announce_[k].opcode.load());
        const std::uint64_t k_arg = announce_[k].arg.load();
        store_result(buf, k, apply_one(state, k_op, k_arg, me));
      }
      buf[0] = active;
      store_state(buf, state);

      const std::size_t target = 2 * static_cast<std::size_t>(tid) + me.local_index;
      write_copy(target, buf);
      yield_point(YieldPoint::kPreSwap, tid, &sp_);
      const std::uint64_t replacement = make_sp(target, sequence_of(observed) + 1);
      if (sp_.value.load() == observed && sp_.value.compare_and_swap(observed, replacement)) {
        me.local_index ^= 1;
        if constexpr (TransactionalObject<Seq>) seq_.commit(me.local);
        yield_point(YieldPoint::kPostSwap, tid, &sp_);
        return load_result(buf, tid);
      }
      if constexpr (TransactionalObject<Seq>) seq_.abort(me.local);
      backoff();
    }

    // Two failed attempts: a swap that read the toggles after our announcement
    // has published the result. Retry only on torn reads.
    for (;;) {
      if (read_copy(copy_of(sp_.value.load()), buf) && (buf[0] & bit) == want) return load_result(buf, tid);
      cpu_relax();
    }
  }

  /// Current published state (validated read; safe concurrently).
  State snapshot() const {
    std::vector<std::uint64_t> buf(stride_);
    for (;;) {
      if (read_copy(copy_of(sp_.value.load()), buf)) return load_state(buf);
      cpu_relax();
    }
  }

  /// Number of successful state swaps so far.
  std::uint64_t swaps() const noexcept { return sequence_of(sp_.value.load()); }
  int n_threads() const noexcept { return n_threads_; }
  const Seq& object() const noexcept { return seq_; }

 private:
  static constexpr std::size_t kResultWords = (sizeof(Result) + 7) / 8;
  static constexpr std::size_t kStateWords = (sizeof(State) + 7) / 8;

  struct alignas(kCacheLine) Announce {
    AtomicWord opcode;
    AtomicWord arg;
  };

  template <class S, bool = TransactionalObject<S>>
  struct LocalOf {
    struct type {};
  };
  template <class S>
  struct LocalOf<S, true> {
    using type = typename S::Local;
  };
  using Local = typename LocalOf<Seq>::type;

  struct alignas(kCacheLine) ThreadData {
    std::size_t local_index = 0;
    std::vector<std::uint64_t> scratch;
    Local local{};
  };

  static int checked(int n_threads, const CombiningOptions& options) {
    detail::check_thread_count(n_threads, kMaxThreads, "PSim");
    if (sizeof(State) > options.state_block_bytes) {
      throw std::length_error("PSim: state of " + std::to_string(sizeof(State)) + " bytes exceeds the " +
                              std::to_string(options.state_block_bytes) + "-byte state block");
    }
    return n_threads;
  }

  static constexpr std::size_t round_up(std::size_t n, std::size_t m) { return (n + m - 1) / m * m; }
  static constexpr std::uint64_t make_sp(std::size_t copy, std::uint64_t seq) { return (seq << 16) | copy; }
  static constexpr std::size_t copy_of(std::uint64_t sp) { return static_cast<std::size_t>(sp & 0xFFFF); }
  static constexpr std::uint64_t sequence_of(std::uint64_t sp) { return sp >> 16; }

  Result apply_one(State& state, Opcode op, std::uint64_t arg, ThreadData& me) const {
    if constexpr (TransactionalObject<Seq>) {
      return seq_.apply(state, op, arg, me.local);
    } else {
      return seq_.apply(state, op, arg);
    }
  }

  // Sequence-lock writer. Only the copy's owner writes it, and never while it
  // is the published copy. Word accesses are relaxed; the fences order them
  // against the version updates.
  void write_copy(std::size_t copy, const std::vector<std::uint64_t>& src) {
    AtomicWord& version = versions_[copy].value;
    const std::uint64_t v = version.load_relaxed();
    version.store_relaxed(v + 1);
    std::atomic_thread_fence(std::memory_order_release);
    AtomicWord* dst = &words_[copy * stride_];
    for (std::size_t w = 0; w < stride_; ++w) dst[w].store_relaxed(src[w]);
    std::atomic_thread_fence(std::memory_order_release);
    version.store(v + 2);
  }

  bool read_copy(std::size_t copy, std::vector<std::uint64_t>& dst) const {
    const AtomicWord& version = versions_[copy].value;
    const std::uint64_t before = version.load();
    if (before & 1) return false;
    const AtomicWord* src = &words_[copy * stride_];
    for (std::size_t w = 0; w < stride_; ++w) dst[w] = src[w].load_relaxed();
    std::atomic_thread_fence(std::memory_order_acquire);
    return version.load_relaxed() == before;
  }

  State load_state(const std::vector<std::uint64_t>& buf) const {
    State s;
    std::memcpy(static_cast<void*>(&s), &buf[state_base_], sizeof(State));
    return s;
  }
  void store_state(std::vector<std::uint64_t>& buf, const State& s) const {
    std::memcpy(&buf[state_base_], &s, sizeof(State));
  }
  Result load_result(const std::vector<std::uint64_t>& buf, int tid) const {
    Result r;
    std::memcpy(static_cast<void*>(&r), &buf[result_base_ + static_cast<std::size_t>(tid) * kResultWords], sizeof(Result));
    return r;
  }
  void store_result(std::vector<std::uint64_t>& buf, int tid, const Result& r) const {
    std::memcpy(&buf[result_base_ + static_cast<std::size_t>(tid) * kResultWords], &r, sizeof(Result));
  }

  int n_threads_;
  Seq seq_;
  std::uint32_t backoff_cap_;
  std::size_t result_base_;
  std::size_t state_base_;
  std::size_t stride_;
  std::size_t n_copies_;
  std::unique_ptr<AtomicWord[]> words_;
  std::unique_ptr<Padded<AtomicWord>[]> versions_;
  std::unique_ptr<Announce[]> announce_;
  std::vector<ThreadData> threads_;
  Padded<AtomicWord> toggles_;
  Padded<AtomicWord> sp_;
};

}  // namespace synch
