#pragma once

// Benchmark targets: one adapter per structure family, each knowing how to
// perform one run of its workload and how to check itself at quiescence.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "synch/bench/config.hpp"
#include "synch/bench/report.hpp"
#include "synch/bench/workload.hpp"
#include "synch/combining.hpp"
#include "synch/hashmap.hpp"
#include "synch/locks.hpp"
#include "synch/queues.hpp"
#include "synch/stacks.hpp"

namespace synch::bench {

/// Completed runs per thread. Thread t used sequence numbers [0, runs[t]).
struct Tally {
  std::vector<std::uint64_t> runs;

  std::uint64_t total() const noexcept {
    std::uint64_t n = 0;
    for (auto r : runs) n += r;
    return n;
  }
};

class Target {
 public:
  virtual ~Target() = default;
  virtual void run(int tid, std::uint64_t seq, const GeneratedOp& op) = 0;
  virtual std::uint64_t ops_per_run() const noexcept { return 1; }
  /// Counter value readable while other threads are stalled, if supported.
  virtual std::optional<std::uint64_t> live_counter() const { return std::nullopt; }
  /// Runs the family's checks. Called once, after every thread has stopped.
  virtual void check(BenchReport& report, const Tally& tally) = 0;
};

namespace detail {

inline CombiningOptions options_for(const BenchConfig& c) {
  CombiningOptions o;
  o.group_size = c.group_size;
  return o;
}

template <class T>
struct alignas(kCacheLine) PerThread {
  T value{};
};

template <class Obj>
class CounterTarget final : public Target {
 public:
  explicit CounterTarget(const BenchConfig& c)
      : object_(c.n_threads, CounterObject{}, 0, options_for(c)),
        record_(c.mode != Mode::kThroughput),
        returned_(static_cast<std::size_t>(c.n_threads)) {}

  void run(int tid, std::uint64_t, const GeneratedOp&) override {
    const std::uint64_t before = object_.apply(CounterObject::kAdd, 1, tid);
    if (record_) returned_[static_cast<std::size_t>(tid)].value.push_back(before);
  }

  std::optional<std::uint64_t> live_counter() const override {
    if constexpr (requires { object_.snapshot(); }) {
      return object_.snapshot();
    } else {
      return std::nullopt;
    }
  }

  void check(BenchReport& report, const Tally& tally) override {
    const std::uint64_t total = tally.total();
    const std::uint64_t final_value = value();
    report.add_check("counter_total", final_value == total,
                     "final counter " + std::to_string(final_value) + ", expected " + std::to_string(total));
    if (!record_) return;
    std::vector<std::uint64_t> all;
    all.reserve(total);
    for (const auto& t : returned_) all.insert(all.end(), t.value.begin(), t.value.end());
    std::sort(all.begin(), all.end());
    std::string detail = std::to_string(all.size()) + " returns";
    bool ok = all.size() == total;
    for (std::size_t i = 0; ok && i < all.size(); ++i) {
      if (all[i] != i) {
        ok = false;
        detail = "sorted return " + std::to_string(i) + " is " + std::to_string(all[i]);
      }
    }
    report.add_check("pre_values", ok, ok ? "returns are exactly {0.." + std::to_string(total) + "-1}" : detail);
  }

 private:
  std::uint64_t value() const {
    if constexpr (requires { object_.snapshot(); }) {
      return object_.snapshot();
    } else {
      return object_.state();
    }
  }

  Obj object_;
  bool record_;
  std::vector<PerThread<std::vector<std::uint64_t>>> returned_;
};

struct ContainerThread {
  std::vector<std::uint64_t> got;
  std::vector<std::uint64_t> exhausted_seqs;
  std::uint64_t inserted = 0;
  std::uint64_t removed = 0;
  std::uint64_t empties = 0;
};

/// Element-level checks shared by queues and stacks.
inline void check_elements(BenchReport& report, const Tally& tally, const std::vector<PerThread<ContainerThread>>& threads,
                           const std::vector<std::uint64_t>& residual, bool fifo) {
  const std::size_t n = tally.runs.size();
  std::vector<std::vector<char>> seen(n);
  for (std::size_t p = 0; p < n; ++p) seen[p].assign(tally.runs[p], 0);
  std::uint64_t foreign = 0, duplicates = 0, missing = 0;
  auto mark = [&](std::uint64_t v) {
    const auto p = static_cast<std::size_t>(value_producer(v));
    const std::uint64_t s = value_seq(v);
    if (p >= n || s >= tally.runs[p]) {
      ++foreign;
    } else if (seen[p][s]) {
      ++duplicates;
    } else {
      seen[p][s] = 1;
    }
  };
  for (const auto& t : threads) {
    for (auto v : t.value.got) mark(v);
  }
  for (auto v : residual) mark(v);
  for (std::size_t p = 0; p < n; ++p) {
    for (auto s : threads[p].value.exhausted_seqs) seen[p][s] = 1;  // never inserted
    missing += static_cast<std::uint64_t>(std::count(seen[p].begin(), seen[p].end(), 0));
  }
  report.add_check("multiset_equality", foreign == 0 && missing == 0,
                   std::to_string(missing) + " missing, " + std::to_string(foreign) + " never inserted");
  report.add_check("no_duplicates", duplicates == 0, std::to_string(duplicates) + " duplicates");
  if (!fifo) return;
  std::uint64_t inversions = 0;
  for (const auto& t : threads) {
    std::vector<std::uint64_t> next(n, 0);  // smallest acceptable seq + 1 offset
    for (auto v : t.value.got) {
      const auto p = static_cast<std::size_t>(value_producer(v));
      if (p >= n) continue;
      const std::uint64_t s = value_seq(v) + 1;
      if (s <= next[p]) ++inversions;
      next[p] = std::max(next[p], s);
    }
  }
  report.add_check("per_producer_fifo", inversions == 0, std::to_string(inversions) + " inversions");
}

inline void check_counts(BenchReport& report, const std::vector<PerThread<ContainerThread>>& threads,
                         std::size_t residual) {
  std::uint64_t inserted = 0, removed = 0, empties = 0, exhausted = 0;
  for (const auto& t : threads) {
    inserted += t.value.inserted;
    removed += t.value.removed;
    empties += t.value.empties;
    exhausted += t.value.exhausted_seqs.size();
  }
  report.add_check("no_exhaustion", exhausted == 0, std::to_string(exhausted) + " insertions refused");
  report.add_check("emptiness_honesty", empties == 0, std::to_string(empties) + " empty removals");
  report.add_check("count_conservation", inserted == removed + residual,
                   std::to_string(inserted) + " in, " + std::to_string(removed) + " out, " +
                       std::to_string(residual) + " left");
}

class QueueTarget final : public Target {
 public:
  QueueTarget(const BenchConfig& c, QueueKind kind)
      : queue_(make_queue(kind, c.n_threads, c.group_size, c.effective_pool_capacity())),
        record_(c.mode != Mode::kThroughput),
        threads_(static_cast<std::size_t>(c.n_threads)) {}

  void run(int tid, std::uint64_t seq, const GeneratedOp&) override {
    ContainerThread& me = threads_[static_cast<std::size_t>(tid)].value;
    if (queue_->enqueue(encode_value(tid, seq), tid) == OpStatus::kOk) {
      ++me.inserted;
    } else {
      me.exhausted_seqs.push_back(seq);
    }
    if (const auto v = queue_->dequeue(tid)) {
      ++me.removed;
      if (record_) me.got.push_back(*v);
    } else {
      ++me.empties;
    }
  }

  std::uint64_t ops_per_run() const noexcept override { return 2; }

  void check(BenchReport& report, const Tally& tally) override {
    std::vector<std::uint64_t> residual;
    while (const auto v = queue_->dequeue(0)) residual.push_back(*v);
    check_counts(report, threads_, residual.size());
    if (record_) check_elements(report, tally, threads_, residual, true);
  }

 private:
  std::unique_ptr<ConcurrentQueue> queue_;
  bool record_;
  std::vector<PerThread<ContainerThread>> threads_;
};

class StackTarget final : public Target {
 public:
  StackTarget(const BenchConfig& c, StackKind kind)
      : stack_(make_stack(kind, c.n_threads, c.group_size, c.effective_pool_capacity())),
        record_(c.mode != Mode::kThroughput),
        threads_(static_cast<std::size_t>(c.n_threads)) {}

  void run(int tid, std::uint64_t seq, const GeneratedOp&) override {
    ContainerThread& me = threads_[static_cast<std::size_t>(tid)].value;
    if (stack_->push(encode_value(tid, seq), tid) == OpStatus::kOk) {
      ++me.inserted;
    } else {
      me.exhausted_seqs.push_back(seq);
    }
    if (const auto v = stack_->pop(tid)) {
      ++me.removed;
      if (record_) me.got.push_back(*v);
    } else {
      ++me.empties;
    }
  }

  std::uint64_t ops_per_run() const noexcept override { return 2; }

  void check(BenchReport& report, const Tally& tally) override {
    std::vector<std::uint64_t> residual;
    while (const auto v = stack_->pop(0)) residual.push_back(*v);
    check_counts(report, threads_, residual.size());
    if (record_) check_elements(report, tally, threads_, residual, false);
  }

 private:
  std::unique_ptr<ConcurrentStack> stack_;
  bool record_;
  std::vector<PerThread<ContainerThread>> threads_;
};

template <class Lock>
class LockTarget final : public Target {
 public:
  explicit LockTarget(const BenchConfig& c)
      : lock_(c.n_threads), record_(c.mode != Mode::kThroughput), grants_(static_cast<std::size_t>(c.n_threads)) {}

  void run(int tid, std::uint64_t, const GeneratedOp&) override {
    const std::uint64_t ticket = lock_.acquire(tid);
    const std::uint64_t order = counter_.value++;
    lock_.release(tid);
    if (record_) grants_[static_cast<std::size_t>(tid)].value.emplace_back(ticket, order);
  }

  void check(BenchReport& report, const Tally& tally) override {
    report.add_check("counter_exact", counter_.value == tally.total(),
                     "plain counter " + std::to_string(counter_.value) + ", expected " + std::to_string(tally.total()));
    if (!record_ || !kInstrumented) return;
    std::uint64_t inversions = 0;
    for (const auto& t : grants_) {
      for (const auto& [ticket, order] : t.value) inversions += ticket != order;
    }
    report.add_check("fifo_grant_order", inversions == 0, std::to_string(inversions) + " grants out of ticket order");
  }

 private:
  Lock lock_;
  PerThread<std::uint64_t> counter_;  // plain on purpose: guarded by lock_
  bool record_;
  std::vector<PerThread<std::vector<std::pair<std::uint64_t, std::uint64_t>>>> grants_;
};

class HashTarget final : public Target {
 public:
  HashTarget(const BenchConfig& c, HashKind kind)
      : config_(c),
        table_(make_hash_table(kind, c.n_threads, c.effective_pool_capacity())),
        record_(c.mode != Mode::kThroughput),
        exhausted_(static_cast<std::size_t>(c.n_threads)) {
    if (record_) {
      logs_.resize(table_->n_buckets());
      table_->set_observer([this](std::size_t bucket, const HashEvent& e) { logs_[bucket].push_back(e); });
    }
  }

  void run(int tid, std::uint64_t seq, const GeneratedOp& op) override {
    switch (op.kind) {
      case OpKind::kInsert:
        if (table_->insert(op.key, encode_value(tid, seq), tid) == InsertResult::kExhausted) {
          ++exhausted_[static_cast<std::size_t>(tid)].value;
        }
        break;
      case OpKind::kDelete: table_->remove(op.key, tid); break;
      default: table_->search(op.key, tid); break;
    }
  }

  void check(BenchReport& report, const Tally& tally) override {
    const auto scan = table_->scan();
    std::uint64_t misplaced = 0, repeated = 0, exhausted = 0;
    std::unordered_set<std::uint64_t> keys;
    for (std::size_t b = 0; b < scan.size(); ++b) {
      for (const auto& [k, v] : scan[b]) {
        misplaced += table_->bucket_of(k) != b;
        repeated += !keys.insert(k).second;
      }
    }
    for (const auto& e : exhausted_) exhausted += e.value;
    report.add_check("no_exhaustion", exhausted == 0, std::to_string(exhausted) + " insertions refused");
    report.add_check("bucket_residency", misplaced == 0,
                     std::to_string(keys.size()) + " keys, " + std::to_string(misplaced) + " misplaced");
    report.add_check("uniqueness", repeated == 0, std::to_string(repeated) + " repeated keys");
    if (!record_) return;
    check_replay(report, tally, scan);
    check_provenance(report, tally, scan);
  }

 private:
  using Scan = std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>>;

  // Folds every bucket's log sequentially and compares each recorded outcome
  // and the final chain contents with the fold.
  void check_replay(BenchReport& report, const Tally& tally, const Scan& scan) const {
    std::uint64_t events = 0, mismatches = 0;
    for (std::size_t b = 0; b < logs_.size(); ++b) {
      std::map<std::uint64_t, std::uint64_t> model;
      for (const HashEvent& e : logs_[b]) {
        ++events;
        const auto it = model.find(e.key);
        const bool present = it != model.end();
        switch (e.op) {
          case HashOp::kSearch: mismatches += e.hit != present || (present && e.value != it->second); break;
          case HashOp::kInsert:
            mismatches += e.hit != present;
            if (!e.exhausted) model[e.key] = e.value;
            break;
          case HashOp::kDelete:
            mismatches += e.hit != present;
            if (present) model.erase(it);
            break;
        }
      }
      const std::map<std::uint64_t, std::uint64_t> actual(scan[b].begin(), scan[b].end());
      mismatches += actual != model;
    }
    report.add_check("per_bucket_replay", mismatches == 0 && events == tally.total(),
                     std::to_string(events) + " logged events, " + std::to_string(mismatches) + " mismatches");
  }

  // Every value observed must have been written by an insert of that key.
  void check_provenance(BenchReport& report, const Tally& tally, const Scan& scan) const {
    const std::size_t n = tally.runs.size();
    std::vector<std::vector<std::uint64_t>> insert_key(n);
    for (std::size_t p = 0; p < n; ++p) {
      WorkloadStream stream(config_, static_cast<int>(p));
      insert_key[p].resize(tally.runs[p]);
      for (auto& k : insert_key[p]) {
        const GeneratedOp op = stream.next();
        k = op.kind == OpKind::kInsert ? op.key : UINT64_MAX;
      }
    }
    std::uint64_t checked = 0, bad = 0;
    auto verify = [&](std::uint64_t key, std::uint64_t value) {
      ++checked;
      const auto p = static_cast<std::size_t>(value_producer(value));
      const std::uint64_t s = value_seq(value);
      bad += p >= n || s >= insert_key[p].size() || insert_key[p][s] != key;
    };
    for (const auto& log : logs_) {
      for (const HashEvent& e : log) {
        if (e.op == HashOp::kSearch && e.hit) verify(e.key, e.value);
      }
    }
    for (const auto& bucket : scan) {
      for (const auto& [k, v] : bucket) verify(k, v);
    }
    report.add_check("value_provenance", bad == 0,
                     std::to_string(checked) + " values checked, " + std::to_string(bad) + " without a matching insert");
  }

  BenchConfig config_;
  std::unique_ptr<ConcurrentHashTable> table_;
  bool record_;
  std::vector<PerThread<std::uint64_t>> exhausted_;
  std::vector<std::vector<HashEvent>> logs_;  // per bucket, appended under the bucket's synchronizer
};

}  // namespace detail

inline std::unique_ptr<Target> make_target(const BenchConfig& c) {
  using namespace detail;
  switch (c.structure) {
    case Structure::kCcSynch: return std::make_unique<CounterTarget<CcSynch<CounterObject>>>(c);
    case Structure::kDsmSynch: return std::make_unique<CounterTarget<DsmSynch<CounterObject>>>(c);
    case Structure::kHSynch: return std::make_unique<CounterTarget<HSynch<CounterObject>>>(c);
    case Structure::kPSim: return std::make_unique<CounterTarget<PSim<CounterObject>>>(c);
    case Structure::kOyama: return std::make_unique<CounterTarget<Oyama<CounterObject>>>(c);
    case Structure::kCcQueue: return std::make_unique<QueueTarget>(c, QueueKind::kCc);
    case Structure::kDsmQueue: return std::make_unique<QueueTarget>(c, QueueKind::kDsm);
    case Structure::kHQueue: return std::make_unique<QueueTarget>(c, QueueKind::kH);
    case Structure::kSimQueue: return std::make_unique<QueueTarget>(c, QueueKind::kSim);
    case Structure::kClhQueue: return std::make_unique<QueueTarget>(c, QueueKind::kClh);
    case Structure::kMsQueue: return std::make_unique<QueueTarget>(c, QueueKind::kMs);
    case Structure::kCcStack: return std::make_unique<StackTarget>(c, StackKind::kCc);
    case Structure::kDsmStack: return std::make_unique<StackTarget>(c, StackKind::kDsm);
    case Structure::kHStack: return std::make_unique<StackTarget>(c, StackKind::kH);
    case Structure::kSimStack: return std::make_unique<StackTarget>(c, StackKind::kSim);
    case Structure::kClhStack: return std::make_unique<StackTarget>(c, StackKind::kClh);
    case Structure::kLfStack: return std::make_unique<StackTarget>(c, StackKind::kLf);
    case Structure::kClhLock: return std::make_unique<LockTarget<ClhLock>>(c);
    case Structure::kMcsLock: return std::make_unique<LockTarget<McsLock>>(c);
    case Structure::kClhHash: return std::make_unique<HashTarget>(c, HashKind::kClh);
    case Structure::kDsmHash: return std::make_unique<HashTarget>(c, HashKind::kDsm);
  }
  throw std::invalid_argument("unknown structure");
}

}  // namespace synch::bench
