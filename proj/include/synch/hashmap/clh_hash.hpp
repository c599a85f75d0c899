#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "synch/hashmap/hash_table.hpp"
#include "synch/locks/clh_lock.hpp"
#include "synch/queues/queue.hpp"
#include "synch/runtime/node_pool.hpp"
#include "synch/runtime/thread_team.hpp"

namespace synch {

/// Chained table with one CLH lock per bucket. Searches take the lock too.
class ClhHashTable final : public ConcurrentHashTable {
 public:
  ClhHashTable(int n_threads, std::size_t pool_capacity, std::size_t n_buckets = kDefaultBuckets)
      : ConcurrentHashTable(n_buckets), pool_(checked(n_threads, pool_capacity)) {
    buckets_.reserve(n_buckets);
    for (std::size_t b = 0; b < n_buckets; ++b) buckets_.push_back(std::make_unique<Bucket>(n_threads));
  }

  InsertResult insert(std::uint64_t key, std::uint64_t value, int tid) override {
    const std::size_t b = bucket_of(key);
    Bucket& bucket = *buckets_[b];
    LockGuard guard(bucket.lock, tid);
    for (PackedRef r = bucket.head; !r.is_null(); r = PackedRef::from_bits(pool_[r].next.load())) {
      if (pool_[r].key.load() == key) {
        pool_[r].value.store(value);
        notify(b, {HashOp::kInsert, key, value, true, false});
        return InsertResult::kUpdated;
      }
    }
    const auto node = pool_.try_alloc();
    if (!node) {
      notify(b, {HashOp::kInsert, key, value, false, true});
      return InsertResult::kExhausted;
    }
    pool_[*node].key.store(key);
    pool_[*node].value.store(value);
    pool_[*node].next.store(bucket.head.bits());
    bucket.head = *node;
    notify(b, {HashOp::kInsert, key, value, false, false});
    return InsertResult::kInserted;
  }

  DeleteResult remove(std::uint64_t key, int tid) override {
    const std::size_t b = bucket_of(key);
    Bucket& bucket = *buckets_[b];
    LockGuard guard(bucket.lock, tid);
    PackedRef prev = PackedRef::null();
    for (PackedRef r = bucket.head; !r.is_null(); r = PackedRef::from_bits(pool_[r].next.load())) {
      if (pool_[r].key.load() == key) {
        const std::uint64_t next = pool_[r].next.load();
        if (prev.is_null()) {
          bucket.head = PackedRef::from_bits(next);
        } else {
          pool_[prev].next.store(next);
        }
        pool_.release(r);
        notify(b, {HashOp::kDelete, key, 0, true, false});
        return DeleteResult::kRemoved;
      }
      prev = r;
    }
    notify(b, {HashOp::kDelete, key, 0, false, false});
    return DeleteResult::kAbsent;
  }

  std::optional<std::uint64_t> search(std::uint64_t key, int tid) override {
    const std::size_t b = bucket_of(key);
    Bucket& bucket = *buckets_[b];
    LockGuard guard(bucket.lock, tid);
    for (PackedRef r = bucket.head; !r.is_null(); r = PackedRef::from_bits(pool_[r].next.load())) {
      if (pool_[r].key.load() == key) {
        const std::uint64_t value = pool_[r].value.load();
        notify(b, {HashOp::kSearch, key, value, true, false});
        return value;
      }
    }
    notify(b, {HashOp::kSearch, key, 0, false, false});
    return std::nullopt;
  }

  HashKind kind() const noexcept override { return HashKind::kClh; }

  std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> scan() const override {
    std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> out(buckets_.size());
    for (std::size_t b = 0; b < buckets_.size(); ++b) {
      for (PackedRef r = buckets_[b]->head; !r.is_null(); r = PackedRef::from_bits(pool_[r].next.load())) {
        out[b].emplace_back(pool_[r].key.load(), pool_[r].value.load());
      }
    }
    return out;
  }

 private:
  struct Bucket {
    explicit Bucket(int n_threads) : lock(n_threads) {}
    ClhLock lock;
    PackedRef head = PackedRef::null();  // guarded by lock
  };

  static std::size_t checked(int n_threads, std::size_t pool_capacity) {
    detail::check_thread_count(n_threads, kMaxThreads, "ClhHashTable");
    if (pool_capacity == 0) throw std::invalid_argument("ClhHashTable: pool_capacity must be positive");
    return pool_capacity;
  }

  NodePool pool_;
  std::vector<std::unique_ptr<Bucket>> buckets_;
};

}  // namespace synch
