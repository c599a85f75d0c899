#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "synch/combining/seq_object.hpp"

namespace synch {

enum class HashKind { kClh, kDsm };

constexpr std::string_view to_string(HashKind k) noexcept {
  return k == HashKind::kClh ? "clh-hash" : "dsm-hash";
}

inline constexpr HashKind kAllHashKinds[] = {HashKind::kClh, HashKind::kDsm};

enum class InsertResult { kInserted, kUpdated, kExhausted };
enum class DeleteResult { kRemoved, kAbsent };

/// 64-bit finalizer (constants 0xff51afd7ed558ccd, 0xc4ceb9fe1a85ec53).
constexpr std::uint64_t mix64(std::uint64_t k) noexcept {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdULL;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ULL;
  k ^= k >> 33;
  return k;
}

inline constexpr std::size_t kDefaultBuckets = 1024;

enum class HashOp : std::uint8_t { kSearch, kInsert, kDelete };

/// One operation as applied inside its bucket's serialized section.
/// `hit`: search found the key, insert replaced an existing value, or delete
/// removed it. For a search hit `value` is the value returned.
struct HashEvent {
  HashOp op;
  std::uint64_t key;
  std::uint64_t value;
  bool hit;
  bool exhausted;
};

/// Called with (bucket, event) while the bucket is held, so per bucket the
/// calls form the serialization order. Must not touch the table.
using HashObserver = std::function<void(std::size_t, const HashEvent&)>;

class ConcurrentHashTable {
 public:
  virtual ~ConcurrentHashTable() = default;

  virtual InsertResult insert(std::uint64_t key, std::uint64_t value, int tid) = 0;
  virtual DeleteResult remove(std::uint64_t key, int tid) = 0;
  virtual std::optional<std::uint64_t> search(std::uint64_t key, int tid) = 0;
  virtual HashKind kind() const noexcept = 0;

  /// Chain contents per bucket, in chain order. Quiescent use only.
  virtual std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> scan() const = 0;

  /// Install before the table is shared.
  void set_observer(HashObserver observer) { observer_ = std::move(observer); }

  std::size_t n_buckets() const noexcept { return mask_ + 1; }
  std::size_t bucket_of(std::uint64_t key) const noexcept { return mix64(key) & mask_; }

 protected:
  explicit ConcurrentHashTable(std::size_t n_buckets) : mask_(checked_buckets(n_buckets) - 1) {}

  void notify(std::size_t bucket, const HashEvent& e) const {
    if (observer_) observer_(bucket, e);
  }

 private:
  static std::size_t checked_buckets(std::size_t n) {
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("hash table: n_buckets must be a power of two");
    return n;
  }

  std::size_t mask_;
  HashObserver observer_;
};

}  // namespace synch
