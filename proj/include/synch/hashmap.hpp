#pragma once

#include <memory>
#include <stdexcept>

#include "synch/hashmap/clh_hash.hpp"
#include "synch/hashmap/dsm_hash.hpp"
#include "synch/hashmap/hash_table.hpp"

namespace synch {

inline std::unique_ptr<ConcurrentHashTable> make_hash_table(HashKind kind, int n_threads, std::size_t pool_capacity,
                                                            std::size_t n_buckets = kDefaultBuckets) {
  switch (kind) {
    case HashKind::kClh: return std::make_unique<ClhHashTable>(n_threads, pool_capacity, n_buckets);
    case HashKind::kDsm: return std::make_unique<DsmHashTable>(n_threads, pool_capacity, n_buckets);
  }
  throw std::invalid_argument("make_hash_table: unknown kind");
}

}  // namespace synch
