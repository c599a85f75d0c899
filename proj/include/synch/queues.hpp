#pragma once

#include <memory>
#include <stdexcept>

#include "synch/combining/cc_synch.hpp"
#include "synch/combining/dsm_synch.hpp"
#include "synch/combining/h_synch.hpp"
#include "synch/queues/clh_queue.hpp"
#include "synch/queues/combining_queue.hpp"
#include "synch/queues/ms_queue.hpp"
#include "synch/queues/queue.hpp"
#include "synch/queues/sim_queue.hpp"

namespace synch {

/// `group_size` only matters for QueueKind::kH (0 = one group).
inline std::unique_ptr<ConcurrentQueue> make_queue(QueueKind kind, int n_threads, int group_size,
                                                   std::size_t pool_capacity) {
  CombiningOptions options;
  options.group_size = group_size;
  switch (kind) {
    case QueueKind::kCc: return std::make_unique<CombiningQueue<CcSynch>>(kind, n_threads, pool_capacity, options);
    case QueueKind::kDsm: return std::make_unique<CombiningQueue<DsmSynch>>(kind, n_threads, pool_capacity, options);
    case QueueKind::kH: return std::make_unique<CombiningQueue<HSynch>>(kind, n_threads, pool_capacity, options);
    case QueueKind::kSim: return std::make_unique<SimQueue>(n_threads, pool_capacity, options);
    case QueueKind::kClh: return std::make_unique<ClhQueue>(n_threads, pool_capacity);
    case QueueKind::kMs: return std::make_unique<MsQueue>(n_threads, pool_capacity);
  }
  throw std::invalid_argument("make_queue: unknown kind");
}

}  // namespace synch
