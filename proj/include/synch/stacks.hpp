#pragma once

#include <memory>
#include <stdexcept>

#include "synch/combining/cc_synch.hpp"
#include "synch/combining/dsm_synch.hpp"
#include "synch/combining/h_synch.hpp"
#include "synch/stacks/clh_stack.hpp"
#include "synch/stacks/combining_stack.hpp"
#include "synch/stacks/lf_stack.hpp"
#include "synch/stacks/sim_stack.hpp"
#include "synch/stacks/stack.hpp"

namespace synch {

/// `group_size` only matters for StackKind::kH (0 = one group).
inline std::unique_ptr<ConcurrentStack> make_stack(StackKind kind, int n_threads, int group_size,
                                                   std::size_t pool_capacity) {
  CombiningOptions options;
  options.group_size = group_size;
  switch (kind) {
    case StackKind::kCc: return std::make_unique<CombiningStack<CcSynch>>(kind, n_threads, pool_capacity, options);
    case StackKind::kDsm: return std::make_unique<CombiningStack<DsmSynch>>(kind, n_threads, pool_capacity, options);
    case StackKind::kH: return std::make_unique<CombiningStack<HSynch>>(kind, n_threads, pool_capacity, options);
    case StackKind::kSim: return std::make_unique<SimStack>(n_threads, pool_capacity, options);
    case StackKind::kClh: return std::make_unique<ClhStack>(n_threads, pool_capacity);
    case StackKind::kLf: return std::make_unique<LfStack>(n_threads, pool_capacity);
  }
  throw std::invalid_argument("make_stack: unknown kind");
}

}  // namespace synch
