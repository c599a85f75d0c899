#pragma once

#include <cstdint>
#include <vector>

#include "synch/bench/config.hpp"
#include "synch/runtime/work.hpp"

namespace synch::bench {

enum class OpKind : std::uint8_t { kApply, kInsert, kSearch, kDelete };

/// One run of the workload: what to do (hash tables only; other families do
/// a fixed pattern per run) and how much local work follows it.
struct GeneratedOp {
  OpKind kind = OpKind::kApply;
  std::uint64_t key = 0;
  std::uint64_t work = 0;

  bool operator==(const GeneratedOp&) const = default;
};

/// Per-thread operation stream, a pure function of (config, thread id).
/// Hash mix: 20% insert, 70% search, 10% delete over kHashKeySpace keys.
class WorkloadStream {
 public:
  WorkloadStream(const BenchConfig& config, int tid) noexcept
      : hash_(family_of(config.structure) == Family::kHash),
        ops_(thread_seed(config.seed ^ kOpSalt, tid)),
        work_(WorkKnob{config.max_work, config.seed}, tid) {}

  GeneratedOp next() noexcept {
    GeneratedOp op;
    op.work = work_.next_amount();
    if (hash_) {
      const std::uint64_t r = ops_.next();
      const std::uint64_t pct = (r & 0xFFFFFFFF) % 100;
      op.key = (r >> 32) % kHashKeySpace;
      op.kind = pct < 20 ? OpKind::kInsert : pct < 90 ? OpKind::kSearch : OpKind::kDelete;
    }
    return op;
  }

 private:
  static constexpr std::uint64_t kOpSalt = 0x6A09E667F3BCC909ULL;

  bool hash_;
  Xorshift64Star ops_;
  LocalWork work_;
};

inline std::vector<GeneratedOp> generate_ops(const BenchConfig& config, int tid, std::uint64_t count) {
  WorkloadStream stream(config, tid);
  std::vector<GeneratedOp> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(stream.next());
  return out;
}

/// Element values carry their producer and sequence number.
inline constexpr int kSeqBits = 40;
inline constexpr std::uint64_t kSeqMask = (std::uint64_t{1} << kSeqBits) - 1;

constexpr std::uint64_t encode_value(int tid, std::uint64_t seq) noexcept {
  return (static_cast<std::uint64_t>(tid) << kSeqBits) | seq;
}
constexpr int value_producer(std::uint64_t v) noexcept { return static_cast<int>(v >> kSeqBits); }
constexpr std::uint64_t value_seq(std::uint64_t v) noexcept { return v & kSeqMask; }

}  // namespace synch::bench
