#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "clustermerge/cluster.hpp"

namespace clustermerge {

inline constexpr std::uint64_t kDefaultGranularity = 4'000'000;

/// One cluster of Set 1 against a contiguous range of Set 2.
struct PartialMergeTask {
  std::uint64_t merge_id = 0;
  std::uint32_t c1 = 0;           // slot in Set 1
  std::uint32_t slice_begin = 0;  // slots [slice_begin, slice_end) of Set 2
  std::uint32_t slice_end = 0;
  std::uint64_t cost_estimate = 0;  // sum of rep-length products over the slice

  std::uint32_t slice_size() const noexcept { return slice_end - slice_begin; }
};

/// Cuts each Set-1 cluster's pass over Set 2 into slices whose estimated
/// residue-comparison cost stays within `granularity`. A single pair whose
/// cost alone exceeds the budget still forms its own slice. Tasks are ordered
/// by Set-1 slot, then by slice position.
std::vector<PartialMergeTask> split_into_partials(const ClusterSet& cs1, const ClusterSet& cs2,
                                                  const SequenceStore& store,
                                                  std::uint64_t granularity,
                                                  std::uint64_t merge_id = 0);

/// Set 2 of an in-flight set merge, shared by every partial merge of it.
/// Member lists are only touched under the owning cluster's lock and no thread
/// ever holds two cluster locks at once.
class LockedClusterSet {
 public:
  explicit LockedClusterSet(ClusterSet set);

  std::size_t size() const noexcept { return slots_.size(); }
  SeqIndex representative(std::size_t slot) const noexcept { return slots_[slot]->cluster.representative; }
  bool fully_merged(std::size_t slot) const noexcept { return slots_[slot]->merged.load(std::memory_order_acquire); }

  /// Copy of a cluster's members, or nothing if it has been tombstoned.
  std::optional<MemberList> snapshot(std::size_t slot) const;
  /// Adds members unless the cluster has been tombstoned. Returns false if it had.
  bool append(std::size_t slot, std::span<const SeqIndex> members);
  /// Tombstones the cluster and returns its members, or nothing if another
  /// thread got there first.
  std::optional<MemberList> drain(std::size_t slot);

  /// Surviving clusters in slot order. Only valid once every partial is done.
  std::vector<Cluster> take_survivors();

 private:
  struct Slot {
    Cluster cluster;
    mutable std::mutex lock;
    std::atomic<bool> merged{false};
  };
  std::vector<std::unique_ptr<Slot>> slots_;
};

/// Set-merge inner loop of `c1` over Set-2 slots [task.slice_begin, task.slice_end)
/// with in-place locked updates. `c1` must be owned by the caller. Alignments
/// run outside any lock and the tombstone check is repeated under the lock
/// before each mutation. Returns true if c1 was absorbed. `noise`, if set, is
/// called between steps.
bool execute_partial_locked(const PartialMergeTask& task, Cluster& c1, LockedClusterSet& set2,
                            const MergeContext& ctx, const std::function<void()>& noise = {});

struct SharedOptions {
  unsigned threads = 1;
  std::uint64_t granularity = kDefaultGranularity;
  /// Inject random yields and short sleeps into partial merges (testing).
  bool scheduling_noise = false;
  std::uint64_t noise_seed = 0;
};

struct SharedRunStats {
  std::uint64_t representative_alignments = 0;
  std::uint64_t member_alignments = 0;
  std::uint64_t set_merges = 0;
  std::uint64_t partial_tasks = 0;
  double wall_seconds = 0.0;

  std::uint64_t total_alignments() const noexcept {
    return representative_alignments + member_alignments;
  }
};

/// Merges the given sets bottom-up until one remains. With one thread this is
/// the plain sequential merge and fully deterministic; with more, set merges
/// are split into partial merges run on a pool, Set-2 clusters are updated in
/// place under per-cluster locks, and the merge tree shape follows completion
/// order.
ClusterSet merge_frontier(std::deque<ClusterSet> sets, const MergeContext& ctx,
                          const SharedOptions& options, SharedRunStats* stats = nullptr);

/// Clusters every sequence of the store.
ClusterSet cluster(const SequenceStore& store, const AlignmentParams& params, const Thresholds& th,
                   const SharedOptions& options, SharedRunStats* stats = nullptr);

}  // namespace clustermerge
