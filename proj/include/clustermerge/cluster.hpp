#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "clustermerge/alignment.hpp"
#include "clustermerge/sequence_store.hpp"

namespace clustermerge {

/// Insertion-ordered, duplicate-free list of sequence indices. Small lists are
/// searched linearly; a hash index is built once the list grows.
class MemberList {
 public:
  MemberList() = default;
  explicit MemberList(SeqIndex first) { items_.push_back(first); }

  MemberList(const MemberList& other);
  MemberList& operator=(const MemberList& other);
  MemberList(MemberList&&) noexcept = default;
  MemberList& operator=(MemberList&&) noexcept = default;

  bool contains(SeqIndex idx) const;
  /// Appends idx unless already present. Returns true if it was added.
  bool insert(SeqIndex idx);

  std::span<const SeqIndex> items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  auto begin() const noexcept { return items_.begin(); }
  auto end() const noexcept { return items_.end(); }

 private:
  static constexpr std::size_t kLinearLimit = 24;

  std::vector<SeqIndex> items_;
  std::unique_ptr<std::unordered_set<SeqIndex>> index_;
};

struct Cluster {
  SeqIndex representative = 0;
  MemberList members;
  bool fully_merged = false;
  int rep_self_score = 0;

  Cluster() = default;
  Cluster(SeqIndex rep, int self_score) : representative(rep), members(rep), rep_self_score(self_score) {}

  static Cluster singleton(const Sequence& seq, const AlignmentParams& params);
};

struct ClusterSet {
  std::vector<Cluster> clusters;

  std::size_t size() const noexcept { return clusters.size(); }
  bool empty() const noexcept { return clusters.empty(); }
};

enum class TransitivityVerdict {
  FirstRepresentsSecond,
  SecondRepresentsFirst,
  SimilarOnly,
  Dissimilar,
};

enum class MergeOutcome { MergedIntoFirst, MergedIntoSecond, Exchanged, Untouched };

/// Alignment work performed, split by purpose.
struct AlignmentCounters {
  std::atomic<std::uint64_t> representative{0};
  std::atomic<std::uint64_t> member{0};

  std::uint64_t total() const noexcept { return representative.load() + member.load(); }
  void reset() noexcept {
    representative = 0;
    member = 0;
  }
};

/// Everything a merge needs to score sequences.
struct MergeContext {
  const SequenceStore& store;
  const AlignmentParams& params;
  const Thresholds& thresholds;
  AlignmentCounters* counters = nullptr;

  /// Spans are only filled in when the score reaches the full-merge threshold.
  AlignmentResult align_representatives(SeqIndex a, SeqIndex b) const;
  int score_member(SeqIndex member, SeqIndex rep) const;
};

/// Decides whether one representative can stand in for the other. The second
/// representative covering the first is checked before the reverse.
TransitivityVerdict transitivity_check(const Sequence& rep_a, const Sequence& rep_b,
                                       const AlignmentResult& align, const Thresholds& th);

/// Members of `source` (representative excluded, members already in `target`
/// skipped) scoring at least T against `target_rep`.
std::vector<SeqIndex> collect_similar(std::span<const SeqIndex> source, SeqIndex source_rep,
                                      const MemberList& target, SeqIndex target_rep,
                                      const MergeContext& ctx);

/// Cross-copies members similar to the other cluster's representative. Both
/// sides are evaluated against the clusters as they were on entry; the
/// representatives are exchanged without re-alignment.
void exchange_similar(Cluster& c1, Cluster& c2, const MergeContext& ctx);

/// Aligns the representatives and applies the verdict.
MergeOutcome merge_clusters(Cluster& c1, Cluster& c2, const MergeContext& ctx);

/// Inner loop of the set merge: c1 against every live cluster of `slice`,
/// stopping as soon as c1 is absorbed. Returns the position in `slice` of the
/// cluster that absorbed c1, if any.
std::optional<std::size_t> merge_into_slice(Cluster& c1, std::span<Cluster> slice,
                                            const MergeContext& ctx);

/// Cluster set merge. Result holds the surviving clusters of cs1 followed by
/// those of cs2. Not commutative.
ClusterSet merge_sets(ClusterSet cs1, ClusterSet cs2, const MergeContext& ctx);

/// One singleton set per sequence, in store order.
std::deque<ClusterSet> singleton_sets(const SequenceStore& store, const AlignmentParams& params);

/// Sequential bottom-up merge over a FIFO of sets until one remains.
ClusterSet bottom_up_merge(std::deque<ClusterSet> sets, const MergeContext& ctx);

/// Drops tombstoned clusters.
void remove_tombstones(ClusterSet& set);

}  // namespace clustermerge
