#include "clustermerge/cluster.hpp"

#include <algorithm>

namespace clustermerge {

MemberList::MemberList(const MemberList& other) : items_(other.items_) {
  if (other.index_) index_ = std::make_unique<std::unordered_set<SeqIndex>>(*other.index_);
}

MemberList& MemberList::operator=(const MemberList& other) {
  if (this != &other) *this = MemberList(other);
  return *this;
}

bool MemberList::contains(SeqIndex idx) const {
  if (index_) return index_->contains(idx);
  return std::find(items_.begin(), items_.end(), idx) != items_.end();
}

bool MemberList::insert(SeqIndex idx) {
  if (contains(idx)) return false;
  items_.push_back(idx);
  if (index_) {
    index_->insert(idx);
  } else if (items_.size() > kLinearLimit) {
    index_ = std::make_unique<std::unordered_set<SeqIndex>>(items_.begin(), items_.end());
  }
  return true;
}

Cluster Cluster::singleton(const Sequence& seq, const AlignmentParams& params) {
  return Cluster(seq.index, self_score(seq, params));
}

AlignmentResult MergeContext::align_representatives(SeqIndex a, SeqIndex b) const {
  if (counters) counters->representative.fetch_add(1, std::memory_order_relaxed);
  // Spans only matter once a full merge is possible; the score-only pass is
  // several times cheaper and the verdict is unchanged.
  const int score = sw_score(store[a], store[b], params);
  if (score < thresholds.full_merge) return {score, {}, {}};
  return sw_align(store[a], store[b], params);
}

int MergeContext::score_member(SeqIndex member, SeqIndex rep) const {
  if (counters) counters->member.fetch_add(1, std::memory_order_relaxed);
  return sw_score(store[member], store[rep], params);
}

TransitivityVerdict transitivity_check(const Sequence& rep_a, const Sequence& rep_b,
                                       const AlignmentResult& align, const Thresholds& th) {
  if (!is_similar(align.score, th)) return TransitivityVerdict::Dissimilar;
  if (align.score >= th.full_merge) {
    const auto max_uncovered = static_cast<std::uint32_t>(th.max_uncovered);
    if (uncovered(align, Side::A, rep_a.length()) < max_uncovered) {
      return TransitivityVerdict::SecondRepresentsFirst;
    }
    if (uncovered(align, Side::B, rep_b.length()) < max_uncovered) {
      return TransitivityVerdict::FirstRepresentsSecond;
    }
  }
  return TransitivityVerdict::SimilarOnly;
}

std::vector<SeqIndex> collect_similar(std::span<const SeqIndex> source, SeqIndex source_rep,
                                      const MemberList& target, SeqIndex target_rep,
                                      const MergeContext& ctx) {
  std::vector<SeqIndex> similar;
  for (SeqIndex member : source) {
    if (member == source_rep || target.contains(member)) continue;
    if (is_similar(ctx.score_member(member, target_rep), ctx.thresholds)) similar.push_back(member);
  }
  return similar;
}

void exchange_similar(Cluster& c1, Cluster& c2, const MergeContext& ctx) {
  auto into_c2 = collect_similar(c1.members.items(), c1.representative, c2.members, c2.representative, ctx);
  auto into_c1 = collect_similar(c2.members.items(), c2.representative, c1.members, c1.representative, ctx);
  c2.members.insert(c1.representative);
  for (SeqIndex idx : into_c2) c2.members.insert(idx);
  c1.members.insert(c2.representative);
  for (SeqIndex idx : into_c1) c1.members.insert(idx);
}

MergeOutcome merge_clusters(Cluster& c1, Cluster& c2, const MergeContext& ctx) {
  const auto align = ctx.align_representatives(c1.representative, c2.representative);
  const auto verdict = transitivity_check(ctx.store[c1.representative], ctx.store[c2.representative],
                                          align, ctx.thresholds);
  switch (verdict) {
    case TransitivityVerdict::SecondRepresentsFirst:
      for (SeqIndex idx : c1.members) c2.members.insert(idx);
      c1.fully_merged = true;
      return MergeOutcome::MergedIntoSecond;
    case TransitivityVerdict::FirstRepresentsSecond:
      for (SeqIndex idx : c2.members) c1.members.insert(idx);
      c2.fully_merged = true;
      return MergeOutcome::MergedIntoFirst;
    case TransitivityVerdict::SimilarOnly:
      exchange_similar(c1, c2, ctx);
      return MergeOutcome::Exchanged;
    case TransitivityVerdict::Dissimilar:
      break;
  }
  return MergeOutcome::Untouched;
}

std::optional<std::size_t> merge_into_slice(Cluster& c1, std::span<Cluster> slice,
                                            const MergeContext& ctx) {
  for (std::size_t k = 0; k < slice.size(); ++k) {
    if (slice[k].fully_merged) continue;
    if (merge_clusters(c1, slice[k], ctx) == MergeOutcome::MergedIntoSecond) return k;
  }
  return std::nullopt;
}

ClusterSet merge_sets(ClusterSet cs1, ClusterSet cs2, const MergeContext& ctx) {
  for (Cluster& c1 : cs1.clusters) {
    if (c1.fully_merged) continue;
    merge_into_slice(c1, cs2.clusters, ctx);
  }
  ClusterSet merged;
  merged.clusters.reserve(cs1.size() + cs2.size());
  for (auto* set : {&cs1, &cs2}) {
    for (Cluster& c : set->clusters) {
      if (!c.fully_merged) merged.clusters.push_back(std::move(c));
    }
  }
  return merged;
}

std::deque<ClusterSet> singleton_sets(const SequenceStore& store, const AlignmentParams& params) {
  std::deque<ClusterSet> sets;
  for (const auto& seq : store.sequences()) {
    ClusterSet set;
    set.clusters.push_back(Cluster::singleton(seq, params));
    sets.push_back(std::move(set));
  }
  return sets;
}

ClusterSet bottom_up_merge(std::deque<ClusterSet> sets, const MergeContext& ctx) {
  if (sets.empty()) return {};
  while (sets.size() > 1) {
    ClusterSet cs1 = std::move(sets.front());
    sets.pop_front();
    ClusterSet cs2 = std::move(sets.front());
    sets.pop_front();
    sets.push_back(merge_sets(std::move(cs1), std::move(cs2), ctx));
  }
  return std::move(sets.front());
}

void remove_tombstones(ClusterSet& set) {
  std::erase_if(set.clusters, [](const Cluster& c) { return c.fully_merged; });
}

}  // namespace clustermerge
