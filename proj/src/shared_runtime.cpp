#include "clustermerge/shared_runtime.hpp"

#include <chrono>
#include <condition_variable>
#include <functional>
#include <random>
#include <thread>

#include "clustermerge/thread_pool.hpp"

namespace clustermerge {

std::vector<PartialMergeTask> split_into_partials(const ClusterSet& cs1, const ClusterSet& cs2,
                                                  const SequenceStore& store,
                                                  std::uint64_t granularity,
                                                  std::uint64_t merge_id) {
  std::vector<PartialMergeTask> tasks;
  for (std::uint32_t i = 0; i < cs1.size(); ++i) {
    const std::uint64_t len1 = store[cs1.clusters[i].representative].length();
    PartialMergeTask task{merge_id, i, 0, 0, 0};
    for (std::uint32_t k = 0; k < cs2.size(); ++k) {
      const std::uint64_t cost = len1 * store[cs2.clusters[k].representative].length();
      if (task.slice_size() > 0 && task.cost_estimate + cost > granularity) {
        tasks.push_back(task);
        task = PartialMergeTask{merge_id, i, k, k, 0};
      }
      task.slice_end = k + 1;
      task.cost_estimate += cost;
    }
    if (task.slice_size() > 0) tasks.push_back(task);
  }
  return tasks;
}

LockedClusterSet::LockedClusterSet(ClusterSet set) {
  slots_.reserve(set.size());
  for (auto& cluster : set.clusters) {
    auto slot = std::make_unique<Slot>();
    slot->merged = cluster.fully_merged;
    slot->cluster = std::move(cluster);
    slots_.push_back(std::move(slot));
  }
}

std::optional<MemberList> LockedClusterSet::snapshot(std::size_t slot) const {
  const Slot& s = *slots_[slot];
  std::lock_guard lock(s.lock);
  if (s.merged.load(std::memory_order_relaxed)) return std::nullopt;
  return s.cluster.members;
}

bool LockedClusterSet::append(std::size_t slot, std::span<const SeqIndex> members) {
  Slot& s = *slots_[slot];
  std::lock_guard lock(s.lock);
  if (s.merged.load(std::memory_order_relaxed)) return false;
  for (SeqIndex idx : members) s.cluster.members.insert(idx);
  return true;
}

std::optional<MemberList> LockedClusterSet::drain(std::size_t slot) {
  Slot& s = *slots_[slot];
  std::lock_guard lock(s.lock);
  if (s.merged.load(std::memory_order_relaxed)) return std::nullopt;
  s.merged.store(true, std::memory_order_release);
  s.cluster.fully_merged = true;
  return s.cluster.members;
}

std::vector<Cluster> LockedClusterSet::take_survivors() {
  std::vector<Cluster> survivors;
  for (auto& slot : slots_) {
    if (!slot->merged.load(std::memory_order_acquire)) survivors.push_back(std::move(slot->cluster));
  }
  return survivors;
}

bool execute_partial_locked(const PartialMergeTask& task, Cluster& c1, LockedClusterSet& set2,
                            const MergeContext& ctx, const std::function<void()>& noise) {
  auto jitter = [&] {
    if (noise) noise();
  };
  for (std::uint32_t slot = task.slice_begin; slot < task.slice_end; ++slot) {
    if (set2.fully_merged(slot)) continue;
    const SeqIndex rep2 = set2.representative(slot);
    const auto align = ctx.align_representatives(c1.representative, rep2);
    const auto verdict = transitivity_check(ctx.store[c1.representative], ctx.store[rep2], align,
                                            ctx.thresholds);
    jitter();

    switch (verdict) {
      case TransitivityVerdict::Dissimilar:
        break;
      case TransitivityVerdict::SecondRepresentsFirst:
        if (!set2.append(slot, c1.members.items())) break;
        c1.fully_merged = true;
        return true;
      case TransitivityVerdict::FirstRepresentsSecond:
        if (auto drained = set2.drain(slot)) {
          for (SeqIndex idx : *drained) c1.members.insert(idx);
        }
        break;
      case TransitivityVerdict::SimilarOnly: {
        auto c2_members = set2.snapshot(slot);
        if (!c2_members) break;
        auto into_c2 = collect_similar(c1.members.items(), c1.representative, *c2_members, rep2, ctx);
        auto into_c1 = collect_similar(c2_members->items(), rep2, c1.members, c1.representative, ctx);
        jitter();
        into_c2.insert(into_c2.begin(), c1.representative);
        set2.append(slot, into_c2);
        c1.members.insert(rep2);
        for (SeqIndex idx : into_c1) c1.members.insert(idx);
        break;
      }
    }
  }
  return false;
}

namespace {

struct ActiveMerge {
  ActiveMerge(std::uint64_t merge_id, ClusterSet cs1, ClusterSet cs2)
      : id(merge_id), set1(std::move(cs1.clusters)), set2(std::move(cs2)) {}

  std::uint64_t id;
  std::vector<Cluster> set1;
  LockedClusterSet set2;
  std::vector<std::vector<PartialMergeTask>> chains;  // per Set-1 slot, run in order
  std::atomic<std::size_t> chains_left{0};
};

class Coordinator {
 public:
  Coordinator(std::deque<ClusterSet> sets, const MergeContext& ctx, const SharedOptions& options)
      : frontier_(std::move(sets)), ctx_(ctx), options_(options), pool_(options.threads) {}

  ClusterSet run() {
    const std::size_t cap = 2 * static_cast<std::size_t>(options_.threads);
    std::unique_lock lock(mutex_);
    for (;;) {
      if (frontier_.size() <= 1 && in_flight_ == 0) break;
      if (frontier_.size() >= 2 && pool_.pending() < cap) {
        ClusterSet cs1 = std::move(frontier_.front());
        frontier_.pop_front();
        ClusterSet cs2 = std::move(frontier_.front());
        frontier_.pop_front();
        ++in_flight_;
        lock.unlock();
        start_merge(std::move(cs1), std::move(cs2));
        lock.lock();
        continue;
      }
      // Woken by merge completions; the timeout re-checks the task cap.
      cv_.wait_for(lock, std::chrono::milliseconds(2));
    }
    lock.unlock();
    pool_.wait_idle();
    if (frontier_.empty()) return {};
    return std::move(frontier_.front());
  }

 private:
  void start_merge(ClusterSet cs1, ClusterSet cs2) {
    const std::uint64_t id = next_id_++;
    auto tasks = split_into_partials(cs1, cs2, ctx_.store, options_.granularity, id);
    auto merge = std::make_shared<ActiveMerge>(id, std::move(cs1), std::move(cs2));
    merge->chains.resize(merge->set1.size());
    for (const auto& task : tasks) merge->chains[task.c1].push_back(task);
    std::erase_if(merge->chains, [](const auto& chain) { return chain.empty(); });
    merge->chains_left = merge->chains.size();
    stats_partials_ += tasks.size();
    ++stats_merges_;

    if (merge->chains.empty()) {
      finish(merge);
      return;
    }
    for (std::size_t chain = 0; chain < merge->chains.size(); ++chain) {
      pool_.submit([this, merge, chain] { run_slice(merge, chain, 0); });
    }
  }

  void run_slice(const std::shared_ptr<ActiveMerge>& merge, std::size_t chain, std::size_t step) {
    const auto& task = merge->chains[chain][step];
    Cluster& c1 = merge->set1[task.c1];
    const bool absorbed = execute_partial_locked(task, c1, merge->set2, ctx_, noise_);
    if (!absorbed && step + 1 < merge->chains[chain].size()) {
      pool_.submit([this, merge, chain, step] { run_slice(merge, chain, step + 1); });
      return;
    }
    if (merge->chains_left.fetch_sub(1, std::memory_order_acq_rel) == 1) finish(merge);
  }

  void finish(const std::shared_ptr<ActiveMerge>& merge) {
    ClusterSet merged;
    for (auto& c : merge->set1) {
      if (!c.fully_merged) merged.clusters.push_back(std::move(c));
    }
    for (auto& c : merge->set2.take_survivors()) merged.clusters.push_back(std::move(c));
    {
      std::lock_guard lock(mutex_);
      frontier_.push_back(std::move(merged));
      --in_flight_;
    }
    cv_.notify_all();
  }

  static void random_noise(std::uint64_t seed) {
    thread_local std::mt19937_64 rng(seed ^ std::hash<std::thread::id>{}(std::this_thread::get_id()));
    const auto roll = rng() % 10;
    if (roll < 5) return;
    if (roll < 8) {
      std::this_thread::yield();
    } else {
      std::this_thread::sleep_for(std::chrono::microseconds(rng() % 100));
    }
  }

 public:
  std::uint64_t stats_merges_ = 0;
  std::atomic<std::uint64_t> stats_partials_{0};

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<ClusterSet> frontier_;
  std::size_t in_flight_ = 0;
  std::atomic<std::uint64_t> next_id_{0};

  const MergeContext& ctx_;
  const SharedOptions& options_;
  std::function<void()> noise_ =
      options_.scheduling_noise ? std::function<void()>([seed = options_.noise_seed] { random_noise(seed); })
                                : std::function<void()>{};
  ThreadPool pool_;
};

}  // namespace

ClusterSet merge_frontier(std::deque<ClusterSet> sets, const MergeContext& ctx,
                          const SharedOptions& options, SharedRunStats* stats) {
  SharedRunStats local;
  SharedRunStats& out = stats ? *stats : local;
  const auto start = std::chrono::steady_clock::now();

  // Count only this run's work even if the caller shares counters.
  AlignmentCounters counters;
  MergeContext run_ctx{ctx.store, ctx.params, ctx.thresholds, &counters};

  ClusterSet result;
  if (options.threads <= 1) {
    out.set_merges = sets.empty() ? 0 : sets.size() - 1;
    out.partial_tasks = 0;
    result = bottom_up_merge(std::move(sets), run_ctx);
  } else {
    Coordinator coordinator(std::move(sets), run_ctx, options);
    result = coordinator.run();
    out.set_merges = coordinator.stats_merges_;
    out.partial_tasks = coordinator.stats_partials_.load();
  }

  out.representative_alignments = counters.representative.load();
  out.member_alignments = counters.member.load();
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (ctx.counters) {
    ctx.counters->representative += out.representative_alignments;
    ctx.counters->member += out.member_alignments;
  }
  return result;
}

ClusterSet cluster(const SequenceStore& store, const AlignmentParams& params, const Thresholds& th,
                   const SharedOptions& options, SharedRunStats* stats) {
  MergeContext ctx{store, params, th, nullptr};
  return merge_frontier(singleton_sets(store, params), ctx, options, stats);
}

}  // namespace clustermerge
