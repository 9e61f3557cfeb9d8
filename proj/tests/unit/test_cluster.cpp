#include <doctest.h>

#include <random>

#include "../support/test_support.hpp"
#include "clustermerge/cluster.hpp"
#include "clustermerge/evaluation.hpp"

using namespace clustermerge;
using testsupport::check_invariants;
using testsupport::store_of;

namespace {

const std::string kCore(12, 'W');  // scores 204 against itself
const std::string kStrong = "WCWHYKMFWCWHYKMFWCWHWCWHYKMFWCWHYKMFWCWH";  // 432

struct Fixture {
  SequenceStore store;
  AlignmentParams params;
  Thresholds th;
  AlignmentCounters counters;
  MergeContext ctx() { return {store, params, th, &counters}; }
  Cluster single(SeqIndex i) { return Cluster::singleton(store[i], params); }
};

std::vector<SeqIndex> members(const Cluster& c) { return {c.members.begin(), c.members.end()}; }

}  // namespace

TEST_CASE("member list keeps insertion order without duplicates") {
  MemberList list(5);
  CHECK(list.insert(3));
  CHECK_FALSE(list.insert(5));
  for (SeqIndex i = 100; i < 200; ++i) list.insert(i);  // crosses the hash threshold
  CHECK_FALSE(list.insert(150));
  CHECK(list.contains(199));
  CHECK_FALSE(list.contains(7));
  CHECK(list.size() == 102);
  MemberList copy = list;
  CHECK_FALSE(copy.insert(3));
  CHECK(copy.items()[1] == 3);
}

TEST_CASE("transitivity verdicts") {
  const auto store = store_of({std::string(20, 'A'), std::string(300, 'A')});
  const Thresholds th;
  const auto& a = store[0];
  const auto& b = store[1];
  SUBCASE("second covers first") {
    // uncovered(A)=3, uncovered(B)=200
    AlignmentResult r{260, {0, 17}, {0, 100}};
    CHECK(transitivity_check(a, b, r, th) == TransitivityVerdict::SecondRepresentsFirst);
  }
  SUBCASE("first covers second only") {
    AlignmentResult r{260, {0, 2}, {10, 298}};
    CHECK(transitivity_check(a, b, r, th) == TransitivityVerdict::FirstRepresentsSecond);
  }
  SUBCASE("both covered: second wins") {
    const auto same = store_of({std::string(20, 'A'), std::string(20, 'A')});
    AlignmentResult r{260, {0, 20}, {0, 20}};
    CHECK(transitivity_check(same[0], same[1], r, th) == TransitivityVerdict::SecondRepresentsFirst);
  }
  SUBCASE("similar below full-merge score") {
    AlignmentResult r{200, {0, 20}, {0, 20}};
    CHECK(transitivity_check(a, b, r, th) == TransitivityVerdict::SimilarOnly);
  }
  SUBCASE("high score but both sides poorly covered") {
    AlignmentResult r{300, {0, 2}, {0, 100}};  // 18 and 200 uncovered
    CHECK(transitivity_check(a, b, r, th) == TransitivityVerdict::SimilarOnly);
  }
  SUBCASE("uncovered must be strictly below the limit") {
    AlignmentResult r{300, {0, 5}, {0, 285}};  // 15 and 15 uncovered
    CHECK(transitivity_check(a, b, r, th) == TransitivityVerdict::SimilarOnly);
  }
  SUBCASE("dissimilar") {
    AlignmentResult r{180, {0, 20}, {0, 20}};
    CHECK(transitivity_check(a, b, r, th) == TransitivityVerdict::Dissimilar);
  }
}

TEST_CASE("exchange copies similar members both ways") {
  Fixture f{store_of({std::string(30, 'D') + kCore,  // 0: rep 1
                      kCore + std::string(30, 'K'),  // 1: rep 2
                      kCore + "KKKKK",               // 2: similar to both reps
                      std::string(40, 'P')})};       // 3: similar to nothing
  auto ctx = f.ctx();
  Cluster c1 = f.single(0);
  c1.members.insert(2);
  c1.members.insert(3);
  Cluster c2 = f.single(1);
  CHECK(merge_clusters(c1, c2, ctx) == MergeOutcome::Exchanged);
  CHECK(members(c2) == std::vector<SeqIndex>{1, 0, 2});
  CHECK(members(c1) == std::vector<SeqIndex>{0, 2, 3, 1});
  CHECK(c1.representative == 0);
  CHECK(c2.representative == 1);
  // One representative alignment; members 2 and 3 scored against rep 2.
  CHECK(f.counters.representative == 1);
  CHECK(f.counters.member == 2);

  SUBCASE("members already present are not re-added") {
    Cluster again = f.single(1);
    again.members.insert(2);
    f.counters.reset();
    exchange_similar(c1, again, ctx);
    CHECK(members(again) == std::vector<SeqIndex>{1, 2, 0});
    CHECK(f.counters.member == 1);  // only 3 needed scoring
  }
}

TEST_CASE("full merges dedup and tombstone") {
  Fixture f{store_of({kStrong, kStrong, "PPPPPPPPPP"})};
  auto ctx = f.ctx();
  Cluster c1 = f.single(0);
  Cluster c2 = f.single(1);
  c1.members.insert(2);
  c2.members.insert(2);
  CHECK(merge_clusters(c1, c2, ctx) == MergeOutcome::MergedIntoSecond);
  CHECK(c1.fully_merged);
  CHECK(members(c2) == std::vector<SeqIndex>{1, 2, 0});

  Cluster d1 = f.single(0);
  Cluster d2 = f.single(2);
  CHECK(merge_clusters(d1, d2, ctx) == MergeOutcome::Untouched);
  CHECK(members(d1) == std::vector<SeqIndex>{0});
}

TEST_CASE("first absorbs second when only it covers") {
  // rep 0 contains rep 1 plus a long tail; 1 is fully covered, 0 is not.
  Fixture f{store_of({kStrong + std::string(40, 'P'), kStrong})};
  auto ctx = f.ctx();
  Cluster c1 = f.single(0);
  Cluster c2 = f.single(1);
  // B (=1) fully covered -> SecondRepresentsFirst needs uncovered(A) < 15; A has 40 uncovered.
  CHECK(merge_clusters(c1, c2, ctx) == MergeOutcome::MergedIntoFirst);
  CHECK(c2.fully_merged);
  CHECK(members(c1) == std::vector<SeqIndex>{0, 1});
}

TEST_CASE("set merge edge cases") {
  Fixture f{testsupport::planted_store(0, 0, 1, 6)};  // 6 unrelated sequences
  auto ctx = f.ctx();
  auto sets = singleton_sets(f.store, f.params);
  REQUIRE(sets.size() == 6);

  SUBCASE("empty side is the identity") {
    ClusterSet x = sets[0];
    const auto merged = merge_sets(x, ClusterSet{}, ctx);
    CHECK(merged.size() == 1);
    CHECK(merge_sets(ClusterSet{}, x, ctx).size() == 1);
  }
  SUBCASE("dissimilar sets cost exactly m*n representative alignments") {
    ClusterSet a, b;
    for (int i = 0; i < 2; ++i) a.clusters.push_back(sets[i].clusters[0]);
    for (int i = 2; i < 6; ++i) b.clusters.push_back(sets[i].clusters[0]);
    const auto merged = merge_sets(a, b, ctx);
    CHECK(f.counters.representative == 8);
    REQUIRE(merged.size() == 6);
    for (SeqIndex i = 0; i < 6; ++i) CHECK(merged.clusters[i].representative == i);
  }
}

TEST_CASE("bottom-up merge: identical sequences collapse, dissimilar stay apart") {
  SUBCASE("identical") {
    std::vector<std::string> seqs(9, kStrong);
    Fixture f{store_of(seqs)};
    const auto result = bottom_up_merge(singleton_sets(f.store, f.params), f.ctx());
    REQUIRE(result.size() == 1);
    CHECK(result.clusters[0].members.size() == 9);
    CHECK(check_invariants(result, 9).empty());
  }
  SUBCASE("dissimilar") {
    Fixture f{testsupport::planted_store(0, 0, 3, 16)};
    const auto result = bottom_up_merge(singleton_sets(f.store, f.params), f.ctx());
    CHECK(result.size() == 16);
    CHECK(f.counters.representative == 16 * 15 / 2);
  }
  SUBCASE("single and empty") {
    Fixture f{store_of({"ACD"})};
    CHECK(bottom_up_merge(singleton_sets(f.store, f.params), f.ctx()).size() == 1);
    Fixture e;
    CHECK(bottom_up_merge(singleton_sets(e.store, e.params), e.ctx()).empty());
  }
}

TEST_CASE("randomized set merges keep every invariant") {
  std::mt19937_64 rng(99);
  for (std::uint64_t trial = 0; trial < 15; ++trial) {
    Fixture f{testsupport::planted_store(4, 5, 100 + trial, 5)};
    auto sets = singleton_sets(f.store, f.params);
    std::shuffle(sets.begin(), sets.end(), rng);
    const std::size_t before = sets.size();
    const auto result = bottom_up_merge(std::move(sets), f.ctx());
    CHECK(result.size() <= before);
    CHECK(check_invariants(result, f.store.size()) == "");
    CHECK(f.counters.representative <= before * (before - 1) / 2);
  }
}

TEST_CASE("full-merge soundness by replay") {
  // Every absorption must be justified by a fresh alignment of the representatives.
  Fixture f{testsupport::planted_store(3, 6, 17)};
  auto ctx = f.ctx();
  auto sets = singleton_sets(f.store, f.params);
  std::vector<Cluster> pool;
  for (auto& s : sets) pool.push_back(s.clusters[0]);
  std::mt19937_64 rng(5);
  for (int step = 0; step < 200; ++step) {
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::size_t i = pick(rng), j = pick(rng);
    if (i == j || pool[i].fully_merged || pool[j].fully_merged) continue;
    const auto outcome = merge_clusters(pool[i], pool[j], ctx);
    if (outcome != MergeOutcome::MergedIntoFirst && outcome != MergeOutcome::MergedIntoSecond) continue;
    const auto& absorber = outcome == MergeOutcome::MergedIntoSecond ? pool[j] : pool[i];
    const auto& absorbed = outcome == MergeOutcome::MergedIntoSecond ? pool[i] : pool[j];
    CHECK(absorbed.fully_merged);
    const auto r = sw_align(f.store[absorbed.representative], f.store[absorber.representative], f.params);
    CHECK(r.score >= f.th.full_merge);
    CHECK(uncovered(r, Side::A, f.store[absorbed.representative].length()) <
          static_cast<std::uint32_t>(f.th.max_uncovered));
    for (SeqIndex m : absorbed.members) CHECK(absorber.members.contains(m));
  }
}

TEST_CASE("small family instances: every significant pair ends up co-clustered") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    PlantedFamilyConfig cfg;
    cfg.families = 1;
    cfg.copies = 12;
    cfg.min_rate = 0.0;
    cfg.max_rate = 0.05;
    cfg.seed = seed;
    Fixture f{SequenceStore::from_records(generate_planted_families(cfg))};
    const auto result = bottom_up_merge(singleton_sets(f.store, f.params), f.ctx());
    const auto truth = brute_force_pairs(f.store, f.params, f.th);
    const auto found = extract_pairs(result, f.store, f.params, f.th);
    CHECK(recall_report(truth, found).missed_count == 0);
  }
}
