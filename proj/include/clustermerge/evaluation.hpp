#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <vector>

#include <json.hpp>

#include "clustermerge/cluster.hpp"
#include "clustermerge/cluster_io.hpp"

namespace clustermerge {

struct ScoredPair {
  SeqIndex i = 0;  // i < j
  SeqIndex j = 0;
  int score = 0;

  bool operator==(const ScoredPair&) const = default;
};

/// Significant pairs, sorted by (i, j) and unique.
class PairSet {
 public:
  PairSet() = default;
  PairSet(std::vector<ScoredPair> pairs, RunMetadata meta);

  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  const std::vector<ScoredPair>& pairs() const noexcept { return pairs_; }
  const RunMetadata& metadata() const noexcept { return meta_; }

  bool contains(SeqIndex a, SeqIndex b) const;

 private:
  std::vector<ScoredPair> pairs_;
  RunMetadata meta_;
};

/// Aligns every distinct within-cluster pair once (pairs shared by several
/// clusters are deduplicated first) and keeps those scoring at least T.
/// `alignments`, if given, receives the number of alignments performed.
PairSet extract_pairs(const ClusterSet& clusters, const SequenceStore& store,
                      const AlignmentParams& params, const Thresholds& th, unsigned threads = 1,
                      std::uint64_t* alignments = nullptr);

/// Exhaustive all-against-all ground truth.
PairSet brute_force_pairs(const SequenceStore& store, const AlignmentParams& params,
                          const Thresholds& th, unsigned threads = 1,
                          std::uint64_t* alignments = nullptr);

struct RecallReport {
  std::uint64_t truth_count = 0;
  std::uint64_t found_count = 0;
  std::uint64_t missed_count = 0;
  std::uint64_t anomaly_count = 0;  // found pairs absent from truth
  double recall = 1.0;
  int missed_score_median = 0;
  int missed_score_mean = 0;
  std::vector<int> missed_scores;  // ascending
  std::uint64_t alignments_clustering = 0;
  std::uint64_t alignments_extraction = 0;
  std::uint64_t alignments_oracle = 0;

  nlohmann::json to_json() const;
};

/// Compares found pairs against the oracle. Throws InputError when the two
/// pair sets were produced under different scoring or data. Recall of an
/// empty truth set is 1.
RecallReport recall_report(const PairSet& truth, const PairSet& found);

/// Median of integer scores; the lower of the two middle values for even counts.
int median_score(std::vector<int> scores);

struct ClusterStats {
  std::map<std::size_t, std::size_t> histogram;  // cluster size -> count
  std::size_t total_clusters = 0;
  std::size_t largest = 0;
  double fraction_over_10 = 0.0;
  double fraction_over_100 = 0.0;
  double fraction_over_1000 = 0.0;

  nlohmann::json to_json() const;
  void write_csv(std::ostream& out) const;
};

ClusterStats cluster_stats(const ClusterSet& clusters);

/// Binary pair file: little-endian (i u32, j u32, score i32) triples sorted by
/// (i, j), with the run metadata in a JSON sidecar.
void write_pairs(const PairSet& pairs, const std::filesystem::path& path);
PairSet read_pairs(const std::filesystem::path& path);

}  // namespace clustermerge
