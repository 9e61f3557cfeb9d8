#include "clustermerge/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <ostream>

#include "clustermerge/thread_pool.hpp"

namespace clustermerge {

namespace {

std::uint64_t pair_key(SeqIndex a, SeqIndex b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char bytes[4];
  for (int k = 0; k < 4; ++k) bytes[k] = static_cast<char>((v >> (8 * k)) & 0xff);
  out.write(bytes, 4);
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

// Scores the given keys in parallel and keeps the significant ones.
std::vector<ScoredPair> score_keys(const std::vector<std::uint64_t>& keys, const SequenceStore& store,
                                   const AlignmentParams& params, const Thresholds& th,
                                   unsigned threads) {
  std::vector<int> scores(keys.size());
  auto body = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      scores[k] = sw_score(store[static_cast<SeqIndex>(keys[k] >> 32)],
                           store[static_cast<SeqIndex>(keys[k])], params);
    }
  };
  if (threads <= 1) {
    body(0, keys.size());
  } else {
    ThreadPool pool(threads);
    parallel_for(pool, keys.size(), 256, body);
  }
  std::vector<ScoredPair> pairs;
  for (std::size_t k = 0; k < keys.size(); ++k) {
    if (is_similar(scores[k], th)) {
      pairs.push_back({static_cast<SeqIndex>(keys[k] >> 32), static_cast<SeqIndex>(keys[k]), scores[k]});
    }
  }
  return pairs;
}

}  // namespace

PairSet::PairSet(std::vector<ScoredPair> pairs, RunMetadata meta)
    : pairs_(std::move(pairs)), meta_(std::move(meta)) {
  for (auto& p : pairs_) {
    if (p.i > p.j) std::swap(p.i, p.j);
  }
  std::sort(pairs_.begin(), pairs_.end(), [](const ScoredPair& a, const ScoredPair& b) {
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end(),
                           [](const ScoredPair& a, const ScoredPair& b) { return a.i == b.i && a.j == b.j; }),
               pairs_.end());
  std::erase_if(pairs_, [](const ScoredPair& p) { return p.i == p.j; });
}

bool PairSet::contains(SeqIndex a, SeqIndex b) const {
  if (a > b) std::swap(a, b);
  auto it = std::lower_bound(pairs_.begin(), pairs_.end(), std::pair{a, b},
                             [](const ScoredPair& p, const std::pair<SeqIndex, SeqIndex>& key) {
                               return std::tie(p.i, p.j) < std::tie(key.first, key.second);
                             });
  return it != pairs_.end() && it->i == a && it->j == b;
}

PairSet extract_pairs(const ClusterSet& clusters, const SequenceStore& store,
                      const AlignmentParams& params, const Thresholds& th, unsigned threads,
                      std::uint64_t* alignments) {
  std::vector<std::uint64_t> keys;
  for (const auto& cluster : clusters.clusters) {
    if (cluster.fully_merged) continue;
    auto members = cluster.members.items();
    for (std::size_t x = 0; x < members.size(); ++x) {
      for (std::size_t y = x + 1; y < members.size(); ++y) {
        if (members[x] != members[y]) keys.push_back(pair_key(members[x], members[y]));
      }
    }
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  if (alignments) *alignments = keys.size();
  return PairSet(score_keys(keys, store, params, th, threads), RunMetadata::describe(store, params, th));
}

PairSet brute_force_pairs(const SequenceStore& store, const AlignmentParams& params,
                          const Thresholds& th, unsigned threads, std::uint64_t* alignments) {
  const std::size_t n = store.size();
  std::vector<std::vector<ScoredPair>> rows(n);
  auto body = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const int score = sw_score(store[static_cast<SeqIndex>(i)], store[static_cast<SeqIndex>(j)], params);
        if (is_similar(score, th)) {
          rows[i].push_back({static_cast<SeqIndex>(i), static_cast<SeqIndex>(j), score});
        }
      }
    }
  };
  if (threads <= 1) {
    body(0, n);
  } else {
    ThreadPool pool(threads);
    parallel_for(pool, n, 8, body);
  }
  std::vector<ScoredPair> pairs;
  for (auto& row : rows) pairs.insert(pairs.end(), row.begin(), row.end());
  if (alignments) *alignments = n < 2 ? 0 : static_cast<std::uint64_t>(n) * (n - 1) / 2;
  return PairSet(std::move(pairs), RunMetadata::describe(store, params, th));
}

int median_score(std::vector<int> scores) {
  if (scores.empty()) return 0;
  std::sort(scores.begin(), scores.end());
  return scores[(scores.size() - 1) / 2];
}

RecallReport recall_report(const PairSet& truth, const PairSet& found) {
  if (!truth.metadata().compatible_with(found.metadata())) {
    throw InputError("pair sets were produced with different parameters or datasets");
  }
  RecallReport report;
  report.truth_count = truth.size();
  report.found_count = found.size();

  const auto& t = truth.pairs();
  const auto& f = found.pairs();
  std::size_t a = 0, b = 0;
  auto less = [](const ScoredPair& x, const ScoredPair& y) { return std::tie(x.i, x.j) < std::tie(y.i, y.j); };
  while (a < t.size() || b < f.size()) {
    if (b == f.size() || (a < t.size() && less(t[a], f[b]))) {
      report.missed_scores.push_back(t[a].score);
      ++a;
    } else if (a == t.size() || less(f[b], t[a])) {
      ++report.anomaly_count;
      ++b;
    } else {
      ++a;
      ++b;
    }
  }
  std::sort(report.missed_scores.begin(), report.missed_scores.end());
  report.missed_count = report.missed_scores.size();
  if (report.truth_count > 0) {
    report.recall = static_cast<double>(report.truth_count - report.missed_count) /
                    static_cast<double>(report.truth_count);
  }
  if (!report.missed_scores.empty()) {
    report.missed_score_median = median_score(report.missed_scores);
    const double sum = std::accumulate(report.missed_scores.begin(), report.missed_scores.end(), 0.0);
    report.missed_score_mean = static_cast<int>(std::lround(sum / static_cast<double>(report.missed_count)));
  }
  return report;
}

nlohmann::json RecallReport::to_json() const {
  return {
      {"truth_count", truth_count},
      {"found_count", found_count},
      {"missed_count", missed_count},
      {"anomaly_count", anomaly_count},
      {"recall", recall},
      {"missed_score_median", missed_score_median},
      {"missed_score_mean", missed_score_mean},
      {"missed_scores", missed_scores},
      {"alignments_clustering", alignments_clustering},
      {"alignments_extraction", alignments_extraction},
      {"alignments_oracle", alignments_oracle},
  };
}

ClusterStats cluster_stats(const ClusterSet& clusters) {
  ClusterStats stats;
  std::size_t over_10 = 0, over_100 = 0, over_1000 = 0;
  for (const auto& cluster : clusters.clusters) {
    if (cluster.fully_merged) continue;
    const std::size_t size = cluster.members.size();
    ++stats.histogram[size];
    ++stats.total_clusters;
    stats.largest = std::max(stats.largest, size);
    over_10 += size > 10;
    over_100 += size > 100;
    over_1000 += size > 1000;
  }
  if (stats.total_clusters > 0) {
    const auto total = static_cast<double>(stats.total_clusters);
    stats.fraction_over_10 = static_cast<double>(over_10) / total;
    stats.fraction_over_100 = static_cast<double>(over_100) / total;
    stats.fraction_over_1000 = static_cast<double>(over_1000) / total;
  }
  return stats;
}

nlohmann::json ClusterStats::to_json() const {
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [size, count] : histogram) hist[std::to_string(size)] = count;
  return {
      {"total_clusters", total_clusters},
      {"largest", largest},
      {"fraction_over_10", fraction_over_10},
      {"fraction_over_100", fraction_over_100},
      {"fraction_over_1000", fraction_over_1000},
      {"histogram", hist},
  };
}

void ClusterStats::write_csv(std::ostream& out) const {
  out << "size,count\n";
  for (const auto& [size, count] : histogram) out << size << ',' << count << '\n';
}

void write_pairs(const PairSet& pairs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  for (const auto& p : pairs.pairs()) {
    put_u32(out, p.i);
    put_u32(out, p.j);
    put_u32(out, static_cast<std::uint32_t>(p.score));
  }
  write_json_file(sidecar_path(path), pairs.metadata().to_json());
}

PairSet read_pairs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open pair file " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() % 12 != 0) throw InputError(path.string() + ": truncated pair file");
  std::vector<ScoredPair> pairs;
  pairs.reserve(bytes.size() / 12);
  for (std::size_t off = 0; off < bytes.size(); off += 12) {
    pairs.push_back({get_u32(&bytes[off]), get_u32(&bytes[off + 4]),
                     static_cast<int>(get_u32(&bytes[off + 8]))});
  }
  return PairSet(std::move(pairs), RunMetadata::from_json(read_json_file(sidecar_path(path))));
}

}  // namespace clustermerge
