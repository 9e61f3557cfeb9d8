#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "clustermerge/alignment.hpp"
#include "clustermerge/cluster.hpp"

namespace clustermerge {

/// Parameters that determine a run's output; stored next to every cluster and
/// pair file so results from different runs can be checked for compatibility.
struct RunMetadata {
  Thresholds thresholds;
  int gap_open = 37;
  int gap_extend = 7;
  std::string matrix = "PAM250";
  std::uint64_t dataset_checksum = 0;
  std::uint64_t sequence_count = 0;

  static RunMetadata describe(const SequenceStore& store, const AlignmentParams& params,
                              const Thresholds& th);

  /// True when both describe the same scoring (thresholds, gaps, matrix) and dataset.
  bool compatible_with(const RunMetadata& other) const noexcept;

  nlohmann::json to_json() const;
  static RunMetadata from_json(const nlohmann::json& j);
};

/// Sidecar location for a data file: "<path>.json".
std::filesystem::path sidecar_path(const std::filesystem::path& data_path);

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

/// One cluster per line: representative, a tab, then the comma-separated
/// members in insertion order (representative first).
void write_clusters(const ClusterSet& set, std::ostream& out);
ClusterSet read_clusters(std::istream& in);

void write_clusters(const ClusterSet& set, const std::filesystem::path& path, const RunMetadata& meta);
ClusterSet read_clusters(const std::filesystem::path& path);

}  // namespace clustermerge
