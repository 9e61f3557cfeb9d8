#include "clustermerge/cluster_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace clustermerge {

namespace {

SeqIndex parse_index(const std::string& token, std::size_t line_no) {
  try {
    std::size_t used = 0;
    unsigned long value = std::stoul(token, &used);
    if (used != token.size() || value > UINT32_MAX) throw std::invalid_argument(token);
    return static_cast<SeqIndex>(value);
  } catch (const std::logic_error&) {
    throw InputError("cluster file line " + std::to_string(line_no) + ": bad index '" + token + "'");
  }
}

}  // namespace

RunMetadata RunMetadata::describe(const SequenceStore& store, const AlignmentParams& params,
                                  const Thresholds& th) {
  RunMetadata meta;
  meta.thresholds = th;
  meta.gap_open = params.gap_open;
  meta.gap_extend = params.gap_extend;
  meta.matrix = params.matrix.name();
  meta.dataset_checksum = store.checksum();
  meta.sequence_count = store.size();
  return meta;
}

bool RunMetadata::compatible_with(const RunMetadata& other) const noexcept {
  return thresholds.similarity == other.thresholds.similarity &&
         thresholds.full_merge == other.thresholds.full_merge &&
         thresholds.max_uncovered == other.thresholds.max_uncovered &&
         gap_open == other.gap_open && gap_extend == other.gap_extend &&
         matrix == other.matrix && dataset_checksum == other.dataset_checksum &&
         sequence_count == other.sequence_count;
}

nlohmann::json RunMetadata::to_json() const {
  return {
      {"thresholds",
       {{"similarity", thresholds.similarity},
        {"full_merge", thresholds.full_merge},
        {"max_uncovered", thresholds.max_uncovered}}},
      {"gap_open", gap_open},
      {"gap_extend", gap_extend},
      {"matrix", matrix},
      {"dataset_checksum", dataset_checksum},
      {"sequence_count", sequence_count},
  };
}

RunMetadata RunMetadata::from_json(const nlohmann::json& j) {
  RunMetadata meta;
  try {
    const auto& th = j.at("thresholds");
    meta.thresholds.similarity = th.at("similarity").get<int>();
    meta.thresholds.full_merge = th.at("full_merge").get<int>();
    meta.thresholds.max_uncovered = th.at("max_uncovered").get<int>();
    meta.gap_open = j.at("gap_open").get<int>();
    meta.gap_extend = j.at("gap_extend").get<int>();
    meta.matrix = j.at("matrix").get<std::string>();
    meta.dataset_checksum = j.at("dataset_checksum").get<std::uint64_t>();
    meta.sequence_count = j.at("sequence_count").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed run metadata: ") + e.what());
  }
  return meta;
}

std::filesystem::path sidecar_path(const std::filesystem::path& data_path) {
  return data_path.string() + ".json";
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_clusters(const ClusterSet& set, std::ostream& out) {
  for (const auto& cluster : set.clusters) {
    if (cluster.fully_merged) continue;
    out << cluster.representative << '\t';
    bool first = true;
    for (SeqIndex idx : cluster.members) {
      if (!first) out << ',';
      out << idx;
      first = false;
    }
    out << '\n';
  }
}

ClusterSet read_clusters(std::istream& in) {
  ClusterSet set;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw InputError("cluster file line " + std::to_string(line_no) + ": missing tab");
    }
    Cluster cluster;
    cluster.representative = parse_index(line.substr(0, tab), line_no);
    std::istringstream members(line.substr(tab + 1));
    for (std::string token; std::getline(members, token, ',');) {
      cluster.members.insert(parse_index(token, line_no));
    }
    if (!cluster.members.contains(cluster.representative)) {
      throw InputError("cluster file line " + std::to_string(line_no) +
                       ": representative missing from member list");
    }
    set.clusters.push_back(std::move(cluster));
  }
  return set;
}

void write_clusters(const ClusterSet& set, const std::filesystem::path& path, const RunMetadata& meta) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_clusters(set, out);
  write_json_file(sidecar_path(path), meta.to_json());
}

ClusterSet read_clusters(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open cluster file " + path.string());
  return read_clusters(in);
}

}  // namespace clustermerge
