#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "clustermerge/sequence_store.hpp"

namespace clustermerge {

/// Planted-family generator. Each family starts from a random seed sequence
/// drawn from background amino-acid frequencies; every copy receives
/// round(rate * length) point substitutions at distinct positions, with the
/// rate drawn uniformly from [min_rate, max_rate] per copy and each
/// replacement residue drawn from the background distribution excluding the
/// original residue. No insertions or deletions.
struct PlantedFamilyConfig {
  std::size_t families = 100;
  std::size_t copies = 10;
  std::size_t min_length = 80;
  std::size_t max_length = 160;
  double min_rate = 0.05;
  double max_rate = 0.15;
  bool include_seeds = false;  // also emit the unmutated seed of each family
  bool shuffle = true;         // interleave families instead of emitting them in blocks
  std::uint64_t seed = 1;
};

using FastaRecords = std::vector<std::pair<std::string, std::string>>;

FastaRecords generate_planted_families(const PlantedFamilyConfig& config);

/// `count` unrelated random sequences with lengths uniform in [min_length, max_length].
FastaRecords generate_random_sequences(std::size_t count, std::size_t min_length,
                                       std::size_t max_length, std::uint64_t seed);

}  // namespace clustermerge
