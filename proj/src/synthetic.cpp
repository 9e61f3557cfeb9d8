#include "clustermerge/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

namespace clustermerge {

namespace {

// Robinson & Robinson background frequencies, ARNDCQEGHILKMFPSTWYV.
constexpr std::array<double, 20> kBackground = {
    0.07805, 0.05129, 0.04487, 0.05364, 0.01925, 0.04264, 0.06295, 0.07377, 0.02199, 0.05142,
    0.09019, 0.05744, 0.02243, 0.03856, 0.05203, 0.07120, 0.05841, 0.01330, 0.03216, 0.06441,
};

class ResidueSampler {
 public:
  ResidueSampler() : dist_(kBackground.begin(), kBackground.end()) {}

  char draw(std::mt19937_64& rng) { return kAlphabet[dist_(rng)]; }

  char draw_other(std::mt19937_64& rng, char original) {
    for (;;) {
      char c = draw(rng);
      if (c != original) return c;
    }
  }

 private:
  std::discrete_distribution<int> dist_;
};

std::string random_sequence(std::mt19937_64& rng, ResidueSampler& sampler, std::size_t min_length,
                            std::size_t max_length) {
  std::uniform_int_distribution<std::size_t> length(min_length, max_length);
  std::string seq(length(rng), 'A');
  for (auto& c : seq) c = sampler.draw(rng);
  return seq;
}

}  // namespace

FastaRecords generate_planted_families(const PlantedFamilyConfig& config) {
  std::mt19937_64 rng(config.seed);
  ResidueSampler sampler;
  std::uniform_real_distribution<double> rate(config.min_rate, config.max_rate);
  FastaRecords records;

  for (std::size_t f = 0; f < config.families; ++f) {
    const std::string seed = random_sequence(rng, sampler, config.min_length, config.max_length);
    if (config.include_seeds) records.emplace_back("fam" + std::to_string(f) + "_seed", seed);

    std::vector<std::size_t> positions(seed.size());
    std::iota(positions.begin(), positions.end(), 0);
    for (std::size_t c = 0; c < config.copies; ++c) {
      std::string copy = seed;
      const auto substitutions = static_cast<std::size_t>(std::lround(rate(rng) * static_cast<double>(seed.size())));
      std::shuffle(positions.begin(), positions.end(), rng);
      for (std::size_t k = 0; k < std::min(substitutions, positions.size()); ++k) {
        copy[positions[k]] = sampler.draw_other(rng, copy[positions[k]]);
      }
      records.emplace_back("fam" + std::to_string(f) + "_copy" + std::to_string(c), std::move(copy));
    }
  }
  if (config.shuffle) std::shuffle(records.begin(), records.end(), rng);
  return records;
}

FastaRecords generate_random_sequences(std::size_t count, std::size_t min_length,
                                       std::size_t max_length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ResidueSampler sampler;
  FastaRecords records;
  records.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    records.emplace_back("rand" + std::to_string(i), random_sequence(rng, sampler, min_length, max_length));
  }
  return records;
}

}  // namespace clustermerge
