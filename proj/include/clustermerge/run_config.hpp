#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "clustermerge/alignment.hpp"

namespace clustermerge {

/// Every knob a command-line run can set. The CLI layers defaults, then an
/// optional INI/TOML-style key=value file, then explicit flags.
struct RunConfig {
  std::string mode = "cluster";
  std::string input;
  std::string output;
  std::string report;
  std::string truth;
  std::string found;

  Thresholds thresholds;
  int gap_open = 37;
  int gap_extend = 7;
  std::string matrix = "pam250";  // builtin name or path

  unsigned threads = 0;  // 0: detected core count
  std::uint64_t granularity = 4'000'000;
  std::size_t batch_size = 32;

  std::string listen = ":9000";
  std::string connect = "127.0.0.1:9000";
  unsigned worker_timeout_s = 60;

  std::uint64_t seed = 1;

  unsigned effective_threads() const;

  /// Loads the matrix and validates penalties. Throws InputError.
  AlignmentParams alignment_params() const;

  nlohmann::json to_json() const;
};

}  // namespace clustermerge
