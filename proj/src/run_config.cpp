#include "clustermerge/run_config.hpp"

#include <algorithm>
#include <thread>

namespace clustermerge {

unsigned RunConfig::effective_threads() const {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

AlignmentParams RunConfig::alignment_params() const {
  AlignmentParams params;
  if (matrix != "pam250" && matrix != "PAM250") params.matrix = load_matrix(matrix);
  params.gap_open = gap_open;
  params.gap_extend = gap_extend;
  params.validate();
  thresholds.validate();
  return params;
}

nlohmann::json RunConfig::to_json() const {
  return {
      {"mode", mode},
      {"input", input},
      {"output", output},
      {"report", report},
      {"truth", truth},
      {"found", found},
      {"similarity_threshold", thresholds.similarity},
      {"full_merge_threshold", thresholds.full_merge},
      {"max_uncovered", thresholds.max_uncovered},
      {"gap_open", gap_open},
      {"gap_extend", gap_extend},
      {"matrix", matrix},
      {"threads", effective_threads()},
      {"granularity", granularity},
      {"batch_size", batch_size},
      {"listen", listen},
      {"connect", connect},
      {"worker_timeout_s", worker_timeout_s},
      {"seed", seed},
  };
}

}  // namespace clustermerge
