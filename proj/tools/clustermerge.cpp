// clustermerge command-line front end.
//
// Exit codes: 0 success, 1 user error (bad flags, input or config, refused by
// the controller), 2 internal error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "clustermerge/alignment.hpp"
#include "clustermerge/cluster_io.hpp"
#include "clustermerge/dist/controller.hpp"
#include "clustermerge/dist/worker.hpp"
#include "clustermerge/evaluation.hpp"
#include "clustermerge/run_config.hpp"
#include "clustermerge/sequence_store.hpp"
#include "clustermerge/shared_runtime.hpp"
#include "clustermerge/synthetic.hpp"

namespace fs = std::filesystem;
using namespace clustermerge;

namespace {

constexpr int kExitUser = 1;
constexpr int kExitInternal = 2;

/// Deletes registered output files unless the command finished.
class OutputGuard {
 public:
  void add(const fs::path& path) {
    if (path.empty()) return;
    paths_.push_back(path);
    paths_.push_back(sidecar_path(path));
  }
  void commit() { paths_.clear(); }
  ~OutputGuard() {
    std::error_code ec;
    for (const auto& p : paths_) fs::remove(p, ec);
  }

 private:
  std::vector<fs::path> paths_;
};

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw InputError(std::string("missing required option ") + flag);
}

std::string default_report(const std::string& out) { return out.empty() ? "" : out + ".report.json"; }

void emit_json(const nlohmann::json& j, const std::string& path, OutputGuard& guard) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  guard.add(path);
  write_json_file(path, j);
}

nlohmann::json run_report(const RunConfig& cfg, const SequenceStore& store, const ClusterSet& clusters) {
  return {
      {"config", cfg.to_json()},
      {"dataset_checksum", store.checksum()},
      {"sequence_count", store.size()},
      {"cluster_count", clusters.size()},
      {"cluster_stats", cluster_stats(clusters).to_json()},
  };
}

int cmd_cluster(const RunConfig& cfg) {
  require(cfg.input, "--input");
  require(cfg.output, "--out");
  OutputGuard guard;
  const auto store = load_fasta(cfg.input);
  const auto params = cfg.alignment_params();

  SharedOptions options;
  options.threads = cfg.effective_threads();
  options.granularity = cfg.granularity;
  SharedRunStats stats;
  const ClusterSet clusters = cluster(store, params, cfg.thresholds, options, &stats);

  guard.add(cfg.output);
  write_clusters(clusters, cfg.output, RunMetadata::describe(store, params, cfg.thresholds));

  auto report = run_report(cfg, store, clusters);
  report["alignments"] = {{"representative", stats.representative_alignments},
                          {"member", stats.member_alignments},
                          {"total", stats.total_alignments()}};
  report["set_merges"] = stats.set_merges;
  report["partial_tasks"] = stats.partial_tasks;
  report["wall_seconds"] = stats.wall_seconds;
  emit_json(report, cfg.report.empty() ? default_report(cfg.output) : cfg.report, guard);
  guard.commit();
  return 0;
}

int cmd_controller(const RunConfig& cfg) {
  require(cfg.input, "--input");
  require(cfg.output, "--out");
  OutputGuard guard;
  const auto store = load_fasta(cfg.input);
  const auto params = cfg.alignment_params();

  dist::ControllerOptions options;
  options.listen = dist::Endpoint::parse(cfg.listen);
  options.batch_size = cfg.batch_size;
  options.granularity = cfg.granularity;
  options.worker_timeout = std::chrono::seconds(cfg.worker_timeout_s);
  dist::Controller controller(store, params, cfg.thresholds, options);
  std::cerr << "listening on port " << controller.port() << std::endl;
  const ClusterSet clusters = controller.run();
  const auto stats = controller.stats();

  guard.add(cfg.output);
  write_clusters(clusters, cfg.output, RunMetadata::describe(store, params, cfg.thresholds));

  auto report = run_report(cfg, store, clusters);
  nlohmann::json by_type = nlohmann::json::object();
  for (const auto& [type, bytes] : stats.bytes_by_type) by_type[std::to_string(type)] = bytes;
  report["batches"] = stats.batches;
  report["partials"] = stats.partials;
  report["set_merges"] = stats.set_merges;
  report["inline_resends"] = stats.inline_resends;
  report["requeued_items"] = stats.requeued_items;
  report["workers"] = {{"registered", stats.workers_registered},
                       {"rejected", stats.workers_rejected},
                       {"lost", stats.workers_lost}};
  report["bytes"] = {{"sent", stats.bytes_sent}, {"received", stats.bytes_received}, {"by_type", by_type}};
  report["wall_seconds"] = stats.wall_seconds;
  emit_json(report, cfg.report.empty() ? default_report(cfg.output) : cfg.report, guard);
  guard.commit();
  return 0;
}

int cmd_worker(const RunConfig& cfg) {
  require(cfg.input, "--input");
  const auto store = load_fasta(cfg.input);
  const auto params = cfg.alignment_params();
  dist::WorkerOptions options;
  options.controller = dist::Endpoint::parse(cfg.connect);
  options.threads = cfg.effective_threads();
  options.connect_timeout = std::chrono::seconds(cfg.worker_timeout_s);
  const auto stats = dist::worker_run(store, params, cfg.thresholds, options);
  std::cerr << "worker done: " << stats.batches << " batches, " << stats.partials << " partials\n";
  return 0;
}

int cmd_oracle(const RunConfig& cfg) {
  require(cfg.input, "--input");
  require(cfg.output, "--out");
  OutputGuard guard;
  const auto store = load_fasta(cfg.input);
  const auto params = cfg.alignment_params();
  std::uint64_t alignments = 0;
  const auto pairs = brute_force_pairs(store, params, cfg.thresholds, cfg.effective_threads(), &alignments);
  guard.add(cfg.output);
  write_pairs(pairs, cfg.output);
  std::cerr << pairs.size() << " significant pairs from " << alignments << " alignments\n";
  guard.commit();
  return 0;
}

int cmd_extract(const RunConfig& cfg, const std::string& clusters_path) {
  require(cfg.input, "--input");
  require(clusters_path, "--clusters");
  require(cfg.output, "--out");
  OutputGuard guard;
  const auto store = load_fasta(cfg.input);
  const auto params = cfg.alignment_params();
  const ClusterSet clusters = read_clusters(clusters_path);
  const auto meta = RunMetadata::describe(store, params, cfg.thresholds);
  if (fs::exists(sidecar_path(clusters_path))) {
    const auto stored = RunMetadata::from_json(read_json_file(sidecar_path(clusters_path)));
    if (!stored.compatible_with(meta)) {
      throw InputError("cluster file was produced with different parameters or data");
    }
  }
  std::uint64_t alignments = 0;
  const auto pairs = extract_pairs(clusters, store, params, cfg.thresholds, cfg.effective_threads(), &alignments);
  guard.add(cfg.output);
  write_pairs(pairs, cfg.output);
  std::cerr << pairs.size() << " significant pairs from " << alignments << " alignments\n";
  guard.commit();
  return 0;
}

int cmd_eval(const RunConfig& cfg) {
  require(cfg.truth, "--truth");
  require(cfg.found, "--found");
  OutputGuard guard;
  const auto report = recall_report(read_pairs(cfg.truth), read_pairs(cfg.found));
  emit_json(report.to_json(), cfg.output, guard);
  guard.commit();
  return 0;
}

int cmd_stats(const std::string& clusters_path, const std::string& csv, const std::string& json_out) {
  require(clusters_path, "--clusters");
  OutputGuard guard;
  const auto stats = cluster_stats(read_clusters(clusters_path));
  if (!csv.empty()) {
    guard.add(csv);
    std::ofstream out(csv);
    if (!out) throw InputError("cannot write " + csv);
    stats.write_csv(out);
  }
  emit_json(stats.to_json(), json_out, guard);
  guard.commit();
  return 0;
}

int cmd_gen(const RunConfig& cfg, PlantedFamilyConfig gen, std::size_t random_count) {
  require(cfg.output, "--out");
  OutputGuard guard;
  gen.seed = cfg.seed;
  if (gen.min_length == 0 || gen.min_length > gen.max_length) throw InputError("invalid length range");
  if (gen.min_rate < 0 || gen.min_rate > gen.max_rate || gen.max_rate > 1) throw InputError("invalid mutation rate range");
  auto records = generate_planted_families(gen);
  auto background = generate_random_sequences(random_count, gen.min_length, gen.max_length, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  records.insert(records.end(), background.begin(), background.end());
  const auto store = SequenceStore::from_records(std::move(records));
  guard.add(cfg.output);
  write_fasta(store, fs::path(cfg.output));
  guard.commit();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Precise protein sequence clustering by bottom-up cluster merging"};
  app.set_version_flag("--version", "clustermerge 0.1.0");
  app.set_config("--config", "", "Key=value config file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  app.add_option("--similarity", cfg.thresholds.similarity, "Similarity threshold T")->capture_default_str();
  app.add_option("--full-merge", cfg.thresholds.full_merge, "Full-merge score threshold mT")->capture_default_str();
  app.add_option("--max-uncovered", cfg.thresholds.max_uncovered, "Max uncovered residues mU")->capture_default_str();
  app.add_option("--gap-open", cfg.gap_open, "Cost of the first gap residue")->capture_default_str();
  app.add_option("--gap-extend", cfg.gap_extend, "Cost of each further gap residue")->capture_default_str();
  app.add_option("--matrix", cfg.matrix, "Builtin 'pam250' or a matrix file")->capture_default_str();
  app.add_option("--threads", cfg.threads, "Worker threads (0: all cores)")->capture_default_str();
  app.add_option("--granularity", cfg.granularity, "Estimated residue comparisons per partial merge")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Random seed for gen")->capture_default_str();

  auto* cluster_cmd = app.add_subcommand("cluster", "Cluster a FASTA file on this machine");
  auto* controller_cmd = app.add_subcommand("controller", "Distributed run: coordinate workers");
  auto* worker_cmd = app.add_subcommand("worker", "Distributed run: serve a controller");
  auto* oracle_cmd = app.add_subcommand("oracle", "All-against-all significant pairs");
  auto* extract_cmd = app.add_subcommand("extract", "Significant pairs inside clusters");
  auto* eval_cmd = app.add_subcommand("eval", "Recall of found pairs against the oracle");
  auto* stats_cmd = app.add_subcommand("stats", "Cluster size summary");
  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic planted-family FASTA");

  for (auto* sub : {cluster_cmd, controller_cmd, worker_cmd, oracle_cmd, extract_cmd}) {
    sub->add_option("-i,--input", cfg.input, "FASTA input");
  }
  for (auto* sub : {cluster_cmd, controller_cmd, oracle_cmd, extract_cmd, gen_cmd}) {
    sub->add_option("-o,--out", cfg.output, "Output file");
  }
  for (auto* sub : {cluster_cmd, controller_cmd}) {
    sub->add_option("--report", cfg.report, "Run report JSON (default <out>.report.json, '-' for stdout)");
  }
  controller_cmd->add_option("--listen", cfg.listen, "host:port to listen on")->capture_default_str();
  controller_cmd->add_option("--batch-size", cfg.batch_size, "Sets smaller than this are batched")->capture_default_str();
  controller_cmd->add_option("--worker-timeout", cfg.worker_timeout_s, "Seconds to wait without workers")->capture_default_str();
  worker_cmd->add_option("--connect", cfg.connect, "Controller host:port")->capture_default_str();
  worker_cmd->add_option("--connect-timeout", cfg.worker_timeout_s, "Seconds to keep retrying the first connection")->capture_default_str();

  std::string clusters_path;
  extract_cmd->add_option("--clusters", clusters_path, "Cluster file");
  stats_cmd->add_option("--clusters", clusters_path, "Cluster file");
  eval_cmd->add_option("--truth", cfg.truth, "Oracle pair file");
  eval_cmd->add_option("--found", cfg.found, "Extracted pair file");
  eval_cmd->add_option("-o,--out", cfg.output, "Report JSON (default stdout)");
  std::string csv_out, json_out;
  stats_cmd->add_option("--csv", csv_out, "Histogram CSV");
  stats_cmd->add_option("--json", json_out, "Summary JSON (default stdout)");

  PlantedFamilyConfig gen;
  std::size_t random_count = 0;
  gen_cmd->add_option("--families", gen.families)->capture_default_str();
  gen_cmd->add_option("--copies", gen.copies)->capture_default_str();
  gen_cmd->add_option("--min-length", gen.min_length)->capture_default_str();
  gen_cmd->add_option("--max-length", gen.max_length)->capture_default_str();
  gen_cmd->add_option("--min-rate", gen.min_rate, "Lowest substitution rate per copy")->capture_default_str();
  gen_cmd->add_option("--max-rate", gen.max_rate, "Highest substitution rate per copy")->capture_default_str();
  gen_cmd->add_flag("--include-seeds", gen.include_seeds, "Also emit the unmutated seeds");
  gen_cmd->add_option("--random", random_count, "Extra unrelated random sequences")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUser;
  }

  try {
    cfg.mode = app.get_subcommands().front()->get_name();
    if (*cluster_cmd) return cmd_cluster(cfg);
    if (*controller_cmd) return cmd_controller(cfg);
    if (*worker_cmd) return cmd_worker(cfg);
    if (*oracle_cmd) return cmd_oracle(cfg);
    if (*extract_cmd) return cmd_extract(cfg, clusters_path);
    if (*eval_cmd) return cmd_eval(cfg);
    if (*stats_cmd) return cmd_stats(clusters_path, csv_out, json_out);
    if (*gen_cmd) return cmd_gen(cfg, gen, random_count);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUser;
  } catch (const dist::WorkerRejected& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUser;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUser;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
