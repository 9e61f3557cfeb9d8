#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "../support/test_support.hpp"

#ifndef CLUSTERMERGE_CLI_PATH
#error "CLUSTERMERGE_CLI_PATH must point at the built command-line tool"
#endif

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(CLUSTERMERGE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("end-to-end pipeline through the command line") {
  testsupport::TempDir dir;
  const auto d = [&](const char* name) { return (dir / name).string(); };
  REQUIRE(run("gen --out " + d("d.fa") + " --families 8 --copies 5 --random 5 --seed 3") == 0);
  REQUIRE(run("cluster --input " + d("d.fa") + " --out " + d("c1.tsv") + " --threads 1") == 0);
  REQUIRE(run("cluster --input " + d("d.fa") + " --out " + d("c2.tsv") + " --threads 1") == 0);
  CHECK(slurp(d("c1.tsv")) == slurp(d("c2.tsv")));
  CHECK(slurp(d("c1.tsv.json")) == slurp(d("c2.tsv.json")));

  const auto report = nlohmann::json::parse(slurp(d("c1.tsv.report.json")));
  CHECK(report["config"]["threads"] == 1);
  CHECK(report["config"]["similarity_threshold"] == 181);
  CHECK(report.contains("dataset_checksum"));
  CHECK(report["alignments"]["total"].get<std::uint64_t>() > 0);

  REQUIRE(run("oracle --input " + d("d.fa") + " --out " + d("t.pairs") + " --threads 2") == 0);
  REQUIRE(run("extract --input " + d("d.fa") + " --clusters " + d("c1.tsv") + " --out " + d("f.pairs")) == 0);
  REQUIRE(run("eval --truth " + d("t.pairs") + " --found " + d("f.pairs") + " --out " + d("r.json")) == 0);
  const auto recall = nlohmann::json::parse(slurp(d("r.json")));
  CHECK(recall["recall"].get<double>() >= 0.99);
  REQUIRE(run("stats --clusters " + d("c1.tsv") + " --csv " + d("h.csv") + " --json " + d("s.json")) == 0);
  CHECK(slurp(d("h.csv")).rfind("size,count\n", 0) == 0);
}

TEST_CASE("config file sits between defaults and flags") {
  testsupport::TempDir dir;
  const auto d = [&](const char* name) { return (dir / name).string(); };
  REQUIRE(run("gen --out " + d("d.fa") + " --families 2 --copies 3") == 0);
  std::ofstream(d("run.ini")) << "similarity=190\ngap_open=40\n";
  REQUIRE(run("--config " + d("run.ini") + " cluster --input " + d("d.fa") + " --out " + d("c.tsv") +
              " --gap-open 41 --threads 1") == 0);
  const auto report = nlohmann::json::parse(slurp(d("c.tsv.report.json")));
  CHECK(report["config"]["similarity_threshold"] == 190);
  CHECK(report["config"]["gap_open"] == 41);
  CHECK(report["config"]["gap_extend"] == 7);
}

TEST_CASE("errors give exit code 1 and leave no partial output") {
  testsupport::TempDir dir;
  const auto d = [&](const char* name) { return (dir / name).string(); };
  std::ofstream(d("bad.fa")) << ">x\nAC1\n";
  CHECK(run("cluster --input " + d("bad.fa") + " --out " + d("c.tsv")) == 1);
  CHECK_FALSE(fs::exists(d("c.tsv")));
  CHECK(run("cluster --input " + d("missing.fa") + " --out " + d("c.tsv")) == 1);
  CHECK(run("nosuchcommand") == 1);
  CHECK(run("cluster --input " + d("bad.fa")) == 1);
  std::ofstream(d("ok.fa")) << ">x\nACDEF\n>y\nGHIKL\n";
  CHECK(run("cluster --input " + d("ok.fa") + " --out " + d("c.tsv") + " --gap-open 1 --gap-extend 5") == 1);
  CHECK_FALSE(fs::exists(d("c.tsv")));
}
