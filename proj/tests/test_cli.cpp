// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "fixtures.hpp"
#include "zoomkit/records.hpp"

namespace {

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" ZOOMKIT_CLI_PATH "\" " + args + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string q(const zktest::fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("zoom") == 2);
  CHECK(run_cli("crop --parallelism nope") == 2);
  CHECK(run_cli("--version") == 0);
  CHECK(run_cli("crop --help") == 0);
}

TEST_CASE("crop, eval, partition and ratio through the command line") {
  const auto c = zktest::write_corpus(zktest::fresh_dir("cli_corpus"), 4, 77);
  const std::string common = "--bundles-dir " + q(c.bundles) + " --images-dir " + q(c.images) +
                             " --records-in " + q(c.records) + " --layer 1,1";
  CHECK(run_cli("crop " + common + " --records-out " + q(c.root / "crop.jsonl") + " -j 2") == 0);
  CHECK(zktest::read_file(c.root / "crop.jsonl").size() > 0);
  CHECK(zoomkit::read_records(c.root / "crop.jsonl").size() == 4);

  CHECK(run_cli("eval " + common + " --records-out " + q(c.root / "eval.jsonl") + " --metric exact") == 0);
  CHECK(zktest::fs::exists(c.root / "eval.summary.json"));
  CHECK(run_cli("partition " + common + " --records-out " + q(c.root / "part.jsonl")) == 0);

  // Odd records use a different layer layout, so ratio reports partial failure.
  CHECK(run_cli("ratio " + common + " --summary-out " + q(c.root / "ratio.json")) == 1);
  CHECK(zktest::fs::exists(c.root / "ratio.json"));

  SUBCASE("invalid values exit with 2") {
    CHECK(run_cli("crop " + common + " --records-out " + q(c.root / "x.jsonl") + " --method magic") == 2);
    CHECK(run_cli("crop " + common + " --records-out " + q(c.root / "x.jsonl") + " --layer 1") == 2);
    CHECK(run_cli("crop " + common) == 2);  // no records_out
    CHECK(run_cli("crop --config " + q(c.root / "nope.json")) == 2);
  }
  SUBCASE("a missing bundle is a partial failure") {
    zktest::fs::remove_all(c.bundles / c.entries[0].question_id);
    CHECK(run_cli("crop " + common + " --records-out " + q(c.root / "y.jsonl")) == 1);
    CHECK(zoomkit::read_records(c.root / "y.jsonl").size() == 3);
    CHECK(zktest::read_file(c.root / "y.jsonl.errors.jsonl").find(c.entries[0].question_id) != std::string::npos);
  }
  SUBCASE("config from the environment, overridden by flags") {
    const auto cfg = c.root / "cfg.json";
    std::ofstream(cfg) << R"({"bundles_dir": ")" << c.bundles.string() << R"(", "records_in": ")"
                       << c.records.string() << R"(", "records_out": ")" << (c.root / "env.jsonl").string()
                       << R"(", "layer": {"m": 1, "k": 1}, "method": "magic"})";
    const std::string env = "ZOOMKIT_CONFIG=" + q(cfg);
    CHECK(run_cli("crop", env) == 2);
    CHECK(run_cli("crop --method grad_att", env) == 0);
    CHECK(zoomkit::read_records(c.root / "env.jsonl").size() == 4);
  }
}
