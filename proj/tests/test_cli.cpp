#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"

#include "gapcert/app.hpp"
#include "gapcert/errors.hpp"
#include "gapcert/selfcheck.hpp"

using namespace gapcert;
namespace fs = std::filesystem;

namespace {

Json parse(const char* text) { return parse_json_text(text, "test"); }

fs::path scratch_dir() {
  auto dir = fs::temp_directory_path() / ("gapcert_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs the CLI binary with stdout and stderr discarded; returns its exit status.
int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + GAPCERT_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kWitness = R"({
  "operation": "witness", "presentation": ["a", "b"], "subgroup": ["a"],
  "action": {"points": 2, "generators": {"a": [0, 1], "b": [1, 0]}}
})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("run produces the witness report") {
  const auto out = run(parse(kWitness));
  CHECK(out.exit_code == kExitOk);
  CHECK(out.report["schema"] == kReportSchema);
  CHECK(out.report["status"] == "verified");
  CHECK(out.report["result"]["kappa"] == "19/32");
  CHECK(out.report["result"]["n"] == 2);
  CHECK(!out.tsv.empty());
  CHECK(!out.summary.empty());
}

TEST_CASE("error and inconclusive exit codes") {
  auto unknown = run(parse(R"({"operation": "bounds", "value": 0.5, "colour": "blue"})"));
  CHECK(unknown.exit_code == kExitError);
  CHECK(unknown.report["error"]["type"] == "SchemaViolation");
  CHECK(unknown.report["error"]["message"].get<std::string>().find("colour") != std::string::npos);

  CHECK(run(parse(R"({"operation": "bounds", "value": 0})")).report["error"]["type"] == "DomainError");
  CHECK(run(parse(R"({"operation": "nope"})")).exit_code == kExitError);
  CHECK(run(parse(R"({"operation": "schreier", "presentation": ["a", "b"], "subgroup": ["a"]})"))
            .report["error"]["type"] == "InfiniteIndex");
  CHECK(run(parse(R"({"operation": "spectrum", "presentation": ["a"], "measure": {"a": "1"},
                      "action": {"points": 3, "generators": {"a": [1, 2, 0]}}})"))
            .report["error"]["type"] == "NonSymmetric");
  CHECK(run(parse(R"({"operation": "convolve", "presentation": ["a", "b"], "power": 8, "support_cap": 10})"))
            .report["error"]["type"] == "CostCapExceeded");

  const auto vac = run(parse(R"({"operation": "mertek", "presentation": ["a", "b"],
      "measure": {"b": "1/8", "b^-1": "1/8", "a": "3/8", "a^-1": "3/8"}, "subgroup": ["b"],
      "action": {"points": 2, "generators": {"a": [0, 1], "b": [1, 0]}}})"));
  CHECK(vac.exit_code == kExitInconclusive);
  CHECK(vac.report["result"]["verdict"] == "bounds vacuous");
}

TEST_CASE("a witness needing a longer walk than n_max is inconclusive") {
  const auto cfg = parse(R"({"operation": "witness", "presentation": ["a", "b"], "subgroup": ["a"], "n_max": 2,
      "action": {"points": 8, "generators": {"a": [1, 2, 3, 4, 5, 6, 7, 0], "b": [1, 2, 3, 4, 5, 6, 7, 0]}}})");
  const auto out = run(cfg);
  CHECK(out.exit_code == kExitInconclusive);
  CHECK(out.report["error"]["type"] == "NoWitnessFound");
  RunOptions longer;
  longer.n_max = 32;
  const auto found = run(cfg, longer);
  CHECK(found.exit_code == kExitOk);
  CHECK(found.report["result"]["n"] == 18);
}

TEST_CASE("every corpus example report re-verifies under recheck") {
  std::size_t checked = 0;
  for (const auto& entry : fs::directory_iterator(GAPCERT_CORPUS_DIR)) {
    const auto suite = parse_json_text(slurp(entry.path()), entry.path().string());
    if (suite.value("kind", "") != "example") continue;
    const auto report = run(suite.at("config")).report;
    INFO(entry.path().filename().string());
    CHECK(recheck_report(report).empty());
    ++checked;
  }
  CHECK(checked >= 15);
}

TEST_CASE("json syntax errors report line and column") {
  try {
    parse_json_text("{\n  \"operation\": ,\n}", "broken.json");
    FAIL("expected a parse error");
  } catch (const InvalidInput& e) {
    const std::string msg = e.what();
    CHECK(msg.find("broken.json:2:") != std::string::npos);
  }
}

TEST_CASE("reports are deterministic and independent of the thread count") {
  const auto cfg = parse(R"({"operation": "cheeger", "presentation": ["a", "b"],
      "action": {"points": 6, "generators": {"a": [1, 2, 3, 4, 5, 0], "b": [1, 0, 3, 2, 5, 4]}}})");
  RunOptions one, four;
  one.threads = 1;
  four.threads = 4;
  CHECK(dump(run(cfg, one).report) == dump(run(cfg, one).report));
  CHECK(dump(run(cfg, one).report) == dump(run(cfg, four).report));
}

TEST_CASE("recheck accepts a fresh report and rejects a tampered one") {
  for (const char* cfg : {kWitness, R"({"operation": "bounds", "value": 0.5})",
                          R"({"operation": "mertek", "presentation": ["a", "b"], "subgroup": ["b"],
                              "action": {"points": 4, "generators": {"a": [1, 2, 3, 0], "b": [2, 3, 0, 1]}}})"}) {
    const auto report = run(parse(cfg)).report;
    CHECK(recheck_report(report).empty());
  }
  auto report = run(parse(kWitness)).report;
  report["result"]["kappa"] = "1/2";
  CHECK(!recheck_report(report).empty());

  auto verdict = run(parse(kWitness)).report;
  verdict["result"]["mertek"]["count_bound"] = 1.5;
  CHECK(!recheck_report(verdict).empty());
}

TEST_CASE("selfcheck fixtures") {
  const auto corrupt = run_selfcheck(GAPCERT_FIXTURE_DIR "/corrupt_corpus");
  CHECK(!corrupt.ok());
  REQUIRE(corrupt.suites.size() == 1);
  CHECK(corrupt.suites[0].failures > 0);

  const auto empty = run_selfcheck(GAPCERT_FIXTURE_DIR "/empty_corpus");
  CHECK(!empty.ok());
  CHECK(empty.error == "no suites found");

  const auto missing = run_selfcheck(GAPCERT_FIXTURE_DIR "/does_not_exist");
  CHECK(!missing.ok());
}

TEST_CASE("every corpus suite passes") {
  const auto report = run_selfcheck(GAPCERT_CORPUS_DIR);
  CHECK(report.error.empty());
  for (const auto& s : report.suites) {
    INFO(s.name << ": " << s.detail);
    CHECK(s.ok());
  }
}

TEST_CASE("schema files list exactly the accepted config keys") {
  std::ifstream in(GAPCERT_SCHEMA_DIR "/problem.schema.json");
  REQUIRE(in);
  std::stringstream text;
  text << in.rdbuf();
  const auto schema = parse_json_text(text.str(), "problem.schema.json");
  std::set<std::string> keys;
  for (const auto& [k, _] : schema.at("properties").items()) keys.insert(k);
  const std::set<std::string> accepted = {
      "schema", "operation", "presentation", "word", "syllables", "measure", "measures", "power",
      "subgroup", "words", "action", "chain", "n_max", "radius_n_max", "ball_cap", "support_cap",
      "state_cap", "exact_cheeger_limit", "exhaustive_limit", "cheeger_mode", "deflation", "tolerance",
      "value", "variant", "seed", "threads", "engine", "output", "tsv", "corpus"};
  CHECK(keys == accepted);
  std::set<std::string> ops;
  for (const auto& op : schema.at("properties").at("operation").at("enum")) ops.insert(op.get<std::string>());
  CHECK(ops == std::set<std::string>(operation_names().begin(), operation_names().end()));
  // Every key in the code is rejected when misspelt, so a round trip through run() pins the list.
  CHECK(run(parse(R"({"operation": "bounds", "value": 0.5, "variant": "ize"})")).exit_code == kExitOk);
}

TEST_CASE("binary exit codes and file outputs") {
  const auto dir = scratch_dir();
  write(dir / "witness.json", kWitness);
  write(dir / "vacuous.json", R"({"operation": "mertek", "presentation": ["a", "b"],
      "measure": {"b": "1/8", "b^-1": "1/8", "a": "3/8", "a^-1": "3/8"}, "subgroup": ["b"],
      "action": {"points": 2, "generators": {"a": [0, 1], "b": [1, 0]}}})");
  write(dir / "bad.json", "{\"operation\": \"bounds\", \"value\": 0.5, \"colour\": 1}");
  write(dir / "broken.json", "{ not json");

  CHECK(cli("witness --config \"" + (dir / "witness.json").string() + "\" --out \"" + (dir / "r.json").string() +
            "\" --tsv \"" + (dir / "r.tsv").string() + "\"") == 0);
  CHECK(fs::exists(dir / "r.tsv"));
  CHECK(cli("--recheck --config \"" + (dir / "r.json").string() + "\"") == 0);
  auto tampered = parse_json_text(slurp(dir / "r.json"), "r.json");
  tampered["result"]["n"] = 4;
  write(dir / "t.json", dump(tampered));
  CHECK(cli("--recheck --config \"" + (dir / "t.json").string() + "\"") == 1);

  CHECK(cli("mertek --config \"" + (dir / "vacuous.json").string() + "\"") == 2);
  CHECK(cli("--config \"" + (dir / "bad.json").string() + "\"") == 1);
  CHECK(cli("--config \"" + (dir / "broken.json").string() + "\"") == 1);
  CHECK(cli("spectrum --config \"" + (dir / "witness.json").string() + "\"") == 1);
  CHECK(cli("selfcheck --corpus \"" GAPCERT_FIXTURE_DIR "/corrupt_corpus\"") == 1);
  CHECK(cli("selfcheck --corpus \"" GAPCERT_FIXTURE_DIR "/empty_corpus\"") == 1);
  fs::remove_all(dir);
}

}  // TEST_SUITE
