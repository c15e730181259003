#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "gapcert/json_io.hpp"

namespace gapcert {

struct SuiteResult {
  std::string name;  // file stem
  std::string kind;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::string detail;  // first failure, or a short note
  bool ok() const { return checks > 0 && failures == 0; }
};

struct SelfcheckReport {
  std::vector<SuiteResult> suites;
  std::string error;  // set when the corpus itself is unusable
  bool ok() const;
};

struct SelfcheckOptions {
  std::size_t threads = 1;
};

/// Runs every *.json suite in the directory, in file-name order.
SelfcheckReport run_selfcheck(const std::filesystem::path& corpus, const SelfcheckOptions& opts = {});

/// Runs one suite description; `name` labels the result.
SuiteResult run_suite(const std::string& name, const Json& suite, const SelfcheckOptions& opts = {});

/// Fixed-width pass/fail table.
std::string format_table(const SelfcheckReport& report);
Json to_json(const SelfcheckReport& report);

}  // namespace gapcert
