#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gapcert/json_io.hpp"

namespace gapcert {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInconclusive = 2;

/// Command-line overrides. Set values win over the config file.
struct RunOptions {
  std::optional<std::size_t> threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_max;
  std::optional<std::size_t> exact_cheeger_limit;
  std::optional<std::string> corpus_dir;
};

struct RunOutcome {
  int exit_code = kExitOk;
  Json report;
  std::string tsv;      // empty when the operation has no tabular output
  std::string summary;  // human-readable lines
};

/// Operation names accepted in the "operation" field.
const std::vector<std::string>& operation_names();

/// Executes one problem. Library errors become an "error" report with exit 1
/// (exit 2 for NoWitnessFound); only programming errors escape.
RunOutcome run(const Json& config, const RunOptions& opts = {});

/// Re-runs the embedded input of a report, compares the bytes, and re-derives
/// every stored verdict from the stored numbers. Returns the mismatches.
std::vector<std::string> recheck_report(const Json& report, const RunOptions& opts = {});

}  // namespace gapcert
