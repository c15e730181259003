#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "gapcert/app.hpp"

namespace {

using gapcert::Json;

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

std::optional<std::string> config_path(const Json& config, const char* key) {
  auto it = config.find(key);
  if (it != config.end() && it->is_string()) return it->get<std::string>();
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral gap certificates for actions of free products of cyclic groups"};
  app.require_subcommand(0, 1);

  std::string config_file, out_file, tsv_file;
  std::size_t threads = 0, n_max = 0, exact_limit = 0;
  std::uint64_t seed = 0;
  std::string corpus;
  bool recheck = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_file, "Problem or report JSON");
    cmd->add_option("--out", out_file, "Write the JSON report here instead of stdout");
    cmd->add_option("--tsv", tsv_file, "Write tabular output (spectra, sweep profiles, sequences)");
    cmd->add_option("--threads", threads, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "Seed for the eigensolver start vector");
    cmd->add_flag("--recheck", recheck, "Re-run and re-derive every verdict; fail on any mismatch");
    cmd->add_option("--n-max", n_max, "Walk length cap")->check(CLI::PositiveNumber);
    cmd->add_option("--exact-cheeger-limit", exact_limit, "Largest N for exhaustive Cheeger");
    cmd->add_option("--corpus", corpus, "Suite directory for selfcheck");
  };
  add_common(&app);

  const std::map<std::string, std::string> help = {
      {"reduce", "Normal form of a word"},
      {"convolve", "Convolution product or power of measures"},
      {"spectrum", "Top of the spectrum and norm on mean-zero functions"},
      {"cheeger", "Expansion constant and the Cheeger inequalities"},
      {"radius", "Spectral radius estimates from return probabilities"},
      {"relative-radius", "Relative spectral radius for a subgroup"},
      {"schreier", "Coset action of a finite-index subgroup"},
      {"mertek", "Component count, mass and expansion bounds for a split measure"},
      {"witness", "Search for a walk length whose coset mass beats the spectral power"},
      {"tau", "Uniform gap certificate along a chain of actions"},
      {"ramanujan", "Compare an action's gap with the group's radius"},
      {"bounds", "Evaluate the closed-form gap bounds"},
      {"selfcheck", "Run the bundled invariant corpus"},
  };
  std::string operation;
  for (const auto& name : gapcert::operation_names()) {
    if (name == "subgroup-inspect") continue;
    auto* cmd = app.add_subcommand(name, help.count(name) ? help.at(name) : name);
    add_common(cmd);
    cmd->callback([&operation, name] { operation = name; });
  }
  auto* subgroup = app.add_subcommand("subgroup", "Subgroup automaton tools");
  subgroup->require_subcommand(1);
  auto* inspect = subgroup->add_subcommand("inspect", "Fold a subgroup and print its automaton");
  add_common(inspect);
  inspect->callback([&operation] { operation = "subgroup-inspect"; });

  CLI11_PARSE(app, argc, argv);

  gapcert::RunOptions opts;
  if (threads) opts.threads = threads;
  if (seed) opts.seed = seed;
  if (n_max) opts.n_max = n_max;
  if (exact_limit) opts.exact_cheeger_limit = exact_limit;
  if (!corpus.empty()) opts.corpus_dir = corpus;

  Json config = Json::object();
  if (!config_file.empty()) {
    std::ifstream in(config_file, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read " << config_file << "\n";
      return gapcert::kExitError;
    }
    std::stringstream text;
    text << in.rdbuf();
    try {
      config = gapcert::parse_json_text(text.str(), config_file);
    } catch (const gapcert::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return gapcert::kExitError;
    }
  } else if (operation != "selfcheck") {
    std::cerr << "error: --config is required" << (operation.empty() ? " (or name a subcommand)" : "") << "\n";
    return gapcert::kExitError;
  }

  // A stored report given to --recheck: verify it and stop.
  if (config.is_object() && config.value("schema", "") == gapcert::kReportSchema) {
    if (!recheck) {
      std::cerr << "error: " << config_file << " is a report; pass --recheck to verify it\n";
      return gapcert::kExitError;
    }
    const auto mismatches = gapcert::recheck_report(config, opts);
    for (const auto& m : mismatches) std::cerr << "mismatch: " << m << "\n";
    std::cout << (mismatches.empty() ? "recheck passed\n" : "recheck FAILED\n");
    return mismatches.empty() ? gapcert::kExitOk : gapcert::kExitError;
  }

  if (!operation.empty()) {
    if (!config.is_object()) {
      std::cerr << "error: field '<root>': expected an object\n";
      return gapcert::kExitError;
    }
    if (config.contains("operation") && config["operation"] != operation) {
      std::cerr << "error: field 'operation': config says " << config["operation"].dump() << " but the subcommand is "
                << operation << "\n";
      return gapcert::kExitError;
    }
    config["operation"] = operation;
  }

  const auto outcome = gapcert::run(config, opts);
  if (out_file.empty()) {
    if (auto p = config_path(config, "output")) out_file = *p;
  }
  if (tsv_file.empty()) {
    if (auto p = config_path(config, "tsv")) tsv_file = *p;
  }
  const auto text = gapcert::dump(outcome.report);
  if (out_file.empty()) {
    std::cout << text;
    std::cerr << outcome.summary;
  } else {
    if (!write_file(out_file, text)) {
      std::cerr << "error: cannot write " << out_file << "\n";
      return gapcert::kExitError;
    }
    std::cout << outcome.summary;
  }
  if (!tsv_file.empty()) {
    if (outcome.tsv.empty()) {
      std::cerr << "note: this operation has no tabular output; " << tsv_file << " not written\n";
    } else if (!write_file(tsv_file, outcome.tsv)) {
      std::cerr << "error: cannot write " << tsv_file << "\n";
      return gapcert::kExitError;
    }
  }

  int code = outcome.exit_code;
  if (recheck) {
    const auto mismatches = gapcert::recheck_report(gapcert::parse_json_text(text, "report"), opts);
    for (const auto& m : mismatches) std::cerr << "mismatch: " << m << "\n";
    if (!mismatches.empty()) code = gapcert::kExitError;
  }
  return code;
}
