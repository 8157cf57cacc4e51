#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

// Scenario runner: one JSON scenario in, one deterministic report out.
// Exit-code contract: 0 pass/certified, 1 property violation or failure
// witness, 2 undetermined, 3 input error (thrown as InvalidInput and mapped
// by the CLI). Reports depend only on (scenario bytes, seed); the worker
// count never changes a reported byte.
namespace cocyc {

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the scenario's seed
  int workers = 1;
  std::filesystem::path out_dir = ".";
  bool write_files = true;  // report.json, side tables, run_meta.json
};

struct RunResult {
  int exit_code;            // 0, 1 or 2; input errors throw instead
  std::string status;       // pass | violation | undetermined
  std::string report_json;  // exact bytes of report.json
  // (filename, bytes) of CSV side tables, in emission order.
  std::vector<std::pair<std::string, std::string>> side_files;
};

// expected_task pins the CLI subcommand; empty accepts whatever the scenario
// declares. Throws InvalidInput (exit 3 at the CLI) for malformed scenarios,
// unknown fields of the wrong type, or a task mismatch.
RunResult run_scenario_file(const std::filesystem::path& scenario_path,
                            const std::string& expected_task,
                            const RunOptions& opts);

}  // namespace cocyc
