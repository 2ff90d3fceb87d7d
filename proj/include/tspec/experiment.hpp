#pragma once
// Config-driven batch runner: parses an experiment JSON, simulates/loads data,
// featurizes, fits, executes the configured task over one or more trials, and
// writes CSV/JSON artifacts plus a manifest under the output directory.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace tspec {

struct RunOptions {
  int jobs = 0;        // <= 0: hardware concurrency
  bool dry_run = false;
  std::optional<std::uint64_t> seed_override;            // env/flag beats config
  std::optional<std::filesystem::path> output_override;  // beats config "output"
  std::optional<std::string> task_override;              // subcommand beats config task kind
};

// Returns the process exit code: 0 success, 2 config error, 3 numeric or
// task failure. A manifest is written under the output directory for every
// executed run, including failed ones (dry runs write nothing).
int run_experiment(const std::filesystem::path& config_path, const RunOptions& opts);

}  // namespace tspec
