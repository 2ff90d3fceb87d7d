// Batch driver for the Toeplitz spectral estimation library. Every subcommand
// reads a JSON config describing the data source, the feature map, and the
// estimator, runs the requested task, and writes artifacts plus a manifest
// into the configured output directory.

#include <cstdlib>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tspec/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectral estimation for dynamical systems via banded Toeplitz filters"};
  app.require_subcommand(1);

  std::string config_file;
  tspec::RunOptions opts;
  std::string output;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_file, "JSON config file")->required();
    sub->add_option("-j,--jobs", opts.jobs, "worker threads (0 = hardware)");
    sub->add_flag("--dry-run", opts.dry_run, "validate config and print the plan, write nothing");
    sub->add_option("-o,--output", output, "override the output directory");
  };

  // `run` executes whatever task the config names; the task-named subcommands
  // force that task regardless of the config's own task block.
  add_common(app.add_subcommand("run", "run the task named in the config"));
  for (const char* task :
       {"simulate", "fit", "spectrum", "forecast", "response", "kreiss", "bench"}) {
    CLI::App* sub = app.add_subcommand(task, std::string("run the ") + task + " task");
    add_common(sub);
    sub->callback([&opts, task]() { opts.task_override = std::string(task); });
  }

  CLI11_PARSE(app, argc, argv);

  if (const char* env = std::getenv("TOEPLITZ_SPECTRA_SEED")) {
    opts.seed_override = std::strtoull(env, nullptr, 10);
  }
  if (!output.empty()) opts.output_override = output;

  return tspec::run_experiment(config_file, opts);
}
