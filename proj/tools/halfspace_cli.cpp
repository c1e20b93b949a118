#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "halfspace/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Active learning of sparse halfspaces: experiment runner"};
  app.require_subcommand(1);

  halfspace::CliOptions opts;
  std::size_t workers = 0;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool wants_out) {
    sub->add_option("--config", opts.config, "JSON config file")->required()->check(CLI::ExistingFile);
    if (wants_out) sub->add_option("--out", opts.out_dir, "output directory")->required();
    sub->add_option("--workers", workers, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "master seed (overrides the config)");
  };

  CLI::App* run = app.add_subcommand("run", "run every (seed, mode) cell at the base point");
  CLI::App* sweep = app.add_subcommand("sweep", "run every cell of the sweep grid");
  CLI::App* baseline = app.add_subcommand("baseline", "run the averaging baseline for every seed");
  CLI::App* diag = app.add_subcommand("diag", "run the invariant suites");
  add_common(run, true);
  add_common(sweep, true);
  add_common(baseline, true);
  add_common(diag, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (CLI::App* sub : {run, sweep, baseline, diag}) {
    if (sub->count("--workers")) opts.workers = workers;
    if (sub->count("--seed")) opts.master_seed = seed;
  }

  if (*diag) return halfspace::cli_diag(opts, std::cout);
  halfspace::Command cmd = *run ? halfspace::Command::run
                         : *sweep ? halfspace::Command::sweep
                                  : halfspace::Command::baseline;
  return halfspace::cli_execute(cmd, opts, std::cerr);
}
