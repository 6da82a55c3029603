// Command line front end: runs adaptive sampling experiments described by
// key = value config files and writes metrics CSVs.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aggsamp/experiment.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool trace = false;
  unsigned parallel = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("config", args.config_path, "experiment config file")
      ->required();
  cmd->add_option("--seed", args.seed, "replace the config's seed list");
  cmd->add_option("--out-dir", args.out_dir, "replace the output directory");
  cmd->add_flag("--trace", args.trace, "also dump per-event traces");
  cmd->add_option("--parallel", args.parallel, "worker threads")
      ->check(CLI::PositiveNumber);
}

aggsamp::ExperimentConfig load(const CommonArgs& args) {
  aggsamp::ExperimentConfig cfg = aggsamp::parse_config(args.config_path);
  if (args.seed) cfg.seeds = {*args.seed};
  if (args.out_dir) cfg.out_dir = *args.out_dir;
  if (args.trace) cfg.trace = true;
  return cfg;
}

int finish(const aggsamp::SweepOutcome& outcome) {
  std::cout << outcome.runs - outcome.failed << "/" << outcome.runs
            << " runs passed all verifiers\n";
  return outcome.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-organising adaptive sampling simulator"};
  app.require_subcommand(1);

  CommonArgs run_args, sweep_args, verify_args;
  CLI::App* run_cmd =
      app.add_subcommand("run", "run one experiment cell and write CSVs");
  add_common(run_cmd, run_args);
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "run the whole config grid and write per-cell mean series");
  add_common(sweep_cmd, sweep_args);
  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "run verifiers only; exit 0 when every run passes");
  add_common(verify_cmd, verify_args);

  CLI11_PARSE(app, argc, argv);

  try {
    aggsamp::SweepOptions options;
    if (run_cmd->parsed()) {
      aggsamp::ExperimentConfig cfg = load(run_args);
      aggsamp::single_cell(cfg);  // reject multi-cell configs early
      options.parallel = run_args.parallel;
      return finish(aggsamp::sweep(cfg, options));
    }
    if (sweep_cmd->parsed()) {
      aggsamp::ExperimentConfig cfg = load(sweep_args);
      options.parallel = sweep_args.parallel;
      return finish(aggsamp::sweep(cfg, options));
    }
    aggsamp::ExperimentConfig cfg = load(verify_args);
    options.parallel = verify_args.parallel;
    options.write_files = false;
    return finish(aggsamp::sweep(cfg, options));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
