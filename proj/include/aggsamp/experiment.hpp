#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aggsamp/analysis.hpp"
#include "aggsamp/metrics.hpp"
#include "aggsamp/programs.hpp"
#include "aggsamp/runtime.hpp"
#include "aggsamp/signals.hpp"
#include "aggsamp/topology.hpp"

namespace aggsamp {

// One deployment axis entry: a generated kind or a loaded station file.
struct DeploymentSpec {
  std::optional<DeploymentKind> kind = DeploymentKind::Grid;
  std::filesystem::path stations;  // used when kind is empty

  std::string name() const {
    return kind ? to_string(*kind) : std::string("stations");
  }
};

// One strength axis entry; external tables may come from a file or be given
// programmatically.
struct StrengthSpec {
  StrengthKind kind = StrengthKind::Value;
  std::filesystem::path table_path;
  std::shared_ptr<const std::vector<double>> table;

  std::string name() const {
    switch (kind) {
      case StrengthKind::Value:
        return "value";
      case StrengthKind::Mean:
        return "mean";
      case StrengthKind::Variance:
        return "variance";
      case StrengthKind::External:
        return "external";
    }
    return "?";
  }
};

// A full experiment description.  The five list-valued fields are sweep axes;
// a plain run requires the first four to hold exactly one entry each.
struct ExperimentConfig {
  std::vector<DeploymentSpec> deployments{DeploymentSpec{}};
  std::vector<SignalSpec> signals{SignalSpec{}};
  std::vector<StrengthSpec> strengths{StrengthSpec{}};
  std::vector<EdgeMetricKind> metrics{EdgeMetricKind::Distance};
  std::vector<std::uint64_t> seeds{1};

  std::size_t n = 100;
  unsigned k_min = 8;
  double epsilon = 1e-6;
  double eta = 0.0;  // mandatory in config files
  SchedulerSpec scheduler = SchedulerSpec::async_exponential(1.0);
  std::uint64_t max_rounds = 1000;
  std::uint64_t quiescence_window = 5;
  double sample_interval = 10.0;
  std::string out_dir = "out";
  bool trace = false;
};

// Parses the key = value experiment format ('#' comments, one key per line).
// Unknown keys, malformed values, and out-of-range parameters raise
// ParseError naming the offending key.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& path);

// One cell of the sweep grid.
struct CellConfig {
  DeploymentSpec deployment;
  SignalSpec signal;
  StrengthSpec strength;
  EdgeMetricKind metric = EdgeMetricKind::Distance;

  std::string slug(double eta) const;
};

struct PhaseOutcome {
  std::size_t phase = 0;
  bool stabilised = false;
  std::size_t region_count = 0;
};

struct RunVerdicts {
  bool stabilised = false;
  bool contiguous = false;
  bool within_error = false;
  bool locally_optimal = false;

  bool all() const {
    return stabilised && contiguous && within_error && locally_optimal;
  }
};

struct RunResult {
  RunVerdicts verdicts;
  std::vector<PhaseOutcome> phases;
  std::vector<MetricsRow> series;
  std::vector<DeviceId> final_leaders;
  std::vector<double> final_signals;
  std::optional<double> stabilised_at;
  MessageCost cost;
  Trace<Candidacy> trace;
};

// Builds the network and signal for one cell and seed, runs the sampler to
// quiescence (per phase for dynamic signals), evaluates all verifiers on the
// final snapshot, and collects the sampled metrics series.
RunResult run_experiment(const ExperimentConfig& cfg, const CellConfig& cell,
                         std::uint64_t seed);

struct SweepOptions {
  bool write_files = true;
  bool print_verdicts = true;
  unsigned parallel = 1;
};

struct SweepOutcome {
  std::size_t runs = 0;
  std::size_t failed = 0;
  bool ok() const { return failed == 0; }
};

// Cartesian product of the config's axes times its seeds.  Writes one metrics
// CSV per run, one per-cell mean series across seeds, and a verdict summary;
// returns how many runs failed a verifier.
SweepOutcome sweep(const ExperimentConfig& cfg, const SweepOptions& options);

// Expands the config's cells (product of the four cell axes, in order).
std::vector<CellConfig> expand_cells(const ExperimentConfig& cfg);

// Requires a single-cell config (each axis one entry); the `run` and
// `verify` subcommands use it.
CellConfig single_cell(const ExperimentConfig& cfg);

}  // namespace aggsamp
