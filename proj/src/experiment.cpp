#include "aggsamp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "aggsamp/csvout.hpp"
#include "aggsamp/rng.hpp"

namespace aggsamp {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  return s.substr(begin, s.find_last_not_of(" \t\r") - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string::size_type start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value,
                    std::size_t line) {
  double v = 0.0;
  const char* end = value.data() + value.size();
  const auto r = std::from_chars(value.data(), end, v);
  if (r.ec != std::errc{} || r.ptr != end || !std::isfinite(v))
    throw ParseError(key + ": expected a number, got '" + value + "'", line);
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& value,
                         std::size_t line) {
  std::uint64_t v = 0;
  const char* end = value.data() + value.size();
  const auto r = std::from_chars(value.data(), end, v);
  if (r.ec != std::errc{} || r.ptr != end)
    throw ParseError(key + ": expected a non-negative integer, got '" + value +
                         "'",
                     line);
  return v;
}

DeploymentSpec parse_deployment_atom(const std::string& value,
                                     std::size_t line) {
  DeploymentSpec spec;
  if (value == "grid")
    spec.kind = DeploymentKind::Grid;
  else if (value == "pgrid")
    spec.kind = DeploymentKind::PerturbedGrid;
  else if (value == "uniform")
    spec.kind = DeploymentKind::Uniform;
  else if (value == "exp")
    spec.kind = DeploymentKind::Exponential;
  else if (value.starts_with("stations:")) {
    spec.kind.reset();
    spec.stations = value.substr(9);
    if (spec.stations.empty())
      throw ParseError("deployment: stations needs a file path", line);
  } else {
    throw ParseError(
        "deployment: expected grid|pgrid|uniform|exp|stations:<path>, got '" +
            value + "'",
        line);
  }
  return spec;
}

SignalSpec parse_signal_atom(const std::string& value, std::size_t line);

SignalSpec parse_static_signal_atom(const std::string& value,
                                    std::size_t line) {
  if (value == "constant") return SignalSpec::constant(0.0);
  if (value.starts_with("constant:"))
    return SignalSpec::constant(
        parse_double("signal", value.substr(9), line));
  if (value == "uniform") return SignalSpec::uniform();
  if (value == "gauss") return SignalSpec::gauss();
  if (value == "multigauss") return SignalSpec::multigauss();
  if (value.starts_with("file:")) {
    const std::string path = value.substr(5);
    if (path.empty()) throw ParseError("signal: file needs a path", line);
    return load_signal_table(path);
  }
  throw ParseError(
      "signal: expected constant[:v]|uniform|gauss|multigauss|file:<path>|"
      "dynamic:<p;p;...>, got '" +
          value + "'",
      line);
}

SignalSpec parse_signal_atom(const std::string& value, std::size_t line) {
  if (value.starts_with("dynamic:")) {
    std::vector<SignalSpec> phases;
    for (const std::string& part : split(value.substr(8), ';'))
      phases.push_back(parse_static_signal_atom(part, line));
    if (phases.empty())
      throw ParseError("signal: dynamic needs at least one phase", line);
    return SignalSpec::dynamic(std::move(phases));
  }
  return parse_static_signal_atom(value, line);
}

StrengthSpec parse_strength_atom(const std::string& value, std::size_t line) {
  StrengthSpec spec;
  if (value == "value")
    spec.kind = StrengthKind::Value;
  else if (value == "mean")
    spec.kind = StrengthKind::Mean;
  else if (value == "variance")
    spec.kind = StrengthKind::Variance;
  else if (value.starts_with("external:")) {
    spec.kind = StrengthKind::External;
    spec.table_path = value.substr(9);
    if (spec.table_path.empty())
      throw ParseError("strength: external needs a file path", line);
  } else {
    throw ParseError(
        "strength: expected value|mean|variance|external:<path>, got '" +
            value + "'",
        line);
  }
  return spec;
}

EdgeMetricKind parse_metric_atom(const std::string& value, std::size_t line) {
  if (value == "distance") return EdgeMetricKind::Distance;
  if (value == "diff") return EdgeMetricKind::Diff;
  if (value == "mix") return EdgeMetricKind::Mix;
  throw ParseError("metric: expected distance|diff|mix, got '" + value + "'",
                   line);
}

SchedulerSpec parse_scheduler(const std::string& value, std::size_t line) {
  if (value == "sync") return SchedulerSpec::synchronous();
  if (value == "async") return SchedulerSpec::async_exponential(1.0);
  if (value.starts_with("async:")) {
    const double rate = parse_double("scheduler", value.substr(6), line);
    if (!(rate > 0.0))
      throw ParseError("scheduler: rate must be positive", line);
    return SchedulerSpec::async_exponential(rate);
  }
  if (value.starts_with("fixed:")) {
    const double period = parse_double("scheduler", value.substr(6), line);
    if (!(period > 0.0))
      throw ParseError("scheduler: period must be positive", line);
    return SchedulerSpec::fixed_frequency(period);
  }
  throw ParseError(
      "scheduler: expected sync|async[:rate]|fixed:<period>, got '" + value +
          "'",
      line);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  bool saw_eta = false;
  double amplitude = 10.0;
  double spread = 0.0;
  bool saw_signal_shape = false;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (const auto hash = raw.find('#'); hash != std::string::npos)
      raw.erase(hash);
    const std::string linetext = trim(raw);
    if (linetext.empty()) continue;
    const auto eq = linetext.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected key = value, got '" + linetext + "'", lineno);
    const std::string key = trim(linetext.substr(0, eq));
    const std::string value = trim(linetext.substr(eq + 1));
    if (value.empty())
      throw ParseError(key + ": empty value", lineno);

    if (key == "deployment") {
      cfg.deployments.clear();
      for (const std::string& part : split(value, ','))
        cfg.deployments.push_back(parse_deployment_atom(part, lineno));
    } else if (key == "n") {
      cfg.n = parse_uint(key, value, lineno);
      if (cfg.n == 0) throw ParseError("n: must be positive", lineno);
    } else if (key == "k_min") {
      cfg.k_min = static_cast<unsigned>(parse_uint(key, value, lineno));
      if (cfg.k_min == 0) throw ParseError("k_min: must be positive", lineno);
    } else if (key == "signal") {
      cfg.signals.clear();
      for (const std::string& part : split(value, ','))
        cfg.signals.push_back(parse_signal_atom(part, lineno));
    } else if (key == "amplitude") {
      amplitude = parse_double(key, value, lineno);
      saw_signal_shape = true;
    } else if (key == "spread") {
      spread = parse_double(key, value, lineno);
      if (!(spread > 0.0)) throw ParseError("spread: must be positive", lineno);
      saw_signal_shape = true;
    } else if (key == "phase_length") {
      const double v = parse_double(key, value, lineno);
      if (!(v > 0.0)) throw ParseError("phase_length: must be positive", lineno);
      for (SignalSpec& s : cfg.signals) s.phase_length = v;
    } else if (key == "strength") {
      cfg.strengths.clear();
      for (const std::string& part : split(value, ','))
        cfg.strengths.push_back(parse_strength_atom(part, lineno));
    } else if (key == "metric") {
      cfg.metrics.clear();
      for (const std::string& part : split(value, ','))
        cfg.metrics.push_back(parse_metric_atom(part, lineno));
    } else if (key == "epsilon") {
      cfg.epsilon = parse_double(key, value, lineno);
      if (!(cfg.epsilon > 0.0))
        throw ParseError("epsilon: must be positive", lineno);
    } else if (key == "eta") {
      cfg.eta = parse_double(key, value, lineno);
      if (!(cfg.eta > 0.0)) throw ParseError("eta: must be positive", lineno);
      saw_eta = true;
    } else if (key == "scheduler") {
      cfg.scheduler = parse_scheduler(value, lineno);
    } else if (key == "seeds") {
      cfg.seeds.clear();
      for (const std::string& part : split(value, ',')) {
        if (part.empty()) throw ParseError("seeds: empty entry", lineno);
        cfg.seeds.push_back(parse_uint(key, part, lineno));
      }
      if (cfg.seeds.empty()) throw ParseError("seeds: need at least one", lineno);
    } else if (key == "max_sweeps") {
      cfg.max_rounds = parse_uint(key, value, lineno);
      if (cfg.max_rounds == 0)
        throw ParseError("max_sweeps: must be positive", lineno);
    } else if (key == "quiescence_window") {
      cfg.quiescence_window = parse_uint(key, value, lineno);
      if (cfg.quiescence_window == 0)
        throw ParseError("quiescence_window: must be positive", lineno);
    } else if (key == "sample_interval") {
      cfg.sample_interval = parse_double(key, value, lineno);
      if (!(cfg.sample_interval > 0.0))
        throw ParseError("sample_interval: must be positive", lineno);
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "trace") {
      if (value == "true" || value == "1")
        cfg.trace = true;
      else if (value == "false" || value == "0")
        cfg.trace = false;
      else
        throw ParseError("trace: expected true|false", lineno);
    } else {
      throw ParseError("unknown key '" + key + "'", lineno);
    }
  }
  if (!saw_eta) throw ParseError("eta: required but missing");
  if (saw_signal_shape)
    for (SignalSpec& s : cfg.signals) {
      auto apply = [&](SignalSpec& atom) {
        if (atom.kind == SignalKind::Gauss ||
            atom.kind == SignalKind::MultiGauss) {
          atom.amplitude = amplitude;
          atom.spread = spread;
        }
      };
      apply(s);
      for (SignalSpec& phase : s.phases) apply(phase);
    }
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string CellConfig::slug(double eta) const {
  std::string signal_name = signal.name();
  for (char& c : signal_name)
    if (c == ':' || c == ';' || c == '/' || c == '\\' || c == '.') c = '-';
  return deployment.name() + "_" + signal_name + "_" + strength.name() + "_" +
         EdgeMetric{metric}.name() + "_eta" + format_double(eta);
}

std::vector<CellConfig> expand_cells(const ExperimentConfig& cfg) {
  std::vector<CellConfig> cells;
  for (const DeploymentSpec& d : cfg.deployments)
    for (const SignalSpec& s : cfg.signals)
      for (const StrengthSpec& st : cfg.strengths)
        for (EdgeMetricKind m : cfg.metrics) cells.push_back({d, s, st, m});
  return cells;
}

CellConfig single_cell(const ExperimentConfig& cfg) {
  if (cfg.deployments.size() != 1 || cfg.signals.size() != 1 ||
      cfg.strengths.size() != 1 || cfg.metrics.size() != 1)
    throw std::invalid_argument(
        "this command needs a single-cell config; use sweep for lists");
  return {cfg.deployments[0], cfg.signals[0], cfg.strengths[0],
          cfg.metrics[0]};
}

namespace {

StrengthPolicy resolve_strength(const StrengthSpec& spec, std::size_t n) {
  StrengthPolicy policy;
  policy.kind = spec.kind;
  if (spec.kind != StrengthKind::External) return policy;
  if (spec.table)
    policy.table = spec.table;
  else
    policy.table = std::make_shared<const std::vector<double>>(
        load_value_table(spec.table_path));
  if (policy.table->size() != n)
    throw std::invalid_argument("external strength table covers " +
                                std::to_string(policy.table->size()) +
                                " devices, deployment has " +
                                std::to_string(n));
  return policy;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const CellConfig& cell,
                         std::uint64_t seed) {
  Deployment deployment =
      cell.deployment.kind
          ? build_deployment(*cell.deployment.kind, cfg.n,
                             derive_seed(seed, 0x6465706cULL + 1))
          : load_stations(cell.deployment.stations);
  NetworkGraph graph = build_network(std::move(deployment), cfg.k_min);
  const std::size_t n = graph.device_count();

  SignalField signal = make_signal(cell.signal, graph.deployment(),
                                   derive_seed(seed, 0x7369676eULL + 1));
  const EdgeMetric metric{cell.metric, cfg.epsilon};
  const StrengthPolicy strength = resolve_strength(cell.strength, n);
  SamplerProgram program(
      SamplerConfig::for_error(cfg.eta, metric, strength));
  World<SamplerProgram> world(graph, std::move(program), signal,
                              cfg.scheduler, derive_seed(seed, 0x77726c64ULL));
  world.set_trace_enabled(cfg.trace);

  RunResult result;
  const std::size_t phase_count = signal.phase_count();
  const double phase_length = signal.phase_length();

  // Metric rows are sampled on a fixed time grid so series from different
  // seeds align exactly.  The world is always run up to the sampling instant
  // before the row is taken.
  double next_sample = 0.0;
  const auto sample_row = [&](double t) {
    if (world.min_rounds() == 0) return;  // not every device has output yet
    std::vector<DeviceId> leaders;
    leaders.reserve(n);
    for (const auto& out : world.outputs()) leaders.push_back(out->leader);
    std::vector<double> sig(n);
    for (DeviceId d = 0; d < n; ++d) sig[d] = signal.read(d, t);
    result.series.push_back(partition_metrics(group_by_leader(leaders), sig, t));
  };

  bool all_phases_stabilised = true;
  bool all_contiguous = true;
  bool all_within = true;
  bool all_optimal = true;

  const auto verify_now = [&](double signal_time) -> std::size_t {
    if (world.min_rounds() == 0) {
      all_contiguous = all_within = all_optimal = false;
      return 0;
    }
    std::vector<double> sig(n);
    for (DeviceId d = 0; d < n; ++d) sig[d] = signal.read(d, signal_time);
    std::vector<DeviceId> leaders;
    leaders.reserve(n);
    for (const auto& out : world.outputs()) leaders.push_back(out->leader);
    result.final_leaders = leaders;
    result.final_signals = sig;
    try {
      const RegionPartition partition = extract_partition(leaders);
      PathErrorOracle oracle(graph, metric, sig);
      all_contiguous &= check_contiguity(partition, graph).contiguous;
      all_within &= verify_within_error(partition, oracle, cfg.eta).ok;
      all_optimal &=
          verify_local_optimality(partition, graph, oracle, cfg.eta).ok;
      return partition.region_count();
    } catch (const MalformedPartition&) {
      all_contiguous = all_within = all_optimal = false;
      return group_by_leader(leaders).region_count();
    }
  };

  if (phase_count == 1) {
    world.reset_quiescence(cfg.quiescence_window);
    while (true) {
      world.run_until_time(next_sample);
      sample_row(next_sample);
      if (world.min_unchanged_rounds() >= cfg.quiescence_window) {
        result.stabilised_at = world.last_change_time();
        break;
      }
      if (world.min_rounds() >= cfg.max_rounds) break;
      next_sample += cfg.sample_interval;
    }
    const bool stabilised = result.stabilised_at.has_value();
    all_phases_stabilised = stabilised;
    const std::size_t regions = verify_now(world.clock());
    result.phases.push_back({0, stabilised, regions});
    if (!stabilised) all_contiguous = all_within = all_optimal = false;
  } else {
    for (std::size_t p = 0; p < phase_count; ++p) {
      const double phase_end = phase_length * static_cast<double>(p + 1);
      world.reset_quiescence(cfg.quiescence_window);
      while (next_sample < phase_end) {
        world.run_until_time(next_sample);
        sample_row(next_sample);
        next_sample += cfg.sample_interval;
      }
      world.run_before_time(phase_end);
      const bool stabilised =
          world.min_unchanged_rounds() >= cfg.quiescence_window;
      all_phases_stabilised &= stabilised;
      // Any interior instant works for the phase's static signal.
      const std::size_t regions = verify_now(phase_end - phase_length * 0.5);
      result.phases.push_back({p, stabilised, regions});
      if (!stabilised) all_contiguous = all_within = all_optimal = false;
    }
  }

  result.verdicts.stabilised = all_phases_stabilised;
  result.verdicts.contiguous = all_contiguous;
  result.verdicts.within_error = all_within;
  result.verdicts.locally_optimal = all_optimal;
  result.cost = message_cost(graph, metric, strength, world.event_count());
  if (cfg.trace) result.trace = world.trace();
  return result;
}

namespace {

void write_series_header(std::ostream& out) {
  out << "seed,deployment,signal,strength,metric,eta,time,regions,mean_size,"
         "sigma_mu,mu_sigma,sigma_sigma\n";
}

void write_series_rows(std::ostream& out, const std::string& identity,
                       const std::vector<MetricsRow>& series) {
  for (const MetricsRow& row : series)
    out << identity << ',' << format_double(row.time) << ','
        << row.region_count << ',' << format_double(row.mean_region_size)
        << ',' << format_double(row.sigma_of_region_means) << ','
        << format_double(row.mean_of_region_sigmas) << ','
        << format_double(row.sigma_of_region_sigmas) << '\n';
}

std::string cell_identity(const CellConfig& cell, double eta) {
  std::string signal_name = cell.signal.name();
  for (char& c : signal_name)
    if (c == ',') c = ';';
  return cell.deployment.name() + "," + signal_name + "," +
         cell.strength.name() + "," + EdgeMetric{cell.metric}.name() + "," +
         format_double(eta);
}

}  // namespace

SweepOutcome sweep(const ExperimentConfig& cfg, const SweepOptions& options) {
  const std::vector<CellConfig> cells = expand_cells(cfg);
  if (cfg.seeds.empty())
    throw std::invalid_argument("sweep needs at least one seed");

  struct Job {
    std::size_t cell_index;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (std::uint64_t seed : cfg.seeds) jobs.push_back({c, seed});

  std::vector<RunResult> results(jobs.size());
  std::vector<std::string> errors(jobs.size());
  const unsigned workers =
      std::max(1u, std::min<unsigned>(options.parallel,
                                      static_cast<unsigned>(jobs.size())));
  std::atomic<std::size_t> cursor{0};
  const auto worker = [&] {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        results[i] = run_experiment(cfg, cells[jobs[i].cell_index],
                                    jobs[i].seed);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  SweepOutcome outcome;
  outcome.runs = jobs.size();

  namespace fs = std::filesystem;
  if (options.write_files) fs::create_directories(cfg.out_dir);

  std::ofstream verdicts_csv;
  if (options.write_files) {
    verdicts_csv.open(fs::path(cfg.out_dir) / "verdicts.csv");
    verdicts_csv << "seed,deployment,signal,strength,metric,eta,stabilised,"
                    "contiguous,within_error,locally_optimal\n";
  }

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const CellConfig& cell = cells[jobs[i].cell_index];
    const std::string slug = cell.slug(cfg.eta);
    if (!errors[i].empty()) {
      ++outcome.failed;
      if (options.print_verdicts)
        std::cout << slug << " seed=" << jobs[i].seed
                  << ": error: " << errors[i] << "\n";
      continue;
    }
    const RunResult& r = results[i];
    if (!r.verdicts.all()) ++outcome.failed;
    if (options.print_verdicts) {
      std::cout << slug << " seed=" << jobs[i].seed << ": stabilised="
                << (r.verdicts.stabilised ? "yes" : "no")
                << " contiguous=" << (r.verdicts.contiguous ? "yes" : "no")
                << " within_error=" << (r.verdicts.within_error ? "yes" : "no")
                << " locally_optimal="
                << (r.verdicts.locally_optimal ? "yes" : "no");
      if (r.phases.size() > 1) {
        std::cout << " regions_per_phase=";
        for (std::size_t p = 0; p < r.phases.size(); ++p)
          std::cout << (p ? ";" : "") << r.phases[p].region_count;
      }
      std::cout << "\n";
    }
    if (!options.write_files) continue;

    const std::string identity =
        std::to_string(jobs[i].seed) + "," + cell_identity(cell, cfg.eta);
    std::ofstream run_csv(fs::path(cfg.out_dir) /
                          (slug + "_seed" + std::to_string(jobs[i].seed) +
                           ".csv"));
    write_series_header(run_csv);
    write_series_rows(run_csv, identity, r.series);

    verdicts_csv << jobs[i].seed << ',' << cell_identity(cell, cfg.eta) << ','
                 << r.verdicts.stabilised << ',' << r.verdicts.contiguous
                 << ',' << r.verdicts.within_error << ','
                 << r.verdicts.locally_optimal << '\n';

    if (cfg.trace) {
      std::ofstream trace_csv(fs::path(cfg.out_dir) /
                              (slug + "_seed" + std::to_string(jobs[i].seed) +
                               "_trace.csv"));
      trace_csv << "eventIndex,time,deviceId,output\n";
      for (const auto& e : r.trace.events)
        trace_csv << e.index << ',' << format_double(e.time) << ',' << e.device
                  << ',' << e.output.leader << '\n';
    }
  }

  // Per-cell mean series across seeds, aligned by sampling instant.
  if (options.write_files) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      std::map<double, std::pair<MetricsRow, std::size_t>> by_time;
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (jobs[i].cell_index != c || !errors[i].empty()) continue;
        for (const MetricsRow& row : results[i].series) {
          auto& [acc, count] = by_time[row.time];
          acc.time = row.time;
          acc.region_count += row.region_count;
          acc.mean_region_size += row.mean_region_size;
          acc.sigma_of_region_means += row.sigma_of_region_means;
          acc.mean_of_region_sigmas += row.mean_of_region_sigmas;
          acc.sigma_of_region_sigmas += row.sigma_of_region_sigmas;
          ++count;
        }
      }
      std::ofstream agg(fs::path(cfg.out_dir) /
                        (cells[c].slug(cfg.eta) + "_mean.csv"));
      agg << "deployment,signal,strength,metric,eta,time,regions,mean_size,"
             "sigma_mu,mu_sigma,sigma_sigma\n";
      for (const auto& [time, entry] : by_time) {
        const auto& [acc, count] = entry;
        const double k = static_cast<double>(count);
        agg << cell_identity(cells[c], cfg.eta) << ','
            << format_double(time) << ','
            << format_double(static_cast<double>(acc.region_count) / k) << ','
            << format_double(acc.mean_region_size / k) << ','
            << format_double(acc.sigma_of_region_means / k) << ','
            << format_double(acc.mean_of_region_sigmas / k) << ','
            << format_double(acc.sigma_of_region_sigmas / k) << '\n';
      }
    }
  }

  return outcome;
}

}  // namespace aggsamp
