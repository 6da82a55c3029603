#include "aggsamp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace aggsamp {

namespace {

RegionPartition group(std::span<const DeviceId> leaders, bool strict) {
  RegionPartition p;
  p.leader_of.assign(leaders.begin(), leaders.end());
  for (DeviceId d = 0; d < leaders.size(); ++d)
    p.regions[leaders[d]].push_back(d);
  if (strict)
    for (const auto& [leader, members] : p.regions)
      if (leader >= leaders.size() || leaders[leader] != leader)
        throw MalformedPartition(leader);
  return p;
}

}  // namespace

RegionPartition extract_partition(std::span<const DeviceId> leaders) {
  return group(leaders, true);
}

RegionPartition group_by_leader(std::span<const DeviceId> leaders) {
  return group(leaders, false);
}

ContiguityResult check_contiguity(const RegionPartition& partition,
                                  const NetworkGraph& graph) {
  ContiguityResult result;
  std::vector<char> seen(partition.device_count(), 0);
  std::vector<DeviceId> stack;
  for (const auto& [leader, members] : partition.regions) {
    // Flood fill within the region from its first member.
    stack.assign(1, members.front());
    seen[members.front()] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const DeviceId d = stack.back();
      stack.pop_back();
      for (DeviceId n : graph.neighbors(d)) {
        if (seen[n] || partition.leader_of[n] != leader) continue;
        seen[n] = 1;
        ++reached;
        stack.push_back(n);
      }
    }
    if (reached != members.size()) {
      result.contiguous = false;
      result.broken_regions.push_back(leader);
    }
  }
  return result;
}

MetricsRow partition_metrics(const RegionPartition& partition,
                             std::span<const double> signals, double time) {
  MetricsRow row;
  row.time = time;
  row.region_count = partition.region_count();
  if (row.region_count == 0) return row;
  row.mean_region_size = static_cast<double>(partition.device_count()) /
                         static_cast<double>(row.region_count);

  std::vector<double> means, sigmas;
  means.reserve(row.region_count);
  sigmas.reserve(row.region_count);
  for (const auto& [leader, members] : partition.regions) {
    double sum = 0.0;
    for (DeviceId d : members) sum += signals[d];
    const double mean = sum / static_cast<double>(members.size());
    double varsum = 0.0;
    for (DeviceId d : members) {
      const double delta = signals[d] - mean;
      varsum += delta * delta;
    }
    means.push_back(mean);
    sigmas.push_back(std::sqrt(varsum / static_cast<double>(members.size())));
  }

  const auto mean_of = [](const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
  };
  const auto population_sigma = [](const std::vector<double>& xs,
                                   double center) {
    double sum = 0.0;
    for (double x : xs) {
      const double d = x - center;
      sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(xs.size()));
  };

  const double grand_mean = mean_of(means);
  const double mean_sigma = mean_of(sigmas);
  row.sigma_of_region_means = population_sigma(means, grand_mean);
  row.mean_of_region_sigmas = mean_sigma;
  row.sigma_of_region_sigmas = population_sigma(sigmas, mean_sigma);
  return row;
}

PathErrorOracle::PathErrorOracle(const NetworkGraph& graph, EdgeMetric metric,
                                 std::vector<double> signals)
    : graph_(&graph),
      metric_(metric),
      signals_(std::move(signals)),
      rows_(graph.device_count()) {
  if (metric_.uses_signal() && signals_.size() != graph.device_count())
    throw std::invalid_argument("oracle needs one signal value per device");
}

std::span<const double> PathErrorOracle::row(DeviceId source) const {
  auto& row = rows_[source];
  if (!row.empty()) return row;
  const std::size_t n = graph_->device_count();
  row.assign(n, std::numeric_limits<double>::infinity());
  row[source] = 0.0;
  using Item = std::pair<double, DeviceId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  heap.push({0.0, source});
  while (!heap.empty()) {
    const auto [dist, d] = heap.top();
    heap.pop();
    if (dist > row[d]) continue;
    for (DeviceId next : graph_->neighbors(d)) {
      const double w = edge_error(metric_, d, next, graph_->deployment(),
                                  signals_);
      if (row[d] + w < row[next]) {
        row[next] = row[d] + w;
        heap.push({row[next], next});
      }
    }
  }
  return row;
}

double PathErrorOracle::path_error(DeviceId a, DeviceId b) const {
  return row(a)[b];
}

double region_error(const PathErrorOracle& oracle,
                    std::span<const DeviceId> region) {
  double worst = 0.0;
  for (std::size_t i = 0; i < region.size(); ++i) {
    const auto row = oracle.row(region[i]);
    for (std::size_t j = i + 1; j < region.size(); ++j)
      worst = std::max(worst, row[region[j]]);
  }
  return worst;
}

WithinErrorResult verify_within_error(const RegionPartition& partition,
                                      const PathErrorOracle& oracle,
                                      double eta) {
  WithinErrorResult result;
  for (const auto& [leader, members] : partition.regions) {
    const double err = region_error(oracle, members);
    if (err > eta && (result.ok || err > result.worst_error)) {
      result.ok = false;
      result.worst_region = leader;
      result.worst_error = err;
    }
  }
  return result;
}

OptimalityResult verify_local_optimality(const RegionPartition& partition,
                                         const NetworkGraph& graph,
                                         const PathErrorOracle& oracle,
                                         double eta, double k) {
  // Adjacent region pairs, from edges crossing a region boundary.
  std::vector<std::pair<DeviceId, DeviceId>> pairs;
  for (const auto& [a, b] : graph.edges()) {
    DeviceId la = partition.leader_of[a];
    DeviceId lb = partition.leader_of[b];
    if (la == lb) continue;
    if (lb < la) std::swap(la, lb);
    pairs.emplace_back(la, lb);
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  OptimalityResult result;
  const double bound = k * eta;
  for (const auto& [la, lb] : pairs) {
    const auto& ra = partition.regions.at(la);
    const auto& rb = partition.regions.at(lb);
    // Error of the merged region: worst pair within either side or across.
    double merged = std::max(region_error(oracle, ra), region_error(oracle, rb));
    if (merged < bound)
      for (DeviceId a : ra) {
        const auto row = oracle.row(a);
        for (DeviceId b : rb) merged = std::max(merged, row[b]);
      }
    if (merged < bound) {
      result.ok = false;
      result.violations.push_back({la, lb, merged});
    }
  }
  return result;
}

MessageCost message_cost(const NetworkGraph& graph, const EdgeMetric& metric,
                         const StrengthPolicy& strength,
                         std::uint64_t total_rounds) {
  MessageCost cost;
  cost.total_rounds = total_rounds;
  cost.records_per_deposit = 1;
  if (metric.uses_signal() || strength.uses_signal_inbox())
    ++cost.records_per_deposit;
  if (strength.uses_mean_inbox()) ++cost.records_per_deposit;

  const std::size_t n = graph.device_count();
  std::size_t deposit_sum = 0;
  for (DeviceId d = 0; d < n; ++d) {
    const std::size_t deposits = graph.neighbors(d).size() + 1;
    deposit_sum += deposits;
    cost.max_deposits_per_round = std::max(cost.max_deposits_per_round,
                                           deposits);
  }
  cost.mean_deposits_per_round =
      static_cast<double>(deposit_sum) / static_cast<double>(n);
  // Rounds are spread uniformly across devices by every scheduler, so the
  // mean deposit count per round prices the whole run.
  cost.total_records = static_cast<std::uint64_t>(
      std::llround(cost.mean_deposits_per_round *
                   static_cast<double>(cost.records_per_deposit) *
                   static_cast<double>(total_rounds)));
  return cost;
}

}  // namespace aggsamp
