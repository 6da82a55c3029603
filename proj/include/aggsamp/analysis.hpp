#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "aggsamp/metrics.hpp"
#include "aggsamp/topology.hpp"

namespace aggsamp {

// A network split into leader-owned regions.
struct RegionPartition {
  std::vector<DeviceId> leader_of;                  // per device
  std::map<DeviceId, std::vector<DeviceId>> regions;  // leader -> members

  std::size_t device_count() const { return leader_of.size(); }
  std::size_t region_count() const { return regions.size(); }
};

class MalformedPartition : public std::runtime_error {
 public:
  explicit MalformedPartition(DeviceId leader)
      : std::runtime_error("device " + std::to_string(leader) +
                           " is named leader but follows another device") {}
};

// Groups devices by their leader output.  Throws MalformedPartition when a
// named leader does not lead itself (the mark of a snapshot taken before
// stabilisation).
RegionPartition extract_partition(std::span<const DeviceId> leaders);

// Same grouping without the leadership check, for metrics over transient
// snapshots.
RegionPartition group_by_leader(std::span<const DeviceId> leaders);

struct ContiguityResult {
  bool contiguous = true;
  std::vector<DeviceId> broken_regions;  // leaders of disconnected regions
};

// A region is contiguous when its members induce a connected subgraph.
ContiguityResult check_contiguity(const RegionPartition& partition,
                                  const NetworkGraph& graph);

// Descriptive statistics of one partition against the device signals.  All
// standard deviations are population ones (divisor = region count).
struct MetricsRow {
  double time = 0.0;
  std::size_t region_count = 0;
  double mean_region_size = 0.0;
  double sigma_of_region_means = 0.0;
  double mean_of_region_sigmas = 0.0;
  double sigma_of_region_sigmas = 0.0;
};

MetricsRow partition_metrics(const RegionPartition& partition,
                             std::span<const double> signals, double time);

// Shortest accumulated edge error between devices, by Dijkstra over the
// chosen metric's edge weights.  Rows are computed per source on first use
// and cached.
class PathErrorOracle {
 public:
  PathErrorOracle(const NetworkGraph& graph, EdgeMetric metric,
                  std::vector<double> signals);

  double path_error(DeviceId a, DeviceId b) const;
  std::span<const double> row(DeviceId source) const;
  const NetworkGraph& graph() const { return *graph_; }

 private:
  const NetworkGraph* graph_;
  EdgeMetric metric_;
  std::vector<double> signals_;
  mutable std::vector<std::vector<double>> rows_;
};

// Worst pairwise path error within one region (its sampling error).
double region_error(const PathErrorOracle& oracle,
                    std::span<const DeviceId> region);

struct WithinErrorResult {
  bool ok = true;
  DeviceId worst_region = kNoDevice;
  double worst_error = 0.0;
};

// Checks that every region's sampling error stays within the target eta.
WithinErrorResult verify_within_error(const RegionPartition& partition,
                                      const PathErrorOracle& oracle,
                                      double eta);

struct OptimalityViolation {
  DeviceId leader_a;
  DeviceId leader_b;
  double union_error;
};

struct OptimalityResult {
  bool ok = true;
  std::vector<OptimalityViolation> violations;
};

// A partition is locally optimal with efficiency k when merging any two
// adjacent regions would push the merged sampling error to at least k * eta:
// no pair of neighbouring regions is wastefully fine-grained.
OptimalityResult verify_local_optimality(const RegionPartition& partition,
                                         const NetworkGraph& graph,
                                         const PathErrorOracle& oracle,
                                         double eta, double k = 0.5);

// Communication footprint of a run: every round deposits one payload into
// each neighbour's mailbox and the device's own.  records_per_deposit counts
// the fields each payload carries (the candidacy, plus the signal reading
// and the neighbourhood mean when the metric or strength policy needs them
// shared).
struct MessageCost {
  double mean_deposits_per_round = 0.0;
  std::size_t max_deposits_per_round = 0;
  std::size_t records_per_deposit = 1;
  std::uint64_t total_rounds = 0;
  std::uint64_t total_records = 0;
};

MessageCost message_cost(const NetworkGraph& graph, const EdgeMetric& metric,
                         const StrengthPolicy& strength,
                         std::uint64_t total_rounds);

}  // namespace aggsamp
