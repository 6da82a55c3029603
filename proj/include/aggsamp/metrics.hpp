#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aggsamp/topology.hpp"

namespace aggsamp {

enum class EdgeMetricKind { Distance, Diff, Mix };

// Edge error between neighbouring devices.
//   Distance  Euclidean distance
//   Diff      max(epsilon, |signal difference|); the floor keeps the weight
//             positive so accumulated errors keep satisfying the triangle
//             inequality
//   Mix       product of the two
struct EdgeMetric {
  EdgeMetricKind kind = EdgeMetricKind::Distance;
  double epsilon = 1e-6;

  bool uses_signal() const { return kind != EdgeMetricKind::Distance; }
  std::string name() const;
};

// Edge error from precomputed ingredients (the form device programs use:
// the remote signal value arrives in the sender's payload).
double edge_error_value(const EdgeMetric& metric, double euclidean,
                        double signal_a, double signal_b);

// Edge error between two devices given all device signals.
double edge_error(const EdgeMetric& metric, DeviceId a, DeviceId b,
                  const Deployment& deployment,
                  std::span<const double> signals);

enum class StrengthKind { Value, Mean, Variance, External };

// How a device derives its leadership strength.
//   Value      its own signal reading
//   Mean       mean reading over its neighbourhood (self included)
//   Variance   population variance of neighbourhood readings around the
//              neighbours' shared means; needs a prior round of mean-sharing
//   External   a fixed per-device table
struct StrengthPolicy {
  StrengthKind kind = StrengthKind::Value;
  std::shared_ptr<const std::vector<double>> table;

  static StrengthPolicy value() { return {StrengthKind::Value, nullptr}; }
  static StrengthPolicy mean() { return {StrengthKind::Mean, nullptr}; }
  static StrengthPolicy variance() { return {StrengthKind::Variance, nullptr}; }
  static StrengthPolicy external(std::vector<double> table) {
    return {StrengthKind::External,
            std::make_shared<const std::vector<double>>(std::move(table))};
  }

  bool uses_signal_inbox() const {
    return kind == StrengthKind::Mean || kind == StrengthKind::Variance;
  }
  bool uses_mean_inbox() const { return kind == StrengthKind::Variance; }
  std::string name() const;
};

// One neighbour's contribution to a strength computation.
struct NeighborSample {
  DeviceId id = kNoDevice;
  double signal = 0.0;
  double shared_mean = 0.0;
};

// Neighbourhood mean reading; samples must include the device itself.
double neighborhood_mean(std::span<const NeighborSample> samples);

// Leadership strength of device self.  samples holds one entry per inbox
// device (self included); shared_mean entries are only consulted by the
// variance policy.  Throws std::out_of_range if an external table misses the
// device.
double leader_strength(const StrengthPolicy& policy, DeviceId self,
                       std::span<const NeighborSample> samples);

}  // namespace aggsamp
