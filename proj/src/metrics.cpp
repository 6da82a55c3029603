#include "aggsamp/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace aggsamp {

std::string EdgeMetric::name() const {
  switch (kind) {
    case EdgeMetricKind::Distance:
      return "distance";
    case EdgeMetricKind::Diff:
      return "diff";
    case EdgeMetricKind::Mix:
      return "mix";
  }
  return "?";
}

double edge_error_value(const EdgeMetric& metric, double euclidean,
                        double signal_a, double signal_b) {
  switch (metric.kind) {
    case EdgeMetricKind::Distance:
      return euclidean;
    case EdgeMetricKind::Diff:
      return std::max(metric.epsilon, std::fabs(signal_a - signal_b));
    case EdgeMetricKind::Mix:
      return euclidean *
             std::max(metric.epsilon, std::fabs(signal_a - signal_b));
  }
  throw std::logic_error("unreachable metric kind");
}

double edge_error(const EdgeMetric& metric, DeviceId a, DeviceId b,
                  const Deployment& deployment,
                  std::span<const double> signals) {
  if (a == b) return 0.0;
  const double euclidean =
      distance(deployment.positions[a], deployment.positions[b]);
  const bool needs_signal = metric.uses_signal();
  const double sa = needs_signal ? signals[a] : 0.0;
  const double sb = needs_signal ? signals[b] : 0.0;
  return edge_error_value(metric, euclidean, sa, sb);
}

std::string StrengthPolicy::name() const {
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

double neighborhood_mean(std::span<const NeighborSample> samples) {
  if (samples.empty())
    throw std::invalid_argument("neighbourhood must include the device itself");
  double sum = 0.0;
  for (const NeighborSample& s : samples) sum += s.signal;
  return sum / static_cast<double>(samples.size());
}

double leader_strength(const StrengthPolicy& policy, DeviceId self,
                       std::span<const NeighborSample> samples) {
  switch (policy.kind) {
    case StrengthKind::Value: {
      for (const NeighborSample& s : samples)
        if (s.id == self) return s.signal;
      throw std::invalid_argument("samples must include the device itself");
    }
    case StrengthKind::Mean:
      return neighborhood_mean(samples);
    case StrengthKind::Variance: {
      if (samples.empty())
        throw std::invalid_argument(
            "neighbourhood must include the device itself");
      double sum = 0.0;
      for (const NeighborSample& s : samples) {
        const double d = s.shared_mean - s.signal;
        sum += d * d;
      }
      return sum / static_cast<double>(samples.size());
    }
    case StrengthKind::External: {
      if (!policy.table || self >= policy.table->size())
        throw std::out_of_range("no external strength for device " +
                                std::to_string(self));
      return (*policy.table)[self];
    }
  }
  throw std::logic_error("unreachable strength kind");
}

}  // namespace aggsamp
