#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <utility>
#include <vector>

#include "aggsamp/candidacy.hpp"
#include "aggsamp/metrics.hpp"
#include "aggsamp/runtime.hpp"

namespace aggsamp {

// share-with-minimisation fragment: each round the device folds its inbox
// through a progress function, takes the order minimum with a local floor,
// and emits the result as both output and payload.  top must be an absorbing
// worst element and progress must never move a value below its input's order
// position; under those conditions the round map is monotone and the fixed
// point self-stabilises.
//
// Progress is called as progress(ctx, sender, value); Floor as floor(ctx).
template <std::totally_ordered V, class Progress, class Floor>
class MinimisingShare {
 public:
  using Payload = V;
  using Output = V;

  MinimisingShare(V top, Progress progress, Floor floor)
      : top_(std::move(top)),
        progress_(std::move(progress)),
        floor_(std::move(floor)) {}

  StepResult<V, V> step(const StepContext<V>& ctx) const {
    V best = fold_inbox(ctx);
    V local = floor_(ctx);
    V result = std::min(local, best);
    return {result, result};
  }

  // The inbox fold alone: minimum of the progressed values, top when the
  // inbox is empty.
  V fold_inbox(const StepContext<V>& ctx) const {
    V best = top_;
    for (const InboxEntry<V>& e : ctx.inbox)
      best = std::min(best, progress_(ctx, e.sender, *e.payload));
    return best;
  }

 private:
  V top_;
  Progress progress_;
  Floor floor_;
};

template <std::totally_ordered V, class Progress, class Floor>
MinimisingShare<V, Progress, Floor> minimising_share(V top, Progress progress,
                                                     Floor floor) {
  return {std::move(top), std::move(progress), std::move(floor)};
}

// Distance estimation from a set of source devices.  A source outputs 0; any
// other device outputs the minimum over neighbour estimates plus the edge
// error towards that neighbour, infinity before one arrives.  The device's
// own previous estimate never feeds its new one, so estimates recover upward
// when sources move or disappear.
class GradientProgram {
 public:
  struct Payload {
    double estimate = std::numeric_limits<double>::infinity();
    double signal = 0.0;
    bool operator==(const Payload&) const = default;
  };
  using Output = double;

  GradientProgram(std::vector<bool> is_source, EdgeMetric metric)
      : is_source_(std::move(is_source)), metric_(metric) {}

  StepResult<Output, Payload> step(const StepContext<Payload>& ctx) const {
    double estimate = std::numeric_limits<double>::infinity();
    if (is_source_[ctx.self]) {
      estimate = 0.0;
    } else {
      for (const InboxEntry<Payload>& e : ctx.inbox) {
        if (e.sender == ctx.self) continue;
        const double w = edge_error_value(
            metric_, ctx.graph->edge_length(e.sender, ctx.self),
            e.payload->signal, ctx.local_signal);
        estimate = std::min(estimate, e.payload->estimate + w);
      }
    }
    return {estimate, {estimate, ctx.local_signal}};
  }

 private:
  std::vector<bool> is_source_;
  EdgeMetric metric_;
};

struct SamplerConfig {
  double radius = 0.0;  // half the target sampling error
  EdgeMetric metric;
  StrengthPolicy strength;

  static SamplerConfig for_error(double eta, EdgeMetric metric,
                                 StrengthPolicy strength) {
    if (!(eta > 0.0)) throw std::invalid_argument("target error must be positive");
    return {eta / 2.0, metric, std::move(strength)};
  }
};

// Self-organising partition of the network into sampling regions.  Every
// round a device computes its leadership strength, enters its own candidacy
// at error distance zero, and folds it against the relayed candidacies from
// its inbox, each grown by the connecting edge's error and filtered by
// expansion_logic.  The winning candidacy is the output and the payload; its
// leader field names the device's region.
class SamplerProgram {
 public:
  struct Payload {
    Candidacy winner;
    double signal = 0.0;
    double shared_mean = 0.0;
    bool operator==(const Payload&) const = default;
  };
  using Output = Candidacy;

  explicit SamplerProgram(SamplerConfig config) : config_(std::move(config)) {
    if (!(config_.radius > 0.0))
      throw std::invalid_argument("region radius must be positive");
  }

  StepResult<Output, Payload> step(const StepContext<Payload>& ctx) const {
    samples_.clear();
    for (const InboxEntry<Payload>& e : ctx.inbox)
      samples_.push_back({e.sender,
                          e.sender == ctx.self ? ctx.local_signal
                                               : e.payload->signal,
                          e.payload->shared_mean});
    if (!ctx.from(ctx.self))
      samples_.push_back({ctx.self, ctx.local_signal, 0.0});
    const double mean = neighborhood_mean(samples_);
    for (NeighborSample& s : samples_)
      if (s.id == ctx.self) s.shared_mean = mean;

    const double strength = leader_strength(config_.strength, ctx.self, samples_);
    if (!std::isfinite(strength))
      throw std::domain_error("non-finite leadership strength");

    // The fold covers neighbours only: the fresh local candidacy is the
    // floor, and a device's previous winner must never feed back at zero
    // cost or an adopted claim would sustain itself after its support died.
    // Relayed claims strictly grow (edge errors are positive) until the
    // radius kills them, which is what makes the result transient-free.
    Candidacy winner{-strength, 0.0, ctx.self};
    for (const InboxEntry<Payload>& e : ctx.inbox) {
      if (e.sender == ctx.self) continue;
      const double w = edge_error_value(
          config_.metric, ctx.graph->edge_length(e.sender, ctx.self),
          e.payload->signal, ctx.local_signal);
      if (!std::isfinite(w)) throw std::domain_error("non-finite edge error");
      const Candidacy grown = expansion_logic(
          add_edge_error(e.payload->winner, w), ctx.self, config_.radius);
      winner = std::min(winner, grown);
    }
    return {winner, {winner, ctx.local_signal, mean}};
  }

  const SamplerConfig& config() const { return config_; }

 private:
  SamplerConfig config_;
  mutable std::vector<NeighborSample> samples_;
};

// Region id of every device in a sampler snapshot.
inline std::vector<DeviceId> leaders_of(const Snapshot<Candidacy>& snap) {
  std::vector<DeviceId> out;
  out.reserve(snap.values.size());
  for (const Candidacy& c : snap.values) out.push_back(c.leader);
  return out;
}

}  // namespace aggsamp
