#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "aggsamp/rng.hpp"
#include "aggsamp/signals.hpp"
#include "aggsamp/topology.hpp"

namespace aggsamp {

// How device rounds are scheduled in simulated time.
//   SynchronousSweep  every device once per unit tick, in id order; messages
//                     from a tick are visible from the next tick on
//   AsyncExponential  per-device exponential inter-round gaps (rate rounds
//                     per time unit); messages visible immediately
//   FixedFrequency    one round per period per device, phases drawn uniformly
//                     so devices stay unsynchronised
struct SchedulerSpec {
  enum class Kind { SynchronousSweep, AsyncExponential, FixedFrequency };
  Kind kind = Kind::AsyncExponential;
  double rate = 1.0;
  double period = 1.0;

  static SchedulerSpec synchronous() { return {Kind::SynchronousSweep, 1, 1}; }
  static SchedulerSpec async_exponential(double rate = 1.0) {
    return {Kind::AsyncExponential, rate, 1};
  }
  static SchedulerSpec fixed_frequency(double period) {
    return {Kind::FixedFrequency, 1, period};
  }
};

template <class Payload>
struct InboxEntry {
  DeviceId sender;
  const Payload* payload;
};

// One device round's view of the world: its retained inbox (latest payload
// per neighbour and from itself), its sensor reading, and the static graph.
template <class Payload>
struct StepContext {
  DeviceId self = 0;
  double time = 0.0;
  std::uint64_t round = 0;
  const NetworkGraph* graph = nullptr;
  double local_signal = 0.0;
  std::span<const InboxEntry<Payload>> inbox;

  const Payload* from(DeviceId sender) const {
    for (const auto& e : inbox)
      if (e.sender == sender) return e.payload;
    return nullptr;
  }
};

template <class Output, class Payload>
struct StepResult {
  Output output;
  Payload payload;
};

// A deterministic per-round device behaviour: no state outside the payloads.
template <class P>
concept FieldProgram = requires(const P& p,
                                const StepContext<typename P::Payload>& ctx) {
  typename P::Payload;
  typename P::Output;
  {
    p.step(ctx)
  } -> std::same_as<StepResult<typename P::Output, typename P::Payload>>;
};

struct TraceEvent {
  std::uint64_t index;
  DeviceId device;
  double time;
  bool operator==(const TraceEvent&) const = default;
};

template <class Output>
struct Trace {
  struct Event : TraceEvent {
    Output output;
    bool operator==(const Event&) const = default;
  };
  std::vector<Event> events;
  bool operator==(const Trace&) const = default;
};

template <class Output>
struct Snapshot {
  std::vector<Output> values;  // indexed by device id
  double taken_at = 0.0;
};

class IncompleteSnapshot : public std::runtime_error {
 public:
  explicit IncompleteSnapshot(DeviceId d)
      : std::runtime_error("device " + std::to_string(d) +
                           " has not completed a round yet") {}
};

// Raised when a device round throws or produces unusable values; carries the
// failing device and its round number in the message.
class RoundFailure : public std::runtime_error {
 public:
  RoundFailure(DeviceId d, std::uint64_t round, const std::string& what)
      : std::runtime_error("device " + std::to_string(d) + " round " +
                           std::to_string(round) + ": " + what) {}
};

// Discrete-event execution of one field program over a network.  Mailboxes
// retain the latest payload per sender forever; a device's inbox only ever
// holds entries from its neighbours and itself.
template <FieldProgram Program>
class World {
 public:
  using Payload = typename Program::Payload;
  using Output = typename Program::Output;

  World(const NetworkGraph& graph, Program program, SignalField signal,
        SchedulerSpec scheduler, std::uint64_t seed)
      : graph_(&graph),
        program_(std::move(program)),
        signal_(std::move(signal)),
        scheduler_(scheduler),
        rng_(derive_seed(seed, 0x73636865ULL)) {
    const std::size_t n = graph.device_count();
    inbox_ids_.resize(n);
    mailbox_.resize(n);
    for (DeviceId d = 0; d < n; ++d) {
      auto& ids = inbox_ids_[d];
      ids = graph.neighbors(d);
      ids.insert(std::lower_bound(ids.begin(), ids.end(), d), d);
      mailbox_[d].assign(ids.size(), std::nullopt);
    }
    out_routes_.resize(n);
    for (DeviceId d = 0; d < n; ++d)
      for (std::size_t slot = 0; slot < inbox_ids_[d].size(); ++slot)
        out_routes_[inbox_ids_[d][slot]].push_back(
            {d, static_cast<std::uint32_t>(slot)});
    outputs_.assign(n, std::nullopt);
    rounds_.assign(n, 0);
    unchanged_rounds_.assign(n, 0);

    switch (scheduler_.kind) {
      case SchedulerSpec::Kind::SynchronousSweep:
        break;
      case SchedulerSpec::Kind::AsyncExponential:
        if (!(scheduler_.rate > 0.0))
          throw std::invalid_argument("round rate must be positive");
        for (DeviceId d = 0; d < n; ++d)
          queue_.push({rng_.exponential(scheduler_.rate), d});
        break;
      case SchedulerSpec::Kind::FixedFrequency:
        if (!(scheduler_.period > 0.0))
          throw std::invalid_argument("round period must be positive");
        for (DeviceId d = 0; d < n; ++d)
          queue_.push({rng_.uniform(0.0, scheduler_.period), d});
        break;
    }
  }

  const NetworkGraph& graph() const { return *graph_; }
  const SignalField& signal() const { return signal_; }
  std::size_t device_count() const { return graph_->device_count(); }
  double clock() const { return clock_; }
  std::uint64_t event_count() const { return event_index_; }
  std::uint64_t rounds(DeviceId d) const { return rounds_[d]; }
  std::uint64_t min_rounds() const {
    return *std::min_element(rounds_.begin(), rounds_.end());
  }
  double last_change_time() const { return last_change_time_; }
  std::uint64_t min_unchanged_rounds() const {
    return *std::min_element(unchanged_rounds_.begin(),
                             unchanged_rounds_.end());
  }
  const std::vector<std::optional<Output>>& outputs() const { return outputs_; }
  std::uint64_t total_deposits() const { return total_deposits_; }

  void set_trace_enabled(bool on) { trace_enabled_ = on; }
  const Trace<Output>& trace() const { return trace_; }

  // Simulated time of the next device round.
  double next_event_time() const {
    if (scheduler_.kind == SchedulerSpec::Kind::SynchronousSweep)
      return static_cast<double>(sweep_index_);
    return queue_.top().first;
  }

  struct EventInfo {
    DeviceId device;
    double time;
    bool output_changed;
  };

  // Executes exactly one device round.
  EventInfo step() {
    DeviceId d;
    double t;
    if (scheduler_.kind == SchedulerSpec::Kind::SynchronousSweep) {
      d = sweep_cursor_;
      t = static_cast<double>(sweep_index_);
    } else {
      auto [qt, qd] = queue_.top();
      queue_.pop();
      d = qd;
      t = qt;
    }
    clock_ = t;

    scratch_inbox_.clear();
    const auto& ids = inbox_ids_[d];
    const auto& box = mailbox_[d];
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (box[i]) scratch_inbox_.push_back({ids[i], &*box[i]});

    StepContext<Payload> ctx;
    ctx.self = d;
    ctx.time = t;
    ctx.round = rounds_[d] + 1;
    ctx.graph = graph_;
    ctx.local_signal = signal_.read(d, t);
    ctx.inbox = scratch_inbox_;

    StepResult<Output, Payload> result = [&] {
      try {
        return program_.step(ctx);
      } catch (const RoundFailure&) {
        throw;
      } catch (const std::exception& e) {
        throw RoundFailure(d, ctx.round, e.what());
      }
    }();

    if (scheduler_.kind == SchedulerSpec::Kind::SynchronousSweep) {
      staged_.push_back({d, std::move(result.payload)});
      if (++sweep_cursor_ == device_count()) {
        for (auto& [sender, payload] : staged_) deposit(sender, payload);
        staged_.clear();
        sweep_cursor_ = 0;
        ++sweep_index_;
      }
    } else {
      deposit(d, result.payload);
      if (scheduler_.kind == SchedulerSpec::Kind::AsyncExponential)
        queue_.push({t + rng_.exponential(scheduler_.rate), d});
      else
        queue_.push({t + scheduler_.period, d});
    }

    if (++rounds_[d] == round_cap_ && below_cap_ > 0) --below_cap_;
    const bool changed = !outputs_[d] || !(*outputs_[d] == result.output);
    if (changed) {
      if (unchanged_rounds_[d] >= quiet_window_ && quiet_window_ > 0)
        --quiet_count_;
      unchanged_rounds_[d] = 0;
      last_change_time_ = t;
      outputs_[d] = std::move(result.output);
    } else {
      if (++unchanged_rounds_[d] == quiet_window_ && quiet_window_ > 0)
        ++quiet_count_;
    }
    if (trace_enabled_)
      trace_.events.push_back({{event_index_, d, t}, *outputs_[d]});
    ++event_index_;
    return {d, t, changed};
  }

  // Runs until every device has gone quiescence_window consecutive rounds
  // without an output change, or until every device has executed max_rounds
  // rounds.  Returns the time of the last output change when quiescence was
  // reached, std::nullopt otherwise.
  std::optional<double> run_until_stable(std::uint64_t quiescence_window,
                                         std::uint64_t max_rounds) {
    if (quiescence_window == 0)
      throw std::invalid_argument("quiescence window must be positive");
    set_quiet_window(quiescence_window);
    round_cap_ = max_rounds;
    below_cap_ = 0;
    for (DeviceId d = 0; d < device_count(); ++d)
      if (rounds_[d] < round_cap_) ++below_cap_;
    while (quiet_count_ < device_count()) {
      if (below_cap_ == 0) return std::nullopt;
      step();
    }
    return last_change_time_;
  }

  // Runs every round scheduled at or before the given time.
  void run_until_time(double t) {
    while (next_event_time() <= t) step();
  }

  // Runs every round scheduled strictly before the given time (phase
  // boundaries: a round at exactly t already sees the next phase).
  void run_before_time(double t) {
    while (next_event_time() < t) step();
  }

  // Runs until every device has executed at least extra further rounds;
  // returns how many output changes occurred.
  std::uint64_t run_additional_rounds(std::uint64_t extra) {
    std::vector<std::uint64_t> target(rounds_);
    for (auto& r : target) r += extra;
    std::uint64_t changes = 0;
    for (DeviceId d = 0; d < device_count(); ++d)
      while (rounds_[d] < target[d]) changes += step().output_changed;
    return changes;
  }

  // Starts a fresh quiescence observation window (used at phase boundaries).
  void reset_quiescence(std::uint64_t quiescence_window) {
    std::fill(unchanged_rounds_.begin(), unchanged_rounds_.end(), 0);
    quiet_count_ = 0;
    quiet_window_ = quiescence_window;
  }

  // Latest output of every device; requires every device to have completed a
  // round.
  Snapshot<Output> take_snapshot() const {
    Snapshot<Output> snap;
    snap.taken_at = clock_;
    snap.values.reserve(device_count());
    for (DeviceId d = 0; d < device_count(); ++d) {
      if (!outputs_[d]) throw IncompleteSnapshot(d);
      snap.values.push_back(*outputs_[d]);
    }
    return snap;
  }

  // Latest payload device d retains from the given sender, if any.
  const Payload* retained(DeviceId d, DeviceId sender) const {
    const auto& ids = inbox_ids_[d];
    const auto it = std::lower_bound(ids.begin(), ids.end(), sender);
    if (it == ids.end() || *it != sender) return nullptr;
    const auto& slot = mailbox_[d][it - ids.begin()];
    return slot ? &*slot : nullptr;
  }

 private:
  void set_quiet_window(std::uint64_t w) {
    if (w == quiet_window_) return;
    quiet_window_ = w;
    quiet_count_ = 0;
    for (DeviceId d = 0; d < device_count(); ++d)
      if (unchanged_rounds_[d] >= w) ++quiet_count_;
  }

  void deposit(DeviceId sender, const Payload& payload) {
    for (const auto& [receiver, slot] : out_routes_[sender])
      mailbox_[receiver][slot] = payload;
    total_deposits_ += out_routes_[sender].size();
  }

  struct Route {
    DeviceId receiver;
    std::uint32_t slot;
  };

  const NetworkGraph* graph_;
  Program program_;
  SignalField signal_;
  SchedulerSpec scheduler_;
  Rng rng_;

  std::vector<std::vector<DeviceId>> inbox_ids_;
  std::vector<std::vector<std::optional<Payload>>> mailbox_;
  std::vector<std::vector<Route>> out_routes_;
  std::vector<std::optional<Output>> outputs_;
  std::vector<std::uint64_t> rounds_;
  std::vector<std::uint64_t> unchanged_rounds_;
  std::uint64_t quiet_window_ = 0;
  std::size_t quiet_count_ = 0;
  std::uint64_t round_cap_ = 0;
  std::size_t below_cap_ = 0;
  double last_change_time_ = 0.0;
  double clock_ = 0.0;
  std::uint64_t event_index_ = 0;
  std::uint64_t total_deposits_ = 0;

  // Synchronous sweeps buffer deposits until the sweep completes, so a sweep
  // only sees the previous sweep's messages.
  std::vector<std::pair<DeviceId, Payload>> staged_;
  std::size_t sweep_cursor_ = 0;
  std::uint64_t sweep_index_ = 0;

  std::priority_queue<std::pair<double, DeviceId>,
                      std::vector<std::pair<double, DeviceId>>,
                      std::greater<>>
      queue_;

  std::vector<InboxEntry<Payload>> scratch_inbox_;
  bool trace_enabled_ = false;
  Trace<Output> trace_;
};

}  // namespace aggsamp
