#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "aggsamp/topology.hpp"

namespace aggsamp {

enum class SignalKind { Constant, Uniform, Gauss, MultiGauss, PerDevice, Dynamic };

// Description of an environmental signal over the arena.
//   Constant    the same value everywhere
//   Uniform     one i.i.d. uniform [0,1) draw per device, fixed for the run
//   Gauss       bell centred on the arena, amplitude * exp(-r^2 / (2 spread^2))
//   MultiGauss  three bells of amplitude/3 on the arena diagonal (bottom-left
//               corner, centre, top-right corner)
//   PerDevice   replayed per-device values loaded from a CSV
//   Dynamic     cycles the listed phases, each lasting phase_length time units
//
// spread <= 0 requests the default (a quarter of the arena side).
struct SignalSpec {
  SignalKind kind = SignalKind::Constant;
  double constant_value = 0.0;
  double amplitude = 10.0;
  double spread = 0.0;
  std::vector<double> per_device;
  std::vector<SignalSpec> phases;
  double phase_length = 300.0;

  static SignalSpec constant(double v) {
    SignalSpec s;
    s.kind = SignalKind::Constant;
    s.constant_value = v;
    return s;
  }
  static SignalSpec uniform() {
    SignalSpec s;
    s.kind = SignalKind::Uniform;
    return s;
  }
  static SignalSpec gauss(double amplitude = 10.0, double spread = 0.0) {
    SignalSpec s;
    s.kind = SignalKind::Gauss;
    s.amplitude = amplitude;
    s.spread = spread;
    return s;
  }
  static SignalSpec multigauss(double amplitude = 10.0, double spread = 0.0) {
    SignalSpec s;
    s.kind = SignalKind::MultiGauss;
    s.amplitude = amplitude;
    s.spread = spread;
    return s;
  }
  static SignalSpec dynamic(std::vector<SignalSpec> phases,
                            double phase_length = 300.0) {
    SignalSpec s;
    s.kind = SignalKind::Dynamic;
    s.phases = std::move(phases);
    s.phase_length = phase_length;
    return s;
  }

  std::string name() const;
};

// A realised signal: a pure function of (device, time) for one deployment and
// seed.  Uniform draws are keyed by (derived seed, device id), so each phase
// of a dynamic signal keeps its own frozen field across cycles.
class SignalField {
 public:
  SignalField() = default;
  SignalField(SignalSpec spec, const Deployment* deployment,
              std::uint64_t seed);

  double read(DeviceId d, double time) const;
  // Index of the phase active at the given time (0 for static signals).
  std::size_t phase_at(double time) const;
  std::size_t phase_count() const {
    return spec_.kind == SignalKind::Dynamic ? spec_.phases.size() : 1;
  }
  double phase_length() const { return spec_.phase_length; }
  const SignalSpec& spec() const { return spec_; }

 private:
  double read_static(const SignalSpec& spec, std::uint64_t seed, DeviceId d)
      const;

  SignalSpec spec_;
  const Deployment* deployment_ = nullptr;
  std::uint64_t seed_ = 0;
};

SignalField make_signal(SignalSpec spec, const Deployment& deployment,
                        std::uint64_t seed);

double read_sensor(const SignalField& field, DeviceId d, double time);

// Loads "id,value" rows ('#' comments allowed) into a per-device replay
// signal; ids must be unique and cover 0..n-1.
SignalSpec load_signal_table(const std::filesystem::path& path);

// Loads "id,value" rows into a table usable as externally assigned leader
// strengths.
std::vector<double> load_value_table(const std::filesystem::path& path);

}  // namespace aggsamp
