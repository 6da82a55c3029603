#include "aggsamp/signals.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "aggsamp/rng.hpp"

namespace aggsamp {

namespace {

double bell(const Vec2& p, const Vec2& center, double amplitude,
            double spread) {
  const double dx = p.x - center.x;
  const double dy = p.y - center.y;
  return amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * spread * spread));
}

}  // namespace

std::string SignalSpec::name() const {
  switch (kind) {
    case SignalKind::Constant:
      return "constant";
    case SignalKind::Uniform:
      return "uniform";
    case SignalKind::Gauss:
      return "gauss";
    case SignalKind::MultiGauss:
      return "multigauss";
    case SignalKind::PerDevice:
      return "file";
    case SignalKind::Dynamic: {
      std::string out = "dynamic";
      char sep = ':';
      for (const SignalSpec& p : phases) {
        out += sep + p.name();
        sep = ';';
      }
      return out;
    }
  }
  return "?";
}

SignalField::SignalField(SignalSpec spec, const Deployment* deployment,
                         std::uint64_t seed)
    : spec_(std::move(spec)), deployment_(deployment), seed_(seed) {
  if (spec_.kind == SignalKind::Dynamic) {
    if (spec_.phases.empty())
      throw std::invalid_argument("dynamic signal needs at least one phase");
    if (!(spec_.phase_length > 0.0))
      throw std::invalid_argument("phase length must be positive");
    for (const SignalSpec& p : spec_.phases) {
      if (p.kind == SignalKind::Dynamic)
        throw std::invalid_argument("dynamic phases cannot nest");
      if (p.kind == SignalKind::PerDevice &&
          p.per_device.size() != deployment_->size())
        throw std::invalid_argument("replay table must cover every device");
    }
  }
  if (spec_.kind == SignalKind::PerDevice &&
      spec_.per_device.size() != deployment_->size())
    throw std::invalid_argument("replay table must cover every device");
}

std::size_t SignalField::phase_at(double time) const {
  if (spec_.kind != SignalKind::Dynamic) return 0;
  const auto tick =
      static_cast<std::uint64_t>(std::floor(time / spec_.phase_length));
  return static_cast<std::size_t>(tick % spec_.phases.size());
}

double SignalField::read_static(const SignalSpec& spec, std::uint64_t seed,
                                DeviceId d) const {
  const Arena& arena = deployment_->arena;
  const double side = std::max(arena.width, arena.height);
  const double spread =
      spec.spread > 0.0 ? spec.spread : (side > 0.0 ? side / 4.0 : 1.0);
  const Vec2 p = deployment_->positions[d];
  switch (spec.kind) {
    case SignalKind::Constant:
      return spec.constant_value;
    case SignalKind::Uniform:
      return keyed_uniform01(seed, d);
    case SignalKind::Gauss:
      return bell(p, {arena.width / 2.0, arena.height / 2.0}, spec.amplitude,
                  spread);
    case SignalKind::MultiGauss: {
      const double a = spec.amplitude / 3.0;
      return bell(p, {0.0, 0.0}, a, spread) +
             bell(p, {arena.width / 2.0, arena.height / 2.0}, a, spread) +
             bell(p, {arena.width, arena.height}, a, spread);
    }
    case SignalKind::PerDevice:
      return spec.per_device[d];
    case SignalKind::Dynamic:
      break;
  }
  throw std::logic_error("unreachable signal kind");
}

double SignalField::read(DeviceId d, double time) const {
  if (spec_.kind != SignalKind::Dynamic)
    return read_static(spec_, derive_seed(seed_, 0x7369676eULL), d);
  const std::size_t phase = phase_at(time);
  return read_static(spec_.phases[phase],
                     derive_seed(seed_, 0x7369676eULL, phase), d);
}

SignalField make_signal(SignalSpec spec, const Deployment& deployment,
                        std::uint64_t seed) {
  return SignalField(std::move(spec), &deployment, seed);
}

double read_sensor(const SignalField& field, DeviceId d, double time) {
  return field.read(d, time);
}

namespace {

std::vector<double> load_id_value_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<std::pair<std::uint64_t, double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    line = line.substr(begin, line.find_last_not_of(" \t\r") - begin + 1);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    long long id;
    double value;
    if (!(fields >> id >> value) || id < 0 || !(fields >> std::ws).eof() ||
        !std::isfinite(value))
      throw ParseError("expected id,value", lineno);
    for (const auto& prev : rows)
      if (prev.first == static_cast<std::uint64_t>(id))
        throw ParseError("duplicate device id " + std::to_string(id), lineno);
    rows.emplace_back(static_cast<std::uint64_t>(id), value);
  }
  if (rows.empty()) throw ParseError("no rows in " + path.string());
  std::vector<double> table(rows.size());
  for (const auto& [id, value] : rows) {
    if (id >= table.size())
      throw ParseError("ids must cover 0.." + std::to_string(table.size() - 1) +
                       " (saw " + std::to_string(id) + ")");
    table[id] = value;
  }
  return table;
}

}  // namespace

SignalSpec load_signal_table(const std::filesystem::path& path) {
  SignalSpec s;
  s.kind = SignalKind::PerDevice;
  s.per_device = load_id_value_rows(path);
  return s;
}

std::vector<double> load_value_table(const std::filesystem::path& path) {
  return load_id_value_rows(path);
}

}  // namespace aggsamp
