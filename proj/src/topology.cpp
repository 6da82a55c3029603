#include "aggsamp/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "aggsamp/rng.hpp"

namespace aggsamp {

const char* to_string(DeploymentKind kind) {
  switch (kind) {
    case DeploymentKind::Grid:
      return "grid";
    case DeploymentKind::PerturbedGrid:
      return "pgrid";
    case DeploymentKind::Uniform:
      return "uniform";
    case DeploymentKind::Exponential:
      return "exp";
  }
  return "?";
}

namespace {

std::size_t lattice_side(std::size_t n) {
  return static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(n))));
}

bool taken(const std::vector<Vec2>& positions, const Vec2& p) {
  return std::find(positions.begin(), positions.end(), p) != positions.end();
}

}  // namespace

Deployment build_deployment(DeploymentKind kind, std::size_t n,
                            std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("device count must be positive");
  const std::size_t m = lattice_side(n);
  const double side = static_cast<double>(m);
  Deployment d;
  d.arena = {side, side};
  d.positions.reserve(n);
  Rng rng(derive_seed(seed, 0x6465706cULL));

  switch (kind) {
    case DeploymentKind::Grid:
      for (std::size_t i = 0; i < n; ++i)
        d.positions.push_back({static_cast<double>(i % m),
                               static_cast<double>(i / m)});
      break;
    case DeploymentKind::PerturbedGrid:
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 base{static_cast<double>(i % m),
                        static_cast<double>(i / m)};
        Vec2 p;
        do {
          p.x = base.x + rng.uniform(-0.45, 0.45);
        } while (p.x < 0.0 || p.x > side);
        do {
          p.y = base.y + rng.uniform(-0.45, 0.45);
        } while (p.y < 0.0 || p.y > side);
        d.positions.push_back(p);
      }
      break;
    case DeploymentKind::Uniform:
      for (std::size_t i = 0; i < n; ++i) {
        Vec2 p;
        do {
          p = {rng.uniform(0.0, side), rng.uniform(0.0, side)};
        } while (taken(d.positions, p));
        d.positions.push_back(p);
      }
      break;
    case DeploymentKind::Exponential: {
      const double rate = 3.0 / side;
      for (std::size_t i = 0; i < n; ++i) {
        Vec2 p;
        do {
          p.x = rng.uniform(0.0, side);
          do {
            p.y = rng.exponential(rate);
          } while (p.y > side);
        } while (taken(d.positions, p));
        d.positions.push_back(p);
      }
      break;
    }
  }
  return d;
}

Deployment load_stations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());

  struct Row {
    std::uint64_t id;
    Vec2 pos;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    // Trim whitespace; blank lines are allowed.
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    line = line.substr(begin, line.find_last_not_of(" \t\r") - begin + 1);

    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    Row row;
    long long id;
    if (!(fields >> id >> row.pos.x >> row.pos.y) || id < 0 ||
        !(fields >> std::ws).eof() || !std::isfinite(row.pos.x) ||
        !std::isfinite(row.pos.y))
      throw ParseError("expected id,x,y", lineno);
    row.id = static_cast<std::uint64_t>(id);
    for (const Row& prev : rows)
      if (prev.id == row.id)
        throw ParseError("duplicate device id " + std::to_string(id), lineno);
    rows.push_back(row);
  }
  if (rows.empty()) throw ParseError("no stations in " + path.string());
  for (const Row& row : rows)
    if (row.id >= rows.size())
      throw ParseError("station ids must cover 0.." +
                       std::to_string(rows.size() - 1) + " (saw " +
                       std::to_string(row.id) + ")");

  Deployment d;
  d.positions.resize(rows.size());
  Vec2 lo{rows[0].pos}, hi{rows[0].pos};
  for (const Row& row : rows) {
    lo.x = std::min(lo.x, row.pos.x);
    lo.y = std::min(lo.y, row.pos.y);
    hi.x = std::max(hi.x, row.pos.x);
    hi.y = std::max(hi.y, row.pos.y);
  }
  const double w = hi.x - lo.x;
  const double h = hi.y - lo.y;
  // Grow the bounding box by 1% and translate its corner to the origin so
  // every station sits strictly inside the arena.
  d.arena = {w * 1.01, h * 1.01};
  for (const Row& row : rows)
    d.positions[row.id] = {row.pos.x - lo.x + 0.005 * w,
                           row.pos.y - lo.y + 0.005 * h};
  return d;
}

NetworkGraph::NetworkGraph(
    Deployment deployment,
    const std::vector<std::pair<DeviceId, DeviceId>>& edges)
    : deployment_(std::move(deployment)),
      adjacency_(deployment_.size()) {
  for (const auto& [a, b] : edges) {
    if (a == b || a >= device_count() || b >= device_count())
      throw std::invalid_argument("invalid edge");
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

std::vector<std::pair<DeviceId, DeviceId>> NetworkGraph::edges() const {
  std::vector<std::pair<DeviceId, DeviceId>> out;
  for (DeviceId a = 0; a < adjacency_.size(); ++a)
    for (DeviceId b : adjacency_[a])
      if (a < b) out.emplace_back(a, b);
  return out;
}

std::size_t NetworkGraph::edge_count() const {
  std::size_t degree_sum = 0;
  for (const auto& list : adjacency_) degree_sum += list.size();
  return degree_sum / 2;
}

bool NetworkGraph::adjacent(DeviceId a, DeviceId b) const {
  const auto& list = adjacency_[a];
  return std::binary_search(list.begin(), list.end(), b);
}

namespace {

// Union-find over device ids.
class Components {
 public:
  explicit Components(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), DeviceId{0});
  }
  DeviceId find(DeviceId x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(DeviceId a, DeviceId b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<DeviceId> parent_;
};

double sqdist(const Vec2& a, const Vec2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

}  // namespace

NetworkGraph build_network(Deployment deployment, unsigned k_min) {
  const std::size_t n = deployment.size();
  NetworkGraph g;
  g.deployment_ = std::move(deployment);
  g.adjacency_.assign(n, {});
  const auto& pos = g.deployment_.positions;

  if (k_min >= n) {
    g.degenerate_ = n > 1;
    for (DeviceId a = 0; a < n; ++a)
      for (DeviceId b = 0; b < n; ++b)
        if (a != b) g.adjacency_[a].push_back(b);
    return g;
  }

  // k nearest neighbours per device, ties broken by id, then symmetric
  // closure.
  std::vector<std::pair<double, DeviceId>> order(n);
  for (DeviceId a = 0; a < n; ++a) {
    for (DeviceId b = 0; b < n; ++b) order[b] = {sqdist(pos[a], pos[b]), b};
    order[a].first = std::numeric_limits<double>::infinity();
    std::partial_sort(order.begin(), order.begin() + k_min, order.end());
    for (unsigned i = 0; i < k_min; ++i)
      g.adjacency_[a].push_back(order[i].second);
  }
  Components comp(n);
  for (DeviceId a = 0; a < n; ++a)
    for (DeviceId b : g.adjacency_[a]) comp.unite(a, b);
  for (DeviceId a = 0; a < n; ++a)
    for (DeviceId b : std::vector<DeviceId>(g.adjacency_[a]))
      g.adjacency_[b].push_back(a);

  // Bridge components through their closest cross pair until connected.
  while (true) {
    double best = std::numeric_limits<double>::infinity();
    std::pair<DeviceId, DeviceId> pick{kNoDevice, kNoDevice};
    for (DeviceId a = 0; a < n; ++a)
      for (DeviceId b = a + 1; b < n; ++b) {
        if (comp.find(a) == comp.find(b)) continue;
        const double d = sqdist(pos[a], pos[b]);
        if (d < best) {
          best = d;
          pick = {a, b};
        }
      }
    if (pick.first == kNoDevice) break;
    comp.unite(pick.first, pick.second);
    g.adjacency_[pick.first].push_back(pick.second);
    g.adjacency_[pick.second].push_back(pick.first);
  }

  for (auto& list : g.adjacency_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return g;
}

}  // namespace aggsamp
