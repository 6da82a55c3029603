#include "support/oracles.hpp"

#include <limits>
#include <stdexcept>

namespace aggsamp::testing {

namespace {

void enumerate_paths(const NetworkGraph& graph, const EdgeMetric& metric,
                     const std::vector<double>& signals, DeviceId here,
                     DeviceId goal, std::vector<char>& visited, double cost,
                     double& best) {
  if (here == goal) {
    best = std::min(best, cost);
    return;
  }
  for (DeviceId next : graph.neighbors(here)) {
    if (visited[next]) continue;
    visited[next] = 1;
    enumerate_paths(graph, metric, signals, next, goal, visited,
                    cost + edge_error(metric, here, next, graph.deployment(),
                                      signals),
                    best);
    visited[next] = 0;
  }
}

}  // namespace

double brute_force_path_error(const NetworkGraph& graph,
                              const EdgeMetric& metric,
                              const std::vector<double>& signals, DeviceId a,
                              DeviceId b) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<char> visited(graph.device_count(), 0);
  visited[a] = 1;
  enumerate_paths(graph, metric, signals, a, b, visited, 0.0, best);
  return a == b ? 0.0 : best;
}

std::vector<Candidacy> sampler_fixed_point(const NetworkGraph& graph,
                                           const std::vector<double>& strengths,
                                           const EdgeMetric& metric,
                                           const std::vector<double>& signals,
                                           double radius) {
  const std::size_t n = graph.device_count();
  std::vector<Candidacy> state(n);
  for (DeviceId d = 0; d < n; ++d) state[d] = {-strengths[d], 0.0, d};

  for (std::size_t iter = 0; iter < 20 * n + 100; ++iter) {
    std::vector<Candidacy> next(n);
    bool changed = false;
    for (DeviceId d = 0; d < n; ++d) {
      Candidacy best{-strengths[d], 0.0, d};
      for (DeviceId nb : graph.neighbors(d)) {
        const double w =
            edge_error(metric, nb, d, graph.deployment(), signals);
        best = std::min(best, expansion_logic(add_edge_error(state[nb], w), d,
                                              radius));
      }
      next[d] = best;
      changed |= !(best == state[d]);
    }
    state = std::move(next);
    if (!changed) return state;
  }
  throw std::runtime_error("candidacy iteration did not reach a fixed point");
}

NetworkGraph random_connected_graph(std::uint64_t seed, std::size_t n,
                                    unsigned k_min) {
  return build_network(build_deployment(DeploymentKind::Uniform, n, seed),
                       k_min);
}

NetworkGraph line_graph(std::size_t n, double spacing) {
  Deployment d;
  d.arena = {spacing * static_cast<double>(n), spacing};
  std::vector<std::pair<DeviceId, DeviceId>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    d.positions.push_back({spacing * static_cast<double>(i), 0.0});
    if (i + 1 < n)
      edges.emplace_back(static_cast<DeviceId>(i),
                         static_cast<DeviceId>(i + 1));
  }
  return NetworkGraph(std::move(d), edges);
}

}  // namespace aggsamp::testing
