#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aggsamp {

using DeviceId = std::uint32_t;

// Reserved id, outside the valid device range; used as the leader field of a
// discarded candidacy.
inline constexpr DeviceId kNoDevice = std::numeric_limits<DeviceId>::max();

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

inline double distance(const Vec2& a, const Vec2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

struct Arena {
  double width = 0.0;
  double height = 0.0;
};

enum class DeploymentKind { Grid, PerturbedGrid, Uniform, Exponential };

const char* to_string(DeploymentKind kind);

// Positions of n devices inside an arena; device ids are the indices.
struct Deployment {
  std::vector<Vec2> positions;
  Arena arena;

  std::size_t size() const { return positions.size(); }
};

// Generates n device positions.  Generated arenas are square with side
// ceil(sqrt(n)) in lattice-spacing units:
//   Grid           row-major unit lattice, truncated to n
//   PerturbedGrid  grid plus per-coordinate jitter in [-0.45, 0.45], redrawn
//                  until inside the arena
//   Uniform        both coordinates uniform over the arena
//   Exponential    x uniform, y exponential with rate 3/side, redrawn until
//                  inside the arena
// Identical (kind, n, seed) yield bit-identical deployments.
Deployment build_deployment(DeploymentKind kind, std::size_t n,
                            std::uint64_t seed);

// Parse failure with the 1-based line it occurred on (0 if not line-specific).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " +
                                      message
                                : std::move(message)),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Reads station positions from a CSV of "id,x,y" rows ('#' starts a comment).
// Ids must be unique and cover 0..n-1.  Positions are translated so the
// bounding box, grown by 1% per side, becomes the arena.
Deployment load_stations(const std::filesystem::path& path);

// Undirected connected graph over a deployment.  Adjacency lists are sorted by
// id; an edge appears in both endpoint lists and never links a device to
// itself.
class NetworkGraph {
 public:
  NetworkGraph() = default;
  // Builds the graph from explicit undirected edges (tests and oracles).
  NetworkGraph(Deployment deployment,
               const std::vector<std::pair<DeviceId, DeviceId>>& edges);

  const Deployment& deployment() const { return deployment_; }
  std::size_t device_count() const { return deployment_.size(); }
  const std::vector<DeviceId>& neighbors(DeviceId d) const {
    return adjacency_[d];
  }
  const Vec2& position(DeviceId d) const { return deployment_.positions[d]; }
  double edge_length(DeviceId a, DeviceId b) const {
    return distance(position(a), position(b));
  }
  // Undirected edge list with a < b, sorted.
  std::vector<std::pair<DeviceId, DeviceId>> edges() const;
  std::size_t edge_count() const;
  bool adjacent(DeviceId a, DeviceId b) const;

  // Set when the requested neighbour count met or exceeded the device count
  // and a complete graph was produced instead.
  bool degenerate_neighbor_count() const { return degenerate_; }

  friend NetworkGraph build_network(Deployment deployment, unsigned k_min);

 private:
  Deployment deployment_;
  std::vector<std::vector<DeviceId>> adjacency_;
  bool degenerate_ = false;
};

// Connects each device to at least its k_min nearest peers (symmetric
// closure), then repeatedly joins the closest pair of distinct components
// until the graph is connected.  k_min >= n degrades to the complete graph
// and sets the degenerate flag.
NetworkGraph build_network(Deployment deployment, unsigned k_min = 8);

}  // namespace aggsamp
