#pragma once

#include <limits>
#include <tuple>

#include "aggsamp/topology.hpp"

namespace aggsamp {

// A leadership claim travelling through the network.  key is the negated
// leader strength, so the lexicographic (key, error_distance, leader) order
// prefers strong leaders, then short accumulated error, then low ids.
struct Candidacy {
  double key = std::numeric_limits<double>::infinity();
  double error_distance = std::numeric_limits<double>::infinity();
  DeviceId leader = kNoDevice;

  bool operator==(const Candidacy&) const = default;
};

inline bool operator<(const Candidacy& a, const Candidacy& b) {
  return std::tie(a.key, a.error_distance, a.leader) <
         std::tie(b.key, b.error_distance, b.leader);
}
inline bool operator>(const Candidacy& a, const Candidacy& b) { return b < a; }
inline bool operator<=(const Candidacy& a, const Candidacy& b) {
  return !(b < a);
}
inline bool operator>=(const Candidacy& a, const Candidacy& b) {
  return !(a < b);
}

// The neutral element of the candidacy fold: loses against every real claim.
inline constexpr Candidacy discard_candidacy() {
  return {std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), kNoDevice};
}

inline bool is_discard(const Candidacy& c) { return c.leader == kNoDevice; }

// Filters a received candidacy at device self: claims that travelled back to
// their own leader, or whose accumulated error reached the region radius, are
// discarded.  The radius is half the target sampling error, so two surviving
// leaders can never sit closer than that error.
inline Candidacy expansion_logic(const Candidacy& c, DeviceId self,
                                 double radius) {
  if (c.leader == self || c.error_distance >= radius) return discard_candidacy();
  return c;
}

// The same candidacy after crossing an edge of the given error weight.
inline Candidacy add_edge_error(Candidacy c, double weight) {
  c.error_distance += weight;
  return c;
}

}  // namespace aggsamp
