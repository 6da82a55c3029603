#include <doctest.h>

#include <algorithm>
#include <limits>

#include "aggsamp/candidacy.hpp"
#include "aggsamp/metrics.hpp"
#include "support/oracles.hpp"

using namespace aggsamp;

TEST_CASE("the discard candidacy loses against every real claim") {
  const Candidacy discard = discard_candidacy();
  CHECK(discard.key == std::numeric_limits<double>::infinity());
  CHECK(discard.error_distance == std::numeric_limits<double>::infinity());
  CHECK(discard.leader == kNoDevice);
  CHECK(is_discard(discard));
  const Candidacy weak{1e300, 1e300, 4000000000u};
  CHECK(weak < discard);
  CHECK(std::min(discard, weak) == weak);
}

TEST_CASE("candidacies order by strength, then error, then id") {
  const Candidacy strong{-5.0, 9.0, 9};
  const Candidacy weak{-1.0, 0.0, 0};
  CHECK(strong < weak);  // higher strength wins regardless of error
  const Candidacy near{-5.0, 1.0, 9};
  const Candidacy far{-5.0, 2.0, 0};
  CHECK(near < far);  // same strength: shorter error wins
  const Candidacy low_id{-5.0, 1.0, 3};
  CHECK(low_id < near);  // full tie: lower id wins
}

TEST_CASE("expansion logic discards returning and exhausted claims") {
  const Candidacy claim{-3.0, 1.0, 7};
  CHECK(expansion_logic(claim, 7, 2.0) == discard_candidacy());  // own claim
  CHECK(expansion_logic(claim, 2, 2.0) == claim);                // in budget
  const Candidacy at_radius{-3.0, 2.0, 7};
  CHECK(expansion_logic(at_radius, 2, 2.0) == discard_candidacy());  // boundary
  CHECK(expansion_logic(discard_candidacy(), 2, 2.0) == discard_candidacy());
}

TEST_CASE("crossing an edge accumulates its error") {
  const Candidacy c{-3.0, 1.25, 7};
  CHECK(add_edge_error(c, 0.5) == Candidacy{-3.0, 1.75, 7});
  CHECK(is_discard(expansion_logic(
      add_edge_error(discard_candidacy(), 1.0), 2, 1e308)));
}

TEST_CASE("edge error metrics") {
  const EdgeMetric distance_m{EdgeMetricKind::Distance, 1e-6};
  const EdgeMetric diff_m{EdgeMetricKind::Diff, 1e-6};
  const EdgeMetric mix_m{EdgeMetricKind::Mix, 1e-6};

  CHECK(edge_error_value(distance_m, 2.0, 0.0, 3.0) == 2.0);
  CHECK(edge_error_value(diff_m, 2.0, 0.0, 3.0) == 3.0);
  CHECK(edge_error_value(diff_m, 2.0, 5.0, 5.0) == 1e-6);  // floor at epsilon
  CHECK(edge_error_value(mix_m, 2.0, 0.0, 3.0) == 6.0);
  CHECK(edge_error_value(mix_m, 2.0, 5.0, 5.0) == 2e-6);

  Deployment dep;
  dep.positions = {{0, 0}, {3, 4}};
  dep.arena = {5, 5};
  const std::vector<double> signals{1.0, 2.5};
  CHECK(edge_error(distance_m, 0, 1, dep, signals) == 5.0);
  CHECK(edge_error(diff_m, 0, 1, dep, signals) == 1.5);
  CHECK(edge_error(mix_m, 0, 1, dep, signals) == 7.5);
  CHECK(edge_error(mix_m, 1, 1, dep, signals) == 0.0);  // self distance
}

TEST_CASE("edge errors are positive and symmetric on random graphs") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const NetworkGraph g = testing::random_connected_graph(seed, 40, 4);
    std::vector<double> signals(40);
    for (DeviceId d = 0; d < 40; ++d)
      signals[d] = std::sin(static_cast<double>(d) * 0.7);
    for (const EdgeMetricKind kind :
         {EdgeMetricKind::Distance, EdgeMetricKind::Diff, EdgeMetricKind::Mix}) {
      const EdgeMetric m{kind, 1e-6};
      for (const auto& [a, b] : g.edges()) {
        const double w = edge_error(m, a, b, g.deployment(), signals);
        CHECK(w > 0.0);
        CHECK(edge_error(m, b, a, g.deployment(), signals) == w);
      }
      for (DeviceId d = 0; d < 40; ++d)
        CHECK(edge_error(m, d, d, g.deployment(), signals) == 0.0);
    }
  }
}

TEST_CASE("leadership strengths") {
  const std::vector<NeighborSample> samples{
      {0, 2.0, 2.0}, {1, 4.0, 4.0}, {2, 6.0, 6.0}};

  CHECK(leader_strength(StrengthPolicy::value(), 1, samples) == 4.0);
  CHECK(leader_strength(StrengthPolicy::mean(), 1, samples) == 4.0);
  // All shared means equal to all readings: zero variance.
  CHECK(leader_strength(StrengthPolicy::variance(), 1, samples) == 0.0);

  // Mixed case: readings {1, 3} with both means at 2.
  const std::vector<NeighborSample> mixed{{0, 1.0, 2.0}, {1, 3.0, 2.0}};
  CHECK(leader_strength(StrengthPolicy::variance(), 0, mixed) == 1.0);

  const StrengthPolicy ext = StrengthPolicy::external({10.0, 20.0, 30.0});
  CHECK(leader_strength(ext, 2, samples) == 30.0);
  CHECK_THROWS_AS(leader_strength(ext, 5, samples), std::out_of_range);
}

TEST_CASE("neighbourhood views must include the device itself") {
  CHECK_THROWS_AS(neighborhood_mean({}), std::invalid_argument);
  const std::vector<NeighborSample> missing_self{{0, 1.0, 0.0}};
  CHECK_THROWS_AS(leader_strength(StrengthPolicy::value(), 9, missing_self),
                  std::invalid_argument);
}
