#pragma once

#include "specnego/experiments.hpp"

namespace fixtures {

/// 15 PUs in 5 PU coalitions, SUs split into the given SU coalitions.
inline specnego::Scenario reference_topology(std::vector<int> groups = {5, 5, 5},
                                         specnego::Topology topology = specnego::Topology::CpuCsu,
                                         bool aggregation = true, std::uint64_t seed = 42) {
  specnego::experiments::GeneratorConfig g;
  g.seed = seed;
  g.topology = topology;
  g.aggregation = aggregation;
  g.pus = 15;
  g.cpus = topology == specnego::Topology::NoCoalition ? 0 : 5;
  g.su_groups = std::move(groups);
  return specnego::experiments::generate_scenario(g);
}

}  // namespace fixtures
