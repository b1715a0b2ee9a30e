#pragma once

// Closed-form message accounting, scenario generators and the four built-in
// comparative studies.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specnego/domain.hpp"
#include "specnego/kernel.hpp"

namespace specnego::experiments {

/// Closed-form total of delivered messages for one negotiation round,
/// PU registrations included. Throws StructuralError for counts that do not
/// fit the topology.
std::uint64_t expected_messages(Topology topology, bool aggregation, std::uint64_t sus,
                                std::uint64_t pus, std::uint64_t cpus, std::uint64_t csus);

/// Parameter ranges used when drawing PUs and SU demands.
struct DrawRanges {
  int channels_min = 1;
  int channels_max = 8;
  double price_min = 5.0;
  double price_max = 20.0;
  double alloc_time_min = 10.0;
  double alloc_time_max = 120.0;
  int request_min = 1;
  int request_max = 4;
};

struct GeneratorConfig {
  std::uint64_t seed = 42;
  Topology topology = Topology::CpuCsu;
  bool aggregation = true;
  int pus = 15;
  int cpus = 5;
  /// SU group sizes. Under cpu_csu each group is one SU coalition; other
  /// topologies keep the grouping only for arrival staggering.
  std::vector<int> su_groups;
  /// Arrival of the k-th SU in its group (k from 0).
  double arrival_spacing = 100.0;
  CriteriaWeights weights = kDefaultWeights;
  Timing timing;
  DrawRanges ranges;
};

/// Deterministic scenario: PU coalition coordinators on a line with their
/// PUs spread evenly around them, SU coalitions on a parallel line.
Scenario generate_scenario(const GeneratorConfig& config);

enum class ExperimentId { CsuCapacity, CsuCount, MessagesVsCsu, Topologies };

std::string_view to_string(ExperimentId id);
std::optional<ExperimentId> parse_experiment(std::string_view s);

struct ExperimentSpec {
  ExperimentId id = ExperimentId::CsuCapacity;
  std::uint64_t seed = 42;
  int pus = 15;
  int cpus = 5;
  /// SU counts swept by the topology comparison.
  std::vector<int> su_sweep{5, 10, 15, 20, 25};
  CriteriaWeights weights = kDefaultWeights;
  Timing timing;
  DrawRanges ranges;
  sim::RunOptions run_options;
  /// Run rows on worker threads; output order is unaffected.
  bool parallel = true;
};

/// Default configuration for each built-in study.
ExperimentSpec default_spec(ExperimentId id);

struct MetricsRow {
  std::string label;
  double swept = 0.0;
  std::uint64_t total_messages = 0;
  std::uint64_t expected_messages = 0;
  double run_response = 0.0;
  std::map<protocol::MessageKind, std::uint64_t> per_kind;
  std::uint64_t served = 0;
  std::uint64_t unserved = 0;
  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

struct MetricsTable {
  ExperimentId id = ExperimentId::CsuCapacity;
  std::string title;
  std::string swept_name;
  /// Free-text provenance lines (fixed counts, draw ranges, conventions).
  std::vector<std::string> notes;
  std::vector<MetricsRow> rows;
  friend bool operator==(const MetricsTable&, const MetricsTable&) = default;
};

struct ExperimentRun {
  MetricsTable table;
  /// One report per row, same order.
  std::vector<sim::RunReport> reports;
};

/// Generates and runs every configuration of the study. Throws
/// std::runtime_error when a simulated total disagrees with the closed form.
ExperimentRun run_experiment_with_reports(const ExperimentSpec& spec);
MetricsTable run_experiment(const ExperimentSpec& spec);

}  // namespace specnego::experiments
