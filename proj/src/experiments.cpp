#include "specnego/experiments.hpp"

#include <future>
#include <random>
#include <sstream>

#include "specnego/error.hpp"

namespace specnego::experiments {

std::uint64_t expected_messages(Topology topology, bool aggregation, std::uint64_t sus,
                                std::uint64_t pus, std::uint64_t cpus, std::uint64_t csus) {
  switch (topology) {
    case Topology::NoCoalition:
      if (cpus != 0 || csus != 0) {
        throw StructuralError("no_coalition takes no coalition coordinators");
      }
      return 2 * sus * pus;
    case Topology::CpuOnly:
      if (csus != 0) throw StructuralError("cpu_only takes no SU coalition coordinators");
      if (cpus == 0) throw StructuralError("cpu_only needs at least one PU coalition");
      return pus + 2 * sus * cpus;
    case Topology::CpuCsu:
      if (cpus == 0 || csus == 0) {
        throw StructuralError("cpu_csu needs PU and SU coalition coordinators");
      }
      if (aggregation) return pus + 2 * sus + 2 * csus * cpus;
      return pus + 2 * sus + 2 * sus * cpus;
  }
  throw StructuralError("unknown topology");
}

namespace {

std::string padded(std::string_view prefix, std::size_t index, std::size_t count) {
  std::string digits = std::to_string(index);
  const std::size_t width = std::to_string(count).size();
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return std::string(prefix) + digits;
}

// std distributions are implementation-defined; these mappings are not.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}
  int integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }
  double real(double lo, double hi) {
    const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
  }

 private:
  std::mt19937_64 engine_;
};

constexpr double kCoordinatorSpacing = 100.0;
constexpr double kSuLine = 1000.0;

}  // namespace

Scenario generate_scenario(const GeneratorConfig& cfg) {
  if (cfg.pus < 0 || cfg.cpus < 0) throw StructuralError("negative agent counts");
  Scenario s;
  s.seed = cfg.seed;
  s.topology = cfg.topology;
  s.aggregation = cfg.aggregation;
  s.weights = cfg.weights;
  s.timing = cfg.timing;

  Draw draw(cfg.seed);
  const auto ncpu = static_cast<std::size_t>(cfg.cpus);
  const auto npu = static_cast<std::size_t>(cfg.pus);
  if (cfg.topology != Topology::NoCoalition) {
    for (std::size_t c = 0; c < ncpu; ++c) {
      s.cpu_coordinators.push_back(
          {padded("cpu", c + 1, ncpu), Zone{static_cast<double>(c) * kCoordinatorSpacing, 0.0}});
    }
  }
  for (std::size_t k = 0; k < npu; ++k) {
    PrimaryUser p;
    p.id = padded("pu", k + 1, npu);
    const std::size_t home = ncpu == 0 ? k : k % ncpu;
    const std::size_t slot = ncpu == 0 ? 0 : k / ncpu;
    p.zone = Zone{static_cast<double>(home) * kCoordinatorSpacing + 2.0 * static_cast<double>(slot),
                  10.0};
    p.channels = draw.integer(cfg.ranges.channels_min, cfg.ranges.channels_max);
    p.price = draw.real(cfg.ranges.price_min, cfg.ranges.price_max);
    p.alloc_time = draw.real(cfg.ranges.alloc_time_min, cfg.ranges.alloc_time_max);
    s.pus.push_back(std::move(p));
  }

  std::size_t total_sus = 0;
  for (int g : cfg.su_groups) {
    if (g < 0) throw StructuralError("negative SU group size");
    total_sus += static_cast<std::size_t>(g);
  }
  const std::size_t ngroups = cfg.su_groups.size();
  std::size_t next = 0;
  for (std::size_t g = 0; g < ngroups; ++g) {
    const Zone center{static_cast<double>(g) * kCoordinatorSpacing, kSuLine};
    if (cfg.topology == Topology::CpuCsu) s.csu_coordinators.push_back({padded("csu", g + 1, ngroups), center});
    for (int k = 0; k < cfg.su_groups[g]; ++k) {
      SecondaryUser u;
      u.id = padded("su", ++next, total_sus);
      u.zone = Zone{center.x, center.y + 10.0};
      u.channels_requested = draw.integer(cfg.ranges.request_min, cfg.ranges.request_max);
      u.arrival_time = static_cast<double>(k) * cfg.arrival_spacing;
      s.sus.push_back(std::move(u));
    }
  }
  return s;
}

std::string_view to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::CsuCapacity: return "exp_i";
    case ExperimentId::CsuCount: return "exp_ii";
    case ExperimentId::MessagesVsCsu: return "exp_iii";
    case ExperimentId::Topologies: return "exp_iv";
  }
  return "?";
}

std::optional<ExperimentId> parse_experiment(std::string_view s) {
  for (auto id : {ExperimentId::CsuCapacity, ExperimentId::CsuCount, ExperimentId::MessagesVsCsu,
                  ExperimentId::Topologies}) {
    if (to_string(id) == s) return id;
  }
  return std::nullopt;
}

ExperimentSpec default_spec(ExperimentId id) {
  ExperimentSpec spec;
  spec.id = id;
  return spec;
}

namespace {

struct Config {
  std::string label;
  double swept = 0.0;
  Topology topology = Topology::CpuCsu;
  std::vector<int> groups;
};

std::vector<int> split_groups(int csus, int per_csu) { return std::vector<int>(csus, per_csu); }

std::vector<Config> configurations(const ExperimentSpec& spec) {
  std::vector<Config> out;
  switch (spec.id) {
    case ExperimentId::CsuCapacity:
      for (int n : {1, 2, 3, 4, 5, 10}) {
        out.push_back({"1x" + std::to_string(n), static_cast<double>(n), Topology::CpuCsu, {n}});
      }
      break;
    case ExperimentId::CsuCount:
      for (auto [csus, per] : {std::pair{5, 2}, {2, 5}, {1, 10}}) {
        out.push_back({std::to_string(csus) + "x" + std::to_string(per),
                       static_cast<double>(csus), Topology::CpuCsu, split_groups(csus, per)});
      }
      break;
    case ExperimentId::MessagesVsCsu:
      for (auto [csus, per] : {std::pair{500, 2}, {100, 10}, {40, 25}, {1, 1000}}) {
        out.push_back({std::to_string(csus) + "x" + std::to_string(per),
                       static_cast<double>(csus), Topology::CpuCsu, split_groups(csus, per)});
      }
      break;
    case ExperimentId::Topologies:
      for (int s : spec.su_sweep) {
        if (s < 1) throw StructuralError("SU sweep values must be >= 1");
        std::vector<int> groups(static_cast<std::size_t>(s / 5), 5);
        if (s % 5 != 0) groups.push_back(s % 5);
        for (auto t : {Topology::NoCoalition, Topology::CpuOnly, Topology::CpuCsu}) {
          out.push_back({std::string(to_string(t)), static_cast<double>(s), t, groups});
        }
      }
      break;
  }
  return out;
}

std::string describe(const ExperimentSpec& spec) {
  switch (spec.id) {
    case ExperimentId::CsuCapacity: return "Run response vs SUs in a single SU coalition";
    case ExperimentId::CsuCount: return "Run response vs SU coalition count (10 SUs)";
    case ExperimentId::MessagesVsCsu: return "Messages vs SU coalition count (1000 SUs)";
    case ExperimentId::Topologies: return "Messages across topologies";
  }
  return "";
}

std::string swept_name(ExperimentId id) {
  switch (id) {
    case ExperimentId::CsuCapacity: return "su_per_csu";
    case ExperimentId::CsuCount:
    case ExperimentId::MessagesVsCsu: return "csu_count";
    case ExperimentId::Topologies: return "su_count";
  }
  return "";
}

std::vector<std::string> notes(const ExperimentSpec& spec) {
  std::ostringstream counts, ranges, timing;
  counts << "pus=" << spec.pus << " pu_coalitions=" << spec.cpus << " seed=" << spec.seed
         << " weights=" << spec.weights[0] << "/" << spec.weights[1] << "/" << spec.weights[2];
  const auto& r = spec.ranges;
  ranges << "pu draws: channels U{" << r.channels_min << ".." << r.channels_max << "} price U["
         << r.price_min << "," << r.price_max << "] alloc_time U[" << r.alloc_time_min << ","
         << r.alloc_time_max << "]; su requests U{" << r.request_min << ".." << r.request_max
         << "}; arrivals 100*(k-1) within each group";
  const auto& t = spec.timing;
  timing << "timing: latency=" << t.latency << " agg_per_demand=" << t.agg_per_demand
         << " cpu_select=" << t.cpu_select << " rank_per_offer=" << t.rank_per_offer
         << " pu_reply=" << t.pu_reply;
  return {counts.str(), ranges.str(), timing.str(),
          "message totals count every delivered message including PU ParamUpdate registrations"};
}

struct RowResult {
  MetricsRow row;
  sim::RunReport report;
};

RowResult run_row(const ExperimentSpec& spec, const Config& cfg) {
  GeneratorConfig g;
  g.seed = spec.seed;
  g.topology = cfg.topology;
  g.aggregation = true;
  g.pus = spec.pus;
  g.cpus = cfg.topology == Topology::NoCoalition ? 0 : spec.cpus;
  g.su_groups = cfg.groups;
  g.weights = spec.weights;
  g.timing = spec.timing;
  g.ranges = spec.ranges;
  const Scenario scenario = generate_scenario(g);
  if (auto v = validate(scenario); !v.empty()) {
    throw StructuralError("generated scenario invalid at " + v.front().path + ": " +
                          v.front().message);
  }

  RowResult out;
  out.report = sim::run(scenario, spec.run_options);
  auto& row = out.row;
  row.label = cfg.label;
  row.swept = cfg.swept;
  row.total_messages = out.report.total_messages;
  row.expected_messages = expected_messages(
      scenario.topology, scenario.aggregation, scenario.sus.size(), scenario.pus.size(),
      scenario.cpu_coordinators.size(), scenario.csu_coordinators.size());
  row.run_response = out.report.run_response;
  row.per_kind = out.report.msg_counts;
  for (const auto& [_, r] : out.report.per_su_response) {
    if (r) {
      ++row.served;
    } else {
      ++row.unserved;
    }
  }
  if (row.total_messages != row.expected_messages) {
    throw std::runtime_error(std::string(to_string(spec.id)) + " row " + row.label + ": simulated " +
                             std::to_string(row.total_messages) + " messages, closed form " +
                             std::to_string(row.expected_messages));
  }
  return out;
}

}  // namespace

ExperimentRun run_experiment_with_reports(const ExperimentSpec& spec) {
  const auto configs = configurations(spec);
  std::vector<RowResult> results;
  results.reserve(configs.size());
  if (spec.parallel) {
    std::vector<std::future<RowResult>> futures;
    for (const auto& c : configs) {
      futures.push_back(std::async(std::launch::async, [&spec, &c] { return run_row(spec, c); }));
    }
    for (auto& f : futures) results.push_back(f.get());
  } else {
    for (const auto& c : configs) results.push_back(run_row(spec, c));
  }

  ExperimentRun run;
  run.table.id = spec.id;
  run.table.title = describe(spec);
  run.table.swept_name = swept_name(spec.id);
  run.table.notes = notes(spec);
  for (auto& r : results) {
    run.table.rows.push_back(std::move(r.row));
    run.reports.push_back(std::move(r.report));
  }
  return run;
}

MetricsTable run_experiment(const ExperimentSpec& spec) {
  return run_experiment_with_reports(spec).table;
}

}  // namespace specnego::experiments
