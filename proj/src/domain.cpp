#include "specnego/domain.hpp"

#include <cmath>
#include <set>

#include "specnego/coalition.hpp"

namespace specnego {

double distance(const Zone& a, const Zone& b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::string_view to_string(Topology t) {
  switch (t) {
    case Topology::NoCoalition: return "no_coalition";
    case Topology::CpuOnly: return "cpu_only";
    case Topology::CpuCsu: return "cpu_csu";
  }
  return "?";
}

std::optional<Topology> parse_topology(std::string_view s) {
  if (s == "no_coalition") return Topology::NoCoalition;
  if (s == "cpu_only") return Topology::CpuOnly;
  if (s == "cpu_csu") return Topology::CpuCsu;
  return std::nullopt;
}

namespace {

bool finite_zone(const Zone& z) { return std::isfinite(z.x) && std::isfinite(z.y); }

std::string at(std::string_view list, std::size_t i) {
  return std::string(list) + "[" + std::to_string(i) + "]";
}

// Checks an explicit membership map without throwing.
void check_override(const Membership& map, const std::vector<Coordinator>& coords,
                    const std::set<std::string>& agents, std::string_view path,
                    std::vector<Violation>& out) {
  std::set<std::string> coord_ids;
  for (const auto& c : coords) coord_ids.insert(c.id);
  std::set<std::string> seen;
  for (const auto& [coord, members] : map) {
    const std::string base = std::string(path) + "." + coord;
    if (!coord_ids.contains(coord)) out.push_back({base, "unknown coordinator '" + coord + "'"});
    for (const auto& m : members) {
      if (!agents.contains(m)) out.push_back({base, "unknown member '" + m + "'"});
      if (!seen.insert(m).second) out.push_back({base, "member '" + m + "' assigned twice"});
    }
  }
  for (const auto& a : agents) {
    if (!seen.contains(a)) out.push_back({std::string(path), "agent '" + a + "' not assigned"});
  }
}

}  // namespace

std::vector<Violation> validate(const Scenario& s) {
  std::vector<Violation> out;

  std::set<std::string> ids;
  auto claim = [&](const std::string& id, const std::string& path) {
    if (id.empty()) {
      out.push_back({path + ".id", "empty id"});
    } else if (!ids.insert(id).second) {
      out.push_back({path + ".id", "duplicate id '" + id + "'"});
    }
  };

  std::set<std::string> pu_ids, su_ids;
  for (std::size_t i = 0; i < s.pus.size(); ++i) {
    const auto& p = s.pus[i];
    const auto path = at("pus", i);
    claim(p.id, path);
    pu_ids.insert(p.id);
    if (!finite_zone(p.zone)) out.push_back({path + ".zone", "non-finite coordinates"});
    if (p.channels < 0) out.push_back({path + ".channels", "must be >= 0"});
    if (!std::isfinite(p.price) || p.price <= 0) out.push_back({path + ".price", "must be > 0"});
    if (!std::isfinite(p.alloc_time) || p.alloc_time <= 0) {
      out.push_back({path + ".alloc_time", "must be > 0"});
    }
  }
  for (std::size_t i = 0; i < s.sus.size(); ++i) {
    const auto& u = s.sus[i];
    const auto path = at("sus", i);
    claim(u.id, path);
    su_ids.insert(u.id);
    if (!finite_zone(u.zone)) out.push_back({path + ".zone", "non-finite coordinates"});
    if (u.channels_requested < 1) out.push_back({path + ".channels_requested", "must be >= 1"});
    if (!std::isfinite(u.arrival_time) || u.arrival_time < 0) {
      out.push_back({path + ".arrival_time", "must be finite and >= 0"});
    }
  }
  for (std::size_t i = 0; i < s.cpu_coordinators.size(); ++i) {
    const auto path = at("cpu_coordinators", i);
    claim(s.cpu_coordinators[i].id, path);
    if (!finite_zone(s.cpu_coordinators[i].zone)) {
      out.push_back({path + ".zone", "non-finite coordinates"});
    }
  }
  for (std::size_t i = 0; i < s.csu_coordinators.size(); ++i) {
    const auto path = at("csu_coordinators", i);
    claim(s.csu_coordinators[i].id, path);
    if (!finite_zone(s.csu_coordinators[i].zone)) {
      out.push_back({path + ".zone", "non-finite coordinates"});
    }
  }

  for (std::size_t j = 0; j < s.weights.size(); ++j) {
    if (!std::isfinite(s.weights[j]) || s.weights[j] <= 0) {
      out.push_back({"weights[" + std::to_string(j) + "]", "must be finite and > 0"});
    }
  }
  const std::pair<const char*, double> timings[] = {
      {"timing.latency", s.timing.latency},
      {"timing.agg_per_demand", s.timing.agg_per_demand},
      {"timing.cpu_select", s.timing.cpu_select},
      {"timing.rank_per_offer", s.timing.rank_per_offer},
      {"timing.pu_reply", s.timing.pu_reply},
  };
  for (const auto& [path, v] : timings) {
    if (!std::isfinite(v) || v < 0) out.push_back({path, "must be finite and >= 0"});
  }

  const bool uses_cpu = s.topology != Topology::NoCoalition;
  const bool uses_csu = s.topology == Topology::CpuCsu;
  if (uses_cpu && s.cpu_coordinators.empty()) {
    out.push_back({"cpu_coordinators", "topology " + std::string(to_string(s.topology)) +
                                           " requires at least one PU coalition coordinator"});
  }
  if (uses_csu && s.csu_coordinators.empty()) {
    out.push_back({"csu_coordinators",
                   "topology cpu_csu requires at least one SU coalition coordinator"});
  }

  if (s.cpu_memberships) {
    check_override(*s.cpu_memberships, s.cpu_coordinators, pu_ids, "memberships.cpu", out);
  }
  if (s.csu_memberships) {
    check_override(*s.csu_memberships, s.csu_coordinators, su_ids, "memberships.csu", out);
  }

  // An empty SU coalition would never issue its call for proposals.
  if (uses_csu && !s.csu_coordinators.empty() && out.empty()) {
    std::vector<PlacedAgent> agents;
    for (const auto& u : s.sus) agents.push_back({u.id, u.zone});
    const auto groups = form_coalitions(agents, s.csu_coordinators, s.csu_memberships);
    for (const auto& [coord, members] : groups) {
      if (members.empty()) {
        out.push_back({"csu_coordinators", "SU coalition '" + coord + "' has no members"});
      }
    }
  }
  return out;
}

}  // namespace specnego
