#include "specnego/coalition.hpp"

#include <algorithm>
#include <set>

#include "specnego/error.hpp"

namespace specnego {

Membership form_coalitions(std::span<const PlacedAgent> agents,
                           std::span<const Coordinator> coordinators,
                           const std::optional<Membership>& override_map) {
  if (override_map) {
    std::set<std::string> coordinator_ids;
    for (const auto& c : coordinators) coordinator_ids.insert(c.id);
    std::set<std::string> agent_ids;
    for (const auto& a : agents) agent_ids.insert(a.id);

    Membership out;
    for (const auto& c : coordinators) out[c.id];
    std::set<std::string> seen;
    for (const auto& [coord, members] : *override_map) {
      if (!coordinator_ids.contains(coord)) {
        throw StructuralError("membership override names unknown coordinator '" + coord + "'");
      }
      auto& slot = out[coord];
      for (const auto& m : members) {
        if (!agent_ids.contains(m)) {
          throw StructuralError("membership override names unknown agent '" + m + "'");
        }
        if (!seen.insert(m).second) {
          throw StructuralError("membership override lists agent '" + m + "' twice");
        }
        slot.push_back(m);
      }
      std::sort(slot.begin(), slot.end());
    }
    for (const auto& a : agents) {
      if (!seen.contains(a.id)) {
        throw StructuralError("membership override omits agent '" + a.id + "'");
      }
    }
    return out;
  }

  if (coordinators.empty() && !agents.empty()) {
    throw StructuralError("cannot form coalitions without coordinators");
  }

  Membership out;
  for (const auto& c : coordinators) out[c.id];
  for (const auto& a : agents) {
    const Coordinator* best = nullptr;
    double best_dist = 0.0;
    for (const auto& c : coordinators) {
      const double d = distance(a.zone, c.zone);
      if (best == nullptr || d < best_dist || (d == best_dist && c.id < best->id)) {
        best = &c;
        best_dist = d;
      }
    }
    out[best->id].push_back(a.id);
  }
  for (auto& [_, members] : out) std::sort(members.begin(), members.end());
  return out;
}

ParamRegistry::ParamRegistry(std::vector<std::string> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
}

bool ParamRegistry::is_member(const std::string& pu_id) const {
  return std::binary_search(members_.begin(), members_.end(), pu_id);
}

void ParamRegistry::register_params(const std::string& pu_id, int channels, double price,
                                    double alloc_time, double t) {
  if (!is_member(pu_id)) {
    throw StructuralError("PU '" + pu_id + "' is not a member of this coalition");
  }
  entries_[pu_id] = RegistryEntry{channels, price, alloc_time, t};
}

std::optional<RegistryEntry> ParamRegistry::lookup(const std::string& pu_id) const {
  auto it = entries_.find(pu_id);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> rank_offers(std::span<const Offer> offers,
                                     const CriteriaWeights& weights) {
  if (offers.empty()) return {};
  mcdm::DecisionMatrix dm;
  dm.criteria = {"channels", "price", "alloc_time"};
  dm.weights.assign(weights.begin(), weights.end());
  dm.senses.assign(kOfferSenses.begin(), kOfferSenses.end());
  std::vector<double> data;
  data.reserve(offers.size() * 3);
  for (const auto& o : offers) {
    dm.alternatives.push_back(o.pu_id);
    data.push_back(static_cast<double>(o.channels));
    data.push_back(o.price);
    data.push_back(o.alloc_time);
  }
  dm.scores = mcdm::Matrix(offers.size(), 3, std::move(data));
  return mcdm::topsis(dm).ranking;
}

std::optional<Offer> best_offer(const ParamRegistry& registry, const std::string& cpu_id,
                                const CriteriaWeights& weights) {
  std::vector<Offer> candidates;
  for (const auto& [pu_id, e] : registry.entries()) {
    if (e.channels <= 0) continue;
    candidates.push_back(Offer{pu_id, cpu_id, e.channels, e.price, e.alloc_time});
  }
  if (candidates.empty()) return std::nullopt;
  const auto order = rank_offers(candidates, weights);
  return candidates[order.front()];
}

}  // namespace specnego
