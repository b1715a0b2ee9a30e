#pragma once

// Geographic coalition formation and the PuCoalition-side parameter registry.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "specnego/domain.hpp"

namespace specnego {

struct PlacedAgent {
  std::string id;
  Zone zone;
};

/// Assigns every agent to its nearest coordinator (ties: lowest coordinator
/// id). When `override_map` is given it is used verbatim after checking that
/// it names known ids and covers every agent exactly once.
Membership form_coalitions(std::span<const PlacedAgent> agents,
                           std::span<const Coordinator> coordinators,
                           const std::optional<Membership>& override_map = std::nullopt);

struct RegistryEntry {
  int channels = 0;
  double price = 0.0;
  double alloc_time = 0.0;
  double last_update = 0.0;
  friend bool operator==(const RegistryEntry&, const RegistryEntry&) = default;
};

/// Live snapshot of member PU parameters held by one PuCoalition.
class ParamRegistry {
 public:
  ParamRegistry() = default;
  explicit ParamRegistry(std::vector<std::string> members);

  bool is_member(const std::string& pu_id) const;

  /// Replaces the entry for `pu_id`. Throws StructuralError for non-members.
  void register_params(const std::string& pu_id, int channels, double price,
                       double alloc_time, double t);

  std::optional<RegistryEntry> lookup(const std::string& pu_id) const;

  /// Registered entries keyed by PU id (ordered for deterministic iteration).
  const std::map<std::string, RegistryEntry>& entries() const { return entries_; }
  const std::vector<std::string>& members() const { return members_; }

  friend bool operator==(const ParamRegistry&, const ParamRegistry&) = default;

 private:
  std::vector<std::string> members_;
  std::map<std::string, RegistryEntry> entries_;
};

/// TOPSIS-best registered member offer, skipping zero-channel PUs.
std::optional<Offer> best_offer(const ParamRegistry& registry, const std::string& cpu_id,
                                const CriteriaWeights& weights);

/// Ranks offers by TOPSIS closeness over (channels, price, alloc_time);
/// returns indices into `offers`, best first.
std::vector<std::size_t> rank_offers(std::span<const Offer> offers,
                                     const CriteriaWeights& weights);

}  // namespace specnego
