#pragma once

// Shared vocabulary of the spectrum-negotiation simulation.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specnego/topsis.hpp"

namespace specnego {

/// Abstract 2-D position; distances are Euclidean.
struct Zone {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Zone&, const Zone&) = default;
};

double distance(const Zone& a, const Zone& b);

struct PrimaryUser {
  std::string id;
  Zone zone;
  int channels = 0;
  double price = 1.0;
  double alloc_time = 1.0;
  friend bool operator==(const PrimaryUser&, const PrimaryUser&) = default;
};

struct SecondaryUser {
  std::string id;
  Zone zone;
  int channels_requested = 1;
  double arrival_time = 0.0;
  friend bool operator==(const SecondaryUser&, const SecondaryUser&) = default;
};

/// A coalition coordinator: PuCoalition (CPU) or SuCoalition (CSU).
struct Coordinator {
  std::string id;
  Zone zone;
  friend bool operator==(const Coordinator&, const Coordinator&) = default;
};

struct Offer {
  std::string pu_id;
  std::string cpu_id;
  int channels = 0;
  double price = 0.0;
  double alloc_time = 0.0;
  friend bool operator==(const Offer&, const Offer&) = default;
};

enum class Topology { NoCoalition, CpuOnly, CpuCsu };

std::string_view to_string(Topology t);
std::optional<Topology> parse_topology(std::string_view s);

/// Processing and transport delays, in sim time units.
struct Timing {
  double latency = 10.0;
  double agg_per_demand = 5.0;
  double cpu_select = 2.0;
  double rank_per_offer = 1.0;
  double pu_reply = 2.0;
  friend bool operator==(const Timing&, const Timing&) = default;
};

/// Coordinator id -> member ids (sorted).
using Membership = std::map<std::string, std::vector<std::string>>;

/// Criterion weights for (channels, price, alloc_time).
using CriteriaWeights = std::array<double, 3>;

inline constexpr CriteriaWeights kDefaultWeights{0.2, 0.5, 0.3};
inline constexpr std::array<mcdm::CriterionSense, 3> kOfferSenses{
    mcdm::CriterionSense::Benefit, mcdm::CriterionSense::Cost,
    mcdm::CriterionSense::Benefit};

struct Scenario {
  std::uint64_t seed = 0;
  Topology topology = Topology::CpuCsu;
  bool aggregation = true;
  std::vector<PrimaryUser> pus;
  std::vector<SecondaryUser> sus;
  std::vector<Coordinator> cpu_coordinators;
  std::vector<Coordinator> csu_coordinators;
  std::optional<Membership> cpu_memberships;
  std::optional<Membership> csu_memberships;
  CriteriaWeights weights = kDefaultWeights;
  Timing timing;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct Violation {
  std::string path;
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Every invariant violation in `scenario`; empty means runnable.
std::vector<Violation> validate(const Scenario& scenario);

}  // namespace specnego
