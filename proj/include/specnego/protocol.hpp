#pragma once

// Agent state machines and typed messages for the coalition negotiation.
//
// Handlers are pure: they take an agent state by value plus the delivered
// message and return the next state together with the effects (outgoing
// messages with their processing delays, an optional self-wake, committed
// allocations and per-SU outcomes). The kernel owns all mutation.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "specnego/coalition.hpp"
#include "specnego/domain.hpp"

namespace specnego::protocol {

enum class MessageKind { ParamUpdate, SuRequest, Cfp, CfpSingle, CpuOffer, CpuNoOffer, SuReply };

inline constexpr std::array<MessageKind, 7> kAllMessageKinds{
    MessageKind::ParamUpdate, MessageKind::SuRequest,  MessageKind::Cfp,
    MessageKind::CfpSingle,   MessageKind::CpuOffer,   MessageKind::CpuNoOffer,
    MessageKind::SuReply};

std::string_view to_string(MessageKind kind);

struct Demand {
  std::string su_id;
  int channels = 1;
  double arrival_time = 0.0;
  friend bool operator==(const Demand&, const Demand&) = default;
};

struct ParamPayload {
  int channels = 0;
  double price = 0.0;
  double alloc_time = 0.0;
  friend bool operator==(const ParamPayload&, const ParamPayload&) = default;
};

struct DemandBatch {
  std::vector<Demand> demands;
  friend bool operator==(const DemandBatch&, const DemandBatch&) = default;
};

/// Answer to a Cfp/CfpSingle. `offer` is empty for CpuNoOffer; `for_su`
/// echoes the demand of a CfpSingle.
struct OfferReply {
  std::optional<Offer> offer;
  std::optional<std::string> for_su;
  friend bool operator==(const OfferReply&, const OfferReply&) = default;
};

/// SuReply body: the granted offer, or empty for a rejection.
struct GrantPayload {
  std::optional<Offer> offer;
  int granted_channels = 0;
  friend bool operator==(const GrantPayload&, const GrantPayload&) = default;
};

using Payload = std::variant<ParamPayload, Demand, DemandBatch, OfferReply, GrantPayload>;

struct Message {
  MessageKind kind = MessageKind::ParamUpdate;
  std::string from;
  std::string to;
  Payload payload;
  friend bool operator==(const Message&, const Message&) = default;
};

/// True when from != to and the payload alternative matches the kind.
bool well_formed(const Message& msg);

struct Allocation {
  std::string su_id;
  Offer offer;
  int granted_channels = 0;
  friend bool operator==(const Allocation&, const Allocation&) = default;
};

struct Assignment {
  std::vector<Allocation> allocations;
  std::vector<std::string> unserved;
};

/// Rank-greedy offer-to-demand matching. Demands are served in the given
/// order; each takes the best-ranked unconsumed offer whose PU still has
/// enough capacity in `capacities` (PU id -> channels).
Assignment assign_offers(std::span<const Offer> ranked_offers, std::span<const Demand> demands,
                         std::map<std::string, int> capacities);

// --- agent states ---------------------------------------------------------

enum class SuPhase { Idle, Waiting, Served, Unserved };
enum class CsuPhase { Collecting, AwaitingOffers, Done };

struct PuAgent {
  PrimaryUser user;
  std::optional<std::string> coordinator;
  friend bool operator==(const PuAgent&, const PuAgent&) = default;
};

struct SuAgent {
  SecondaryUser user;
  /// Where requests go: the SU's own coalition, or every responder when the
  /// SU negotiates directly.
  std::vector<std::string> targets;
  SuPhase phase = SuPhase::Idle;
  std::size_t replies = 0;
  std::vector<Offer> offers;
  bool ranking_scheduled = false;
  std::optional<Allocation> allocation;
  friend bool operator==(const SuAgent&, const SuAgent&) = default;
};

struct PuCoalitionAgent {
  std::string id;
  ParamRegistry registry;
  friend bool operator==(const PuCoalitionAgent&, const PuCoalitionAgent&) = default;
};

struct PendingDemand {
  Demand demand;
  std::size_t replies = 0;
  std::vector<Offer> offers;
  friend bool operator==(const PendingDemand&, const PendingDemand&) = default;
};

struct SuCoalitionAgent {
  std::string id;
  std::vector<std::string> members;
  std::vector<std::string> cpus;
  CsuPhase phase = CsuPhase::Collecting;
  std::vector<Demand> demands;
  // Aggregated mode: replies to the single batch.
  std::size_t replies = 0;
  std::vector<Offer> offers;
  // Per-demand mode: replies keyed by SU id.
  std::map<std::string, PendingDemand> pending;
  std::size_t resolved = 0;
  friend bool operator==(const SuCoalitionAgent&, const SuCoalitionAgent&) = default;
};

using AgentState = std::variant<PuAgent, SuAgent, PuCoalitionAgent, SuCoalitionAgent>;

const std::string& agent_id(const AgentState& state);

// --- transitions ----------------------------------------------------------

struct Context {
  Topology topology = Topology::CpuCsu;
  bool aggregation = true;
  Timing timing;
  CriteriaWeights weights = kDefaultWeights;
  /// Live PU capacities owned by the kernel. Must be non-null.
  const std::map<std::string, int>* capacity = nullptr;
};

struct Outgoing {
  Message message;
  double delay = 0.0;
  friend bool operator==(const Outgoing&, const Outgoing&) = default;
};

struct SuOutcome {
  std::string su_id;
  bool served = false;
  friend bool operator==(const SuOutcome&, const SuOutcome&) = default;
};

struct Effects {
  std::vector<Outgoing> sends;
  std::optional<double> wake_after;
  std::vector<Allocation> allocations;
  std::optional<SuOutcome> outcome;
  std::vector<std::string> violations;
};

struct Transition {
  AgentState state;
  Effects effects;
};

Transition handle(AgentState state, const Message& msg, double now, const Context& ctx);
Transition wake(AgentState state, double now, const Context& ctx);

// --- wiring ---------------------------------------------------------------

struct TopologyPlan {
  Membership pu_groups;
  Membership su_groups;
  std::map<std::string, std::optional<std::string>> pu_coordinator;
  std::map<std::string, std::vector<std::string>> su_targets;
};

/// Who talks to whom for the scenario's topology. Scenario must be valid.
TopologyPlan topology_plan(const Scenario& scenario);

/// Initial agent states keyed by id.
std::map<std::string, AgentState> build_agents(const Scenario& scenario,
                                               const TopologyPlan& plan);

}  // namespace specnego::protocol
