#include "specnego/protocol.hpp"

#include <algorithm>

#include "specnego/error.hpp"

namespace specnego::protocol {

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::ParamUpdate: return "ParamUpdate";
    case MessageKind::SuRequest: return "SuRequest";
    case MessageKind::Cfp: return "Cfp";
    case MessageKind::CfpSingle: return "CfpSingle";
    case MessageKind::CpuOffer: return "CpuOffer";
    case MessageKind::CpuNoOffer: return "CpuNoOffer";
    case MessageKind::SuReply: return "SuReply";
  }
  return "?";
}

bool well_formed(const Message& msg) {
  if (msg.from == msg.to) return false;
  switch (msg.kind) {
    case MessageKind::ParamUpdate: return std::holds_alternative<ParamPayload>(msg.payload);
    case MessageKind::SuRequest:
    case MessageKind::CfpSingle: return std::holds_alternative<Demand>(msg.payload);
    case MessageKind::Cfp: return std::holds_alternative<DemandBatch>(msg.payload);
    case MessageKind::CpuOffer: {
      const auto* r = std::get_if<OfferReply>(&msg.payload);
      return r != nullptr && r->offer.has_value();
    }
    case MessageKind::CpuNoOffer: {
      const auto* r = std::get_if<OfferReply>(&msg.payload);
      return r != nullptr && !r->offer.has_value();
    }
    case MessageKind::SuReply: return std::holds_alternative<GrantPayload>(msg.payload);
  }
  return false;
}

Assignment assign_offers(std::span<const Offer> ranked_offers, std::span<const Demand> demands,
                         std::map<std::string, int> capacities) {
  Assignment out;
  std::vector<bool> consumed(ranked_offers.size(), false);
  for (const auto& d : demands) {
    bool served = false;
    for (std::size_t k = 0; k < ranked_offers.size(); ++k) {
      if (consumed[k]) continue;
      const auto& o = ranked_offers[k];
      auto it = capacities.find(o.pu_id);
      const int cap = it == capacities.end() ? 0 : it->second;
      if (cap < d.channels) continue;
      it->second -= d.channels;
      consumed[k] = true;
      out.allocations.push_back(Allocation{d.su_id, o, d.channels});
      served = true;
      break;
    }
    if (!served) out.unserved.push_back(d.su_id);
  }
  return out;
}

const std::string& agent_id(const AgentState& state) {
  return std::visit(
      [](const auto& a) -> const std::string& {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, PuAgent> || std::is_same_v<T, SuAgent>) {
          return a.user.id;
        } else {
          return a.id;
        }
      },
      state);
}

namespace {

Message make(MessageKind kind, std::string from, std::string to, Payload payload) {
  return Message{kind, std::move(from), std::move(to), std::move(payload)};
}

int live_capacity(const Context& ctx, const std::string& pu_id) {
  auto it = ctx.capacity->find(pu_id);
  return it == ctx.capacity->end() ? 0 : it->second;
}

// Capacity visible to an assignment: what the offer advertised, bounded by
// what the PU still has.
std::map<std::string, int> capacities_for(std::span<const Offer> offers, const Context& ctx) {
  std::map<std::string, int> caps;
  for (const auto& o : offers) {
    const int c = std::min(o.channels, live_capacity(ctx, o.pu_id));
    auto [it, inserted] = caps.emplace(o.pu_id, c);
    if (!inserted) it->second = std::min(it->second, c);
  }
  return caps;
}

std::vector<Offer> ranked(const std::vector<Offer>& offers, const Context& ctx) {
  std::vector<Offer> out;
  out.reserve(offers.size());
  for (std::size_t idx : rank_offers(offers, ctx.weights)) out.push_back(offers[idx]);
  return out;
}

std::string violation(const std::string& agent, const Message& msg, std::string_view why) {
  return agent + ": " + std::string(to_string(msg.kind)) + " from " + msg.from + " " +
         std::string(why);
}

OfferReply reply_for(const Message& msg, std::optional<Offer> offer) {
  OfferReply r;
  r.offer = std::move(offer);
  if (msg.kind == MessageKind::CfpSingle) r.for_su = std::get<Demand>(msg.payload).su_id;
  return r;
}

Message offer_message(const std::string& from, const Message& request, std::optional<Offer> offer) {
  const auto kind = offer ? MessageKind::CpuOffer : MessageKind::CpuNoOffer;
  return make(kind, from, request.from, reply_for(request, std::move(offer)));
}

// Emits SuReply grants for an assignment; `delay` is the ranking cost.
void emit_grants(const std::string& csu, const Assignment& a, double delay, Effects& fx) {
  for (const auto& alloc : a.allocations) {
    fx.sends.push_back({make(MessageKind::SuReply, csu, alloc.su_id,
                             GrantPayload{alloc.offer, alloc.granted_channels}),
                        delay});
    fx.allocations.push_back(alloc);
  }
  for (const auto& su : a.unserved) {
    fx.sends.push_back({make(MessageKind::SuReply, csu, su, GrantPayload{}), delay});
  }
}

Transition on_pu(PuAgent pu, const Message& msg, const Context& ctx) {
  Effects fx;
  if (msg.kind != MessageKind::CfpSingle) {
    fx.violations.push_back(violation(pu.user.id, msg, "not accepted by a PU"));
    return {std::move(pu), std::move(fx)};
  }
  std::optional<Offer> offer;
  const int cap = live_capacity(ctx, pu.user.id);
  if (cap > 0) offer = Offer{pu.user.id, "", cap, pu.user.price, pu.user.alloc_time};
  fx.sends.push_back({offer_message(pu.user.id, msg, std::move(offer)), ctx.timing.pu_reply});
  return {std::move(pu), std::move(fx)};
}

Transition on_cpu(PuCoalitionAgent cpu, const Message& msg, double now, const Context& ctx) {
  Effects fx;
  switch (msg.kind) {
    case MessageKind::ParamUpdate: {
      const auto& p = std::get<ParamPayload>(msg.payload);
      if (!cpu.registry.is_member(msg.from)) {
        fx.violations.push_back(violation(cpu.id, msg, "from a non-member PU"));
        break;
      }
      cpu.registry.register_params(msg.from, p.channels, p.price, p.alloc_time, now);
      break;
    }
    case MessageKind::Cfp:
    case MessageKind::CfpSingle: {
      auto offer = best_offer(cpu.registry, cpu.id, ctx.weights);
      fx.sends.push_back({offer_message(cpu.id, msg, std::move(offer)), ctx.timing.cpu_select});
      break;
    }
    default:
      fx.violations.push_back(violation(cpu.id, msg, "not accepted by a PU coalition"));
  }
  return {std::move(cpu), std::move(fx)};
}

void csu_collect_aggregated(SuCoalitionAgent& csu, const Message& msg, Effects& fx,
                            const Context& ctx) {
  if (msg.kind == MessageKind::SuRequest) {
    if (csu.phase != CsuPhase::Collecting) {
      fx.violations.push_back(violation(csu.id, msg, "after the batch was sent"));
      return;
    }
    csu.demands.push_back(std::get<Demand>(msg.payload));
    if (csu.demands.size() < csu.members.size()) return;
    std::stable_sort(csu.demands.begin(), csu.demands.end(),
                     [](const Demand& a, const Demand& b) { return a.arrival_time < b.arrival_time; });
    const double delay = ctx.timing.agg_per_demand * static_cast<double>(csu.members.size());
    for (const auto& cpu : csu.cpus) {
      fx.sends.push_back({make(MessageKind::Cfp, csu.id, cpu, DemandBatch{csu.demands}), delay});
    }
    csu.phase = CsuPhase::AwaitingOffers;
    return;
  }
  // CpuOffer / CpuNoOffer
  if (csu.phase != CsuPhase::AwaitingOffers) {
    fx.violations.push_back(violation(csu.id, msg, "while no batch is outstanding"));
    return;
  }
  const auto& r = std::get<OfferReply>(msg.payload);
  ++csu.replies;
  if (r.offer) csu.offers.push_back(*r.offer);
  if (csu.replies < csu.cpus.size()) return;

  const auto order = ranked(csu.offers, ctx);
  const auto a = assign_offers(order, csu.demands, capacities_for(order, ctx));
  emit_grants(csu.id, a, ctx.timing.rank_per_offer * static_cast<double>(csu.offers.size()), fx);
  csu.resolved = csu.demands.size();
  csu.phase = CsuPhase::Done;
}

void csu_collect_per_demand(SuCoalitionAgent& csu, const Message& msg, Effects& fx,
                            const Context& ctx) {
  if (msg.kind == MessageKind::SuRequest) {
    const auto& d = std::get<Demand>(msg.payload);
    if (csu.pending.contains(d.su_id) || csu.demands.size() >= csu.members.size()) {
      fx.violations.push_back(violation(csu.id, msg, "duplicates a collected demand"));
      return;
    }
    csu.demands.push_back(d);
    csu.pending.emplace(d.su_id, PendingDemand{d, 0, {}});
    for (const auto& cpu : csu.cpus) {
      fx.sends.push_back({make(MessageKind::CfpSingle, csu.id, cpu, d), ctx.timing.agg_per_demand});
    }
    if (csu.demands.size() == csu.members.size()) csu.phase = CsuPhase::AwaitingOffers;
    return;
  }
  const auto& r = std::get<OfferReply>(msg.payload);
  auto it = r.for_su ? csu.pending.find(*r.for_su) : csu.pending.end();
  if (it == csu.pending.end() || it->second.replies >= csu.cpus.size()) {
    fx.violations.push_back(violation(csu.id, msg, "answers no outstanding demand"));
    return;
  }
  auto& p = it->second;
  ++p.replies;
  if (r.offer) p.offers.push_back(*r.offer);
  if (p.replies < csu.cpus.size()) return;

  const auto order = ranked(p.offers, ctx);
  const Demand single[] = {p.demand};
  const auto a = assign_offers(order, single, capacities_for(order, ctx));
  emit_grants(csu.id, a, ctx.timing.rank_per_offer * static_cast<double>(p.offers.size()), fx);
  ++csu.resolved;
  if (csu.resolved == csu.members.size()) csu.phase = CsuPhase::Done;
}

Transition on_csu(SuCoalitionAgent csu, const Message& msg, const Context& ctx) {
  Effects fx;
  if (csu.phase == CsuPhase::Done) {
    fx.violations.push_back(violation(csu.id, msg, "after negotiation finished"));
    return {std::move(csu), std::move(fx)};
  }
  switch (msg.kind) {
    case MessageKind::SuRequest:
    case MessageKind::CpuOffer:
    case MessageKind::CpuNoOffer:
      if (ctx.aggregation) {
        csu_collect_aggregated(csu, msg, fx, ctx);
      } else {
        csu_collect_per_demand(csu, msg, fx, ctx);
      }
      break;
    default:
      fx.violations.push_back(violation(csu.id, msg, "not accepted by an SU coalition"));
  }
  return {std::move(csu), std::move(fx)};
}

bool terminal(SuPhase p) { return p == SuPhase::Served || p == SuPhase::Unserved; }

Transition on_su(SuAgent su, const Message& msg, const Context& ctx) {
  Effects fx;
  if (terminal(su.phase)) {
    fx.violations.push_back(violation(su.user.id, msg, "after the SU finished"));
    return {std::move(su), std::move(fx)};
  }
  switch (msg.kind) {
    case MessageKind::SuReply: {
      if (su.phase != SuPhase::Waiting) {
        fx.violations.push_back(violation(su.user.id, msg, "before any request"));
        break;
      }
      const auto& g = std::get<GrantPayload>(msg.payload);
      if (g.offer) {
        su.allocation = Allocation{su.user.id, *g.offer, g.granted_channels};
        su.phase = SuPhase::Served;
      } else {
        su.phase = SuPhase::Unserved;
      }
      fx.outcome = SuOutcome{su.user.id, su.phase == SuPhase::Served};
      break;
    }
    case MessageKind::CpuOffer:
    case MessageKind::CpuNoOffer: {
      if (su.phase != SuPhase::Waiting || su.ranking_scheduled) {
        fx.violations.push_back(violation(su.user.id, msg, "not awaited"));
        break;
      }
      const auto& r = std::get<OfferReply>(msg.payload);
      ++su.replies;
      if (r.offer) su.offers.push_back(*r.offer);
      if (su.replies == su.targets.size()) {
        su.ranking_scheduled = true;
        fx.wake_after = ctx.timing.rank_per_offer * static_cast<double>(su.offers.size());
      }
      break;
    }
    default:
      fx.violations.push_back(violation(su.user.id, msg, "not accepted by an SU"));
  }
  return {std::move(su), std::move(fx)};
}

// Local decision for SUs negotiating without an SU coalition.
void su_decide(SuAgent& su, const Context& ctx, Effects& fx) {
  const auto order = ranked(su.offers, ctx);
  const Demand single[] = {Demand{su.user.id, su.user.channels_requested, su.user.arrival_time}};
  const auto a = assign_offers(order, single, capacities_for(order, ctx));
  if (!a.allocations.empty()) {
    su.allocation = a.allocations.front();
    fx.allocations.push_back(a.allocations.front());
    su.phase = SuPhase::Served;
  } else {
    su.phase = SuPhase::Unserved;
  }
  fx.outcome = SuOutcome{su.user.id, su.phase == SuPhase::Served};
}

}  // namespace

Transition handle(AgentState state, const Message& msg, double now, const Context& ctx) {
  if (!well_formed(msg)) {
    Effects fx;
    fx.violations.push_back(violation(agent_id(state), msg, "is malformed"));
    return {std::move(state), std::move(fx)};
  }
  return std::visit(
      [&](auto&& agent) -> Transition {
        using T = std::decay_t<decltype(agent)>;
        if constexpr (std::is_same_v<T, PuAgent>) {
          return on_pu(std::move(agent), msg, ctx);
        } else if constexpr (std::is_same_v<T, PuCoalitionAgent>) {
          return on_cpu(std::move(agent), msg, now, ctx);
        } else if constexpr (std::is_same_v<T, SuCoalitionAgent>) {
          return on_csu(std::move(agent), msg, ctx);
        } else {
          return on_su(std::move(agent), msg, ctx);
        }
      },
      std::move(state));
}

Transition wake(AgentState state, double /*now*/, const Context& ctx) {
  Effects fx;
  if (auto* pu = std::get_if<PuAgent>(&state)) {
    if (pu->coordinator) {
      fx.sends.push_back({make(MessageKind::ParamUpdate, pu->user.id, *pu->coordinator,
                               ParamPayload{pu->user.channels, pu->user.price, pu->user.alloc_time}),
                          0.0});
    }
  } else if (auto* su = std::get_if<SuAgent>(&state)) {
    if (su->phase == SuPhase::Idle) {
      const Demand d{su->user.id, su->user.channels_requested, su->user.arrival_time};
      const auto kind =
          ctx.topology == Topology::CpuCsu ? MessageKind::SuRequest : MessageKind::CfpSingle;
      for (const auto& t : su->targets) fx.sends.push_back({make(kind, su->user.id, t, d), 0.0});
      su->phase = SuPhase::Waiting;
      if (su->targets.empty()) {
        su->ranking_scheduled = true;
        su_decide(*su, ctx, fx);
      }
    } else if (su->phase == SuPhase::Waiting && su->ranking_scheduled) {
      su_decide(*su, ctx, fx);
    } else {
      fx.violations.push_back(su->user.id + ": unexpected wake");
    }
  } else {
    fx.violations.push_back(agent_id(state) + ": unexpected wake");
  }
  return {std::move(state), std::move(fx)};
}

TopologyPlan topology_plan(const Scenario& s) {
  TopologyPlan plan;
  std::vector<PlacedAgent> pus, sus;
  for (const auto& p : s.pus) pus.push_back({p.id, p.zone});
  for (const auto& u : s.sus) sus.push_back({u.id, u.zone});

  for (const auto& p : s.pus) plan.pu_coordinator[p.id] = std::nullopt;

  if (s.topology != Topology::NoCoalition) {
    plan.pu_groups = form_coalitions(pus, s.cpu_coordinators, s.cpu_memberships);
    for (const auto& [cpu, members] : plan.pu_groups) {
      for (const auto& m : members) plan.pu_coordinator[m] = cpu;
    }
  }

  switch (s.topology) {
    case Topology::NoCoalition: {
      std::vector<std::string> all;
      for (const auto& p : s.pus) all.push_back(p.id);
      for (const auto& u : s.sus) plan.su_targets[u.id] = all;
      break;
    }
    case Topology::CpuOnly: {
      std::vector<std::string> all;
      for (const auto& c : s.cpu_coordinators) all.push_back(c.id);
      for (const auto& u : s.sus) plan.su_targets[u.id] = all;
      break;
    }
    case Topology::CpuCsu: {
      plan.su_groups = form_coalitions(sus, s.csu_coordinators, s.csu_memberships);
      for (const auto& [csu, members] : plan.su_groups) {
        for (const auto& m : members) plan.su_targets[m] = {csu};
      }
      break;
    }
  }
  return plan;
}

std::map<std::string, AgentState> build_agents(const Scenario& s, const TopologyPlan& plan) {
  std::map<std::string, AgentState> agents;
  for (const auto& p : s.pus) agents.emplace(p.id, PuAgent{p, plan.pu_coordinator.at(p.id)});
  for (const auto& u : s.sus) {
    SuAgent su;
    su.user = u;
    su.targets = plan.su_targets.at(u.id);
    agents.emplace(u.id, std::move(su));
  }
  if (s.topology != Topology::NoCoalition) {
    for (const auto& c : s.cpu_coordinators) {
      agents.emplace(c.id, PuCoalitionAgent{c.id, ParamRegistry(plan.pu_groups.at(c.id))});
    }
  }
  if (s.topology == Topology::CpuCsu) {
    std::vector<std::string> cpus;
    for (const auto& c : s.cpu_coordinators) cpus.push_back(c.id);
    for (const auto& c : s.csu_coordinators) {
      SuCoalitionAgent csu;
      csu.id = c.id;
      csu.members = plan.su_groups.at(c.id);
      csu.cpus = cpus;
      agents.emplace(c.id, std::move(csu));
    }
  }
  return agents;
}

}  // namespace specnego::protocol
