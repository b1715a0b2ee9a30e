#include "specnego/kernel.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

#include "specnego/error.hpp"

namespace specnego::sim {

using protocol::Message;
using protocol::MessageKind;

EventCapExceeded::EventCapExceeded(std::uint64_t cap)
    : std::runtime_error("simulation did not quiesce within " + std::to_string(cap) +
                         " events") {}

RunOptions options_from_env() {
  RunOptions opts;
  if (const char* env = std::getenv("SPECNEGO_EVENT_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) opts.event_cap = v;
  }
  return opts;
}

World::World(const Scenario& scenario) : scenario_(&scenario) {
  ctx_.topology = scenario.topology;
  ctx_.aggregation = scenario.aggregation;
  ctx_.timing = scenario.timing;
  ctx_.weights = scenario.weights;
  ctx_.capacity = &capacity_;

  const auto plan = protocol::topology_plan(scenario);
  agents_ = protocol::build_agents(scenario, plan);
  for (const auto& p : scenario.pus) capacity_[p.id] = p.channels;
  report_.initial_capacity = capacity_;
  for (auto k : protocol::kAllMessageKinds) report_.msg_counts[k] = 0;
  for (const auto& u : scenario.sus) report_.per_su_response[u.id] = std::nullopt;
}

void World::seed() {
  for (const auto& p : scenario_->pus) post_wake(p.id, 0.0);
  for (const auto& u : scenario_->sus) post_wake(u.id, u.arrival_time);
}

void World::push(double time, std::variant<Deliver, AgentWake> body) {
  queue_.push(SimEvent{time, next_seq_++, std::move(body)});
}

void World::post(Message msg, double at) {
  push(at, Deliver{std::move(msg), at - ctx_.timing.latency});
}

void World::post_wake(const std::string& agent, double at) { push(at, AgentWake{agent}); }

protocol::AgentState& World::agent_mut(const std::string& id) {
  auto it = agents_.find(id);
  if (it == agents_.end()) throw StructuralError("event addressed to unknown agent '" + id + "'");
  return it->second;
}

const protocol::AgentState& World::agent(const std::string& id) const {
  auto it = agents_.find(id);
  if (it == agents_.end()) throw StructuralError("unknown agent '" + id + "'");
  return it->second;
}

void World::step() {
  if (queue_.empty()) throw std::logic_error("step() called with an empty event queue");
  SimEvent ev = queue_.top();
  queue_.pop();
  clock_ = ev.time;

  if (auto* d = std::get_if<Deliver>(&ev.body)) {
    auto& state = agent_mut(d->message.to);
    report_.event_log.push_back(
        LoggedEvent{ev.time, ev.seq, d->message.kind, d->message.from, d->message.to, d->sent_at});
    ++report_.msg_counts[d->message.kind];
    ++report_.total_messages;
    auto tr = protocol::handle(std::move(state), d->message, clock_, ctx_);
    state = std::move(tr.state);
    apply(tr.effects, d->message.to);
  } else {
    const auto& w = std::get<AgentWake>(ev.body);
    auto& state = agent_mut(w.agent);
    report_.event_log.push_back(LoggedEvent{ev.time, ev.seq, std::nullopt, "", w.agent, ev.time});
    auto tr = protocol::wake(std::move(state), clock_, ctx_);
    state = std::move(tr.state);
    apply(tr.effects, w.agent);
  }
}

void World::apply(const protocol::Effects& fx, const std::string& self) {
  // Grants take effect before anything else observes the capacity ledger.
  for (const auto& a : fx.allocations) {
    int& cap = capacity_.at(a.offer.pu_id);
    if (a.granted_channels > cap) {
      throw std::logic_error("allocation for " + a.su_id + " exceeds capacity of " +
                             a.offer.pu_id);
    }
    cap -= a.granted_channels;
    report_.allocations.push_back(a);
  }
  for (const auto& out : fx.sends) {
    const double emitted = clock_ + out.delay;
    ++report_.sent_messages;
    push(emitted + ctx_.timing.latency, Deliver{out.message, emitted});
  }
  if (fx.wake_after) post_wake(self, clock_ + *fx.wake_after);
  if (fx.outcome) {
    const auto& su = std::get<protocol::SuAgent>(agents_.at(fx.outcome->su_id));
    if (fx.outcome->served) {
      report_.per_su_response[fx.outcome->su_id] = clock_ - su.user.arrival_time;
    }
    last_resolution_ = std::max(last_resolution_.value_or(clock_), clock_);
  }
  for (const auto& v : fx.violations) {
    report_.violations.push_back("t=" + std::to_string(clock_) + " " + v);
  }
}

RunReport World::finish() && {
  report_.quiescent_at = clock_;
  report_.final_capacity = capacity_;
  if (!scenario_->sus.empty() && last_resolution_) {
    double earliest = std::numeric_limits<double>::infinity();
    for (const auto& u : scenario_->sus) earliest = std::min(earliest, u.arrival_time);
    report_.run_response = *last_resolution_ - earliest;
  }
  for (const auto& [id, state] : agents_) {
    if (const auto* cpu = std::get_if<protocol::PuCoalitionAgent>(&state)) {
      report_.registries[id] = cpu->registry.entries();
    }
  }
  return std::move(report_);
}

RunReport run(const Scenario& scenario, const RunOptions& options) {
  World world(scenario);
  world.seed();
  std::uint64_t dispatched = 0;
  while (!world.idle()) {
    if (++dispatched > options.event_cap) throw EventCapExceeded(options.event_cap);
    world.step();
  }
  return std::move(world).finish();
}

}  // namespace specnego::sim
