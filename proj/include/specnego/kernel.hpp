#pragma once

// Deterministic discrete-event kernel. Events are dispatched in (time, seq)
// order; every message is delivered exactly `latency` after its emission.

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "specnego/domain.hpp"
#include "specnego/protocol.hpp"

namespace specnego::sim {

inline constexpr std::uint64_t kDefaultEventCap = 10'000'000;

struct Deliver {
  protocol::Message message;
  double sent_at = 0.0;
};

struct AgentWake {
  std::string agent;
};

struct SimEvent {
  double time = 0.0;
  std::uint64_t seq = 0;
  std::variant<Deliver, AgentWake> body;
};

struct LoggedEvent {
  double time = 0.0;
  std::uint64_t seq = 0;
  /// Empty for AgentWake entries.
  std::optional<protocol::MessageKind> kind;
  std::string from;
  std::string to;
  /// Emission time of a delivered message; equals `time` for wakes.
  double emitted = 0.0;
  friend bool operator==(const LoggedEvent&, const LoggedEvent&) = default;
};

struct RunReport {
  std::vector<LoggedEvent> event_log;
  std::map<protocol::MessageKind, std::uint64_t> msg_counts;
  std::uint64_t total_messages = 0;
  std::uint64_t sent_messages = 0;
  /// Reply time minus arrival; nullopt marks an unserved SU (or one that never resolved).
  std::map<std::string, std::optional<double>> per_su_response;
  /// Last SU resolution minus earliest SU arrival.
  double run_response = 0.0;
  std::vector<protocol::Allocation> allocations;
  double quiescent_at = 0.0;
  std::vector<std::string> violations;
  std::map<std::string, int> initial_capacity;
  std::map<std::string, int> final_capacity;
  std::map<std::string, std::map<std::string, RegistryEntry>> registries;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

class EventCapExceeded : public std::runtime_error {
 public:
  explicit EventCapExceeded(std::uint64_t cap);
};

struct RunOptions {
  std::uint64_t event_cap = kDefaultEventCap;
};

/// Reads SPECNEGO_EVENT_CAP, falling back to the default cap.
RunOptions options_from_env();

/// Whole simulation state: agent states, pending events, clock, counters.
class World {
 public:
  /// Builds agents for a valid scenario. No events are queued yet.
  explicit World(const Scenario& scenario);

  /// Queues PU wakes at t=0 and SU wakes at their arrival times.
  void seed();

  /// Queues a delivery of `msg` at absolute time `at`.
  void post(protocol::Message msg, double at);
  void post_wake(const std::string& agent, double at);

  bool idle() const { return queue_.empty(); }
  double now() const { return clock_; }
  std::size_t pending() const { return queue_.size(); }

  /// Dispatches the earliest event. Throws std::logic_error on an empty
  /// queue and StructuralError for an unknown addressee.
  void step();

  const protocol::AgentState& agent(const std::string& id) const;
  const std::map<std::string, int>& capacity() const { return capacity_; }
  const RunReport& report() const { return report_; }

  /// Final bookkeeping (response spans, registries); call once idle.
  RunReport finish() &&;

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  void push(double time, std::variant<Deliver, AgentWake> body);
  void apply(const protocol::Effects& fx, const std::string& self);
  protocol::AgentState& agent_mut(const std::string& id);

  const Scenario* scenario_;
  protocol::Context ctx_;
  std::map<std::string, protocol::AgentState> agents_;
  std::map<std::string, int> capacity_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> queue_;
  std::uint64_t next_seq_ = 0;
  double clock_ = 0.0;
  std::optional<double> last_resolution_;
  RunReport report_;
};

/// Runs a valid scenario to quiescence. Throws EventCapExceeded when more
/// than `options.event_cap` events are dispatched.
RunReport run(const Scenario& scenario, const RunOptions& options = {});

}  // namespace specnego::sim
