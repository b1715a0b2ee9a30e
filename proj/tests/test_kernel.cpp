#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "specnego/error.hpp"
#include "specnego/kernel.hpp"

using namespace specnego;
using namespace specnego::protocol;

namespace {

Scenario hand_trace(int sus) {
  auto s = fixtures::reference_topology({sus});
  s.timing = Timing{10, 5, 2, 1, 2};
  return s;
}

std::optional<double> first_delivery(const sim::RunReport& r, MessageKind k) {
  for (const auto& e : r.event_log) {
    if (e.kind == k) return e.time;
  }
  return std::nullopt;
}

void check_invariants(const Scenario& s, const sim::RunReport& r) {
  REQUIRE(r.sent_messages == r.total_messages);
  std::uint64_t deliveries = 0;
  double last = 0;
  for (const auto& e : r.event_log) {
    REQUIRE(e.time >= last);
    last = e.time;
    if (e.kind) {
      ++deliveries;
      REQUIRE(e.time == e.emitted + s.timing.latency);
    }
  }
  REQUIRE(deliveries == r.total_messages);
  std::map<std::string, int> granted;
  for (const auto& a : r.allocations) granted[a.offer.pu_id] += a.granted_channels;
  for (const auto& [pu, cap] : r.final_capacity) {
    REQUIRE(cap >= 0);
    REQUIRE(granted[pu] + cap == r.initial_capacity.at(pu));
  }
  REQUIRE(r.violations.empty());
}

}  // namespace

TEST_CASE("single SU hand trace") {
  const auto s = hand_trace(1);
  const auto r = sim::run(s);
  // Request delivered at 10, batch emitted at 15 and delivered at 25, offers
  // emitted at 27 and delivered at 37, reply emitted at 42, delivered at 52.
  CHECK(first_delivery(r, MessageKind::Cfp) == 25.0);
  CHECK(first_delivery(r, MessageKind::CpuOffer) == 37.0);
  CHECK(first_delivery(r, MessageKind::SuReply) == 52.0);
  CHECK(r.run_response == 52.0);
  check_invariants(s, r);
}

TEST_CASE("ten staggered SUs hand trace") {
  const auto s = hand_trace(10);
  const auto r = sim::run(s);
  CHECK(first_delivery(r, MessageKind::Cfp) == 970.0);  // fired at 960
  CHECK(r.run_response == 997.0);
  check_invariants(s, r);
}

TEST_CASE("reference topology aggregated totals 75 messages") {
  const auto s = fixtures::reference_topology({5, 5, 5});
  const auto r = sim::run(s);
  CHECK(r.total_messages == 75);
  CHECK(r.msg_counts.at(MessageKind::ParamUpdate) == 15);
  CHECK(r.msg_counts.at(MessageKind::SuRequest) == 15);
  CHECK(r.msg_counts.at(MessageKind::Cfp) == 15);
  CHECK(r.msg_counts.at(MessageKind::CpuOffer) + r.msg_counts.at(MessageKind::CpuNoOffer) == 15);
  CHECK(r.msg_counts.at(MessageKind::SuReply) == 15);
  check_invariants(s, r);
}

TEST_CASE("step dispatches in (time, seq) order") {
  const auto s = fixtures::reference_topology({1});
  sim::World w(s);
  w.post(Message{MessageKind::ParamUpdate, "pu01", "cpu1", ParamPayload{3, 9, 50}}, 5.0);
  w.step();
  CHECK(w.report().event_log.size() == 1);
  CHECK(w.now() == 5.0);

  w.post(Message{MessageKind::ParamUpdate, "pu11", "cpu1", ParamPayload{1, 9, 50}}, 7.0);
  w.post(Message{MessageKind::ParamUpdate, "pu06", "cpu1", ParamPayload{2, 9, 50}}, 7.0);
  w.step();
  w.step();
  const auto& log = w.report().event_log;
  CHECK(log[1].from == "pu11");
  CHECK(log[2].from == "pu06");
  CHECK(log[1].seq < log[2].seq);
  CHECK(w.idle());
  CHECK_THROWS_AS(w.step(), std::logic_error);
}

TEST_CASE("delivery to an unknown agent is a structural error") {
  const auto s = fixtures::reference_topology({1});
  sim::World w(s);
  w.post(Message{MessageKind::ParamUpdate, "pu01", "nobody", ParamPayload{}}, 1.0);
  CHECK_THROWS_AS(w.step(), StructuralError);
}

TEST_CASE("event cap aborts a run") {
  CHECK_THROWS_AS(sim::run(fixtures::reference_topology({5}), sim::RunOptions{5}), sim::EventCapExceeded);
}

TEST_CASE("unserved SUs are marked and the run still quiesces") {
  auto s = fixtures::reference_topology({5});
  for (auto& p : s.pus) p.channels = 0;
  const auto r = sim::run(s);
  CHECK(r.allocations.empty());
  for (const auto& [_, v] : r.per_su_response) CHECK_FALSE(v.has_value());
  CHECK(r.msg_counts.at(MessageKind::CpuNoOffer) == 5);
  CHECK(r.total_messages == 15 + 2 * 5 + 2 * 5);
}

TEST_CASE("runs are deterministic") {
  for (auto t : {Topology::NoCoalition, Topology::CpuOnly, Topology::CpuCsu}) {
    const auto s = fixtures::reference_topology({5, 3, 4}, t);
    CHECK(sim::run(s) == sim::run(s));
  }
}

TEST_CASE("property: closed-form totals and invariants on generated scenarios") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 120; ++trial) {
    experiments::GeneratorConfig g;
    g.seed = rng();
    g.topology = static_cast<Topology>(rng() % 3);
    g.aggregation = rng() % 2 == 0;
    g.pus = static_cast<int>(rng() % 20);
    g.cpus = g.topology == Topology::NoCoalition ? 0 : 1 + static_cast<int>(rng() % 6);
    const int groups = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < groups; ++i) g.su_groups.push_back(1 + static_cast<int>(rng() % 6));
    g.arrival_spacing = double(rng() % 3) * 7.0;
    g.timing = Timing{double(rng() % 12), double(rng() % 6), double(rng() % 4), double(rng() % 3),
                      double(rng() % 4)};
    const auto s = experiments::generate_scenario(g);
    REQUIRE(validate(s).empty());
    const auto r = sim::run(s);
    const auto expect = experiments::expected_messages(
        s.topology, s.aggregation, s.sus.size(), s.pus.size(), s.cpu_coordinators.size(),
        s.csu_coordinators.size());
    REQUIRE(r.total_messages == expect);
    check_invariants(s, r);
  }
}
