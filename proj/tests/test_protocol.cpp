#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "specnego/protocol.hpp"

using namespace specnego;
using namespace specnego::protocol;

namespace {

const std::map<std::string, int> kCaps{{"pu1", 5}, {"pu2", 4}, {"pu3", 8}, {"puA", 4}, {"puB", 4}};

Context ctx(bool aggregation = true, Topology t = Topology::CpuCsu) {
  Context c;
  c.topology = t;
  c.aggregation = aggregation;
  c.capacity = &kCaps;
  return c;
}

SuCoalitionAgent csu(std::vector<std::string> members, int cpus) {
  SuCoalitionAgent a;
  a.id = "csu1";
  a.members = std::move(members);
  for (int i = 1; i <= cpus; ++i) a.cpus.push_back("cpu" + std::to_string(i));
  return a;
}

Message request(const std::string& su, int ch, double at) {
  return Message{MessageKind::SuRequest, su, "csu1", Demand{su, ch, at}};
}

Message offer_from(const std::string& cpu, const std::string& pu, int ch, double price) {
  return Message{MessageKind::CpuOffer, cpu, "csu1", OfferReply{Offer{pu, cpu, ch, price, 60}, {}}};
}

}  // namespace

TEST_CASE("SU coalition with one member fires the batch after one aggregation step") {
  const auto tr = handle(csu({"su1"}, 5), request("su1", 2, 0), 10.0, ctx());
  REQUIRE(tr.effects.sends.size() == 5);
  for (const auto& s : tr.effects.sends) {
    CHECK(s.message.kind == MessageKind::Cfp);
    CHECK(s.delay == 5.0);
    CHECK(std::get<DemandBatch>(s.message.payload).demands.size() == 1);
  }
  CHECK(std::get<SuCoalitionAgent>(tr.state).phase == CsuPhase::AwaitingOffers);
}

TEST_CASE("SU coalition waits for every member before the batch") {
  auto tr = handle(csu({"su1", "su2", "su3"}, 2), request("su2", 1, 100), 110, ctx());
  CHECK(tr.effects.sends.empty());
  tr = handle(std::move(tr.state), request("su1", 1, 0), 111, ctx());
  CHECK(tr.effects.sends.empty());
  tr = handle(std::move(tr.state), request("su3", 1, 200), 210, ctx());
  REQUIRE(tr.effects.sends.size() == 2);
  CHECK(tr.effects.sends[0].delay == 15.0);
  // Batch ordered by arrival time.
  const auto& batch = std::get<DemandBatch>(tr.effects.sends[0].message.payload).demands;
  CHECK(batch[0].su_id == "su1");
  CHECK(batch[1].su_id == "su2");
  CHECK(batch[2].su_id == "su3");
}

TEST_CASE("PU coalition answers a batch with exactly one offer") {
  PuCoalitionAgent cpu{"cpu1", ParamRegistry({"pu1", "pu2", "pu3"})};
  auto tr = handle(cpu, Message{MessageKind::ParamUpdate, "pu1", "cpu1", ParamPayload{5, 10, 60}}, 10, ctx());
  tr = handle(std::move(tr.state), Message{MessageKind::ParamUpdate, "pu2", "cpu1", ParamPayload{4, 8, 60}}, 10, ctx());
  tr = handle(std::move(tr.state), Message{MessageKind::ParamUpdate, "pu3", "cpu1", ParamPayload{8, 12, 60}}, 10, ctx());
  CHECK(std::get<PuCoalitionAgent>(tr.state).registry.entries().size() == 3);

  tr = handle(std::move(tr.state),
              Message{MessageKind::Cfp, "csu1", "cpu1", DemandBatch{{Demand{"su1", 2, 0}}}}, 25, ctx());
  REQUIRE(tr.effects.sends.size() == 1);
  CHECK(tr.effects.sends[0].message.kind == MessageKind::CpuOffer);
  CHECK(tr.effects.sends[0].message.to == "csu1");
  CHECK(tr.effects.sends[0].delay == 2.0);
}

TEST_CASE("empty PU coalition replies CpuNoOffer") {
  PuCoalitionAgent cpu{"cpu1", ParamRegistry({"pu1"})};
  const auto tr = handle(cpu, Message{MessageKind::CfpSingle, "su1", "cpu1", Demand{"su1", 1, 0}}, 0, ctx());
  REQUIRE(tr.effects.sends.size() == 1);
  CHECK(tr.effects.sends[0].message.kind == MessageKind::CpuNoOffer);
  CHECK(std::get<OfferReply>(tr.effects.sends[0].message.payload).for_su == "su1");
}

TEST_CASE("ParamUpdate from a non-member is a violation") {
  PuCoalitionAgent cpu{"cpu1", ParamRegistry({"pu1"})};
  const auto tr = handle(cpu, Message{MessageKind::ParamUpdate, "pu7", "cpu1", ParamPayload{1, 1, 1}}, 0, ctx());
  CHECK(tr.effects.violations.size() == 1);
  CHECK(std::get<PuCoalitionAgent>(tr.state) == cpu);
}

TEST_CASE("last offer triggers one reply per member after ranking cost") {
  std::vector<std::string> members{"s1", "s2", "s3", "s4", "s5"};
  AgentState st = csu(members, 5);
  for (std::size_t i = 0; i < members.size(); ++i) {
    st = handle(std::move(st), request(members[i], 1, double(i)), 10.0 + double(i), ctx()).state;
  }
  const std::string pus[] = {"pu1", "pu2", "pu3", "puA", "puB"};
  for (int i = 0; i < 4; ++i) {
    auto tr = handle(std::move(st), offer_from("cpu" + std::to_string(i + 1), pus[i], 4, 10.0 + i), 50, ctx());
    CHECK(tr.effects.sends.empty());
    st = std::move(tr.state);
  }
  const auto tr = handle(std::move(st), offer_from("cpu5", "puB", 4, 9.0), 60, ctx());
  REQUIRE(tr.effects.sends.size() == 5);
  for (const auto& s : tr.effects.sends) {
    CHECK(s.message.kind == MessageKind::SuReply);
    CHECK(s.delay == 5.0);
  }
  CHECK(tr.effects.allocations.size() == 5);
  CHECK(std::get<SuCoalitionAgent>(tr.state).phase == CsuPhase::Done);

  const auto late = handle(tr.state, offer_from("cpu1", "pu1", 4, 1.0), 70, ctx());
  CHECK(late.effects.violations.size() == 1);
  CHECK(late.state == tr.state);
}

TEST_CASE("non-aggregated coalition forwards each demand separately") {
  auto tr = handle(csu({"s1", "s2"}, 3), request("s1", 2, 0), 10, ctx(false));
  REQUIRE(tr.effects.sends.size() == 3);
  CHECK(tr.effects.sends[0].message.kind == MessageKind::CfpSingle);
  CHECK(tr.effects.sends[0].delay == 5.0);

  for (int i = 1; i <= 3; ++i) {
    const Message m{MessageKind::CpuOffer, "cpu" + std::to_string(i), "csu1",
                    OfferReply{Offer{"pu" + std::to_string(i), "cpu" + std::to_string(i), 4, 10.0 + i, 60}, "s1"}};
    tr = handle(std::move(tr.state), m, 30, ctx(false));
  }
  REQUIRE(tr.effects.sends.size() == 1);
  CHECK(tr.effects.sends[0].message.to == "s1");
  CHECK(tr.effects.sends[0].delay == 3.0);
  CHECK(std::get<SuCoalitionAgent>(tr.state).phase == CsuPhase::Collecting);
}

TEST_CASE("terminal SU records a violation") {
  SuAgent su;
  su.user = SecondaryUser{"s1", {}, 1, 0};
  su.phase = SuPhase::Served;
  const auto tr = handle(su, Message{MessageKind::SuReply, "csu1", "s1", GrantPayload{}}, 0, ctx());
  CHECK(tr.effects.violations.size() == 1);
  CHECK(std::get<SuAgent>(tr.state) == su);
}

TEST_CASE("malformed payload is a violation") {
  const Message bad{MessageKind::Cfp, "csu1", "cpu1", Demand{"s", 1, 0}};
  CHECK_FALSE(well_formed(bad));
  CHECK_FALSE(well_formed(Message{MessageKind::SuReply, "a", "a", GrantPayload{}}));
  const auto tr = handle(PuCoalitionAgent{"cpu1", {}}, bad, 0, ctx());
  CHECK(tr.effects.violations.size() == 1);
}

TEST_CASE("handlers are pure") {
  const AgentState st = csu({"s1"}, 2);
  const auto a = handle(st, request("s1", 1, 0), 10, ctx());
  const auto b = handle(st, request("s1", 1, 0), 10, ctx());
  CHECK(a.state == b.state);
  REQUIRE(a.effects.sends.size() == b.effects.sends.size());
  for (std::size_t i = 0; i < a.effects.sends.size(); ++i) CHECK(a.effects.sends[i] == b.effects.sends[i]);
}

TEST_CASE("assign_offers") {
  const Offer a{"A", "c1", 5, 10, 60}, b{"B", "c2", 4, 10, 60};

  SUBCASE("single demand decrements capacity") {
    const Demand d[] = {{"s1", 3, 0}};
    const Offer o[] = {a};
    const auto r = assign_offers(o, d, {{"A", 5}});
    REQUIRE(r.allocations.size() == 1);
    CHECK(r.allocations[0].granted_channels == 3);
    CHECK(r.unserved.empty());
  }
  SUBCASE("rank-ordered consumption") {
    const Demand d[] = {{"s1", 4, 0}, {"s2", 4, 1}};
    const Offer o[] = {Offer{"A", "c1", 4, 1, 1}, b};
    const auto r = assign_offers(o, d, {{"A", 4}, {"B", 4}});
    REQUIRE(r.allocations.size() == 2);
    CHECK(r.allocations[0].offer.pu_id == "A");
    CHECK(r.allocations[1].offer.pu_id == "B");
  }
  SUBCASE("exhaustion leaves the third demand unserved") {
    const Demand d[] = {{"s1", 2, 0}, {"s2", 2, 1}, {"s3", 2, 2}};
    const Offer o[] = {a, b};
    const auto r = assign_offers(o, d, {{"A", 5}, {"B", 4}});
    CHECK(r.allocations.size() == 2);
    CHECK(r.unserved == std::vector<std::string>{"s3"});
  }
  SUBCASE("insufficient capacity skips to the next offer") {
    const Demand d[] = {{"s1", 5, 0}};
    const Offer o[] = {b, a};
    const auto r = assign_offers(o, d, {{"A", 5}, {"B", 4}});
    REQUIRE(r.allocations.size() == 1);
    CHECK(r.allocations[0].offer.pu_id == "A");
  }
}

TEST_CASE("topology_plan wiring") {
  const auto nc = topology_plan(fixtures::reference_topology({5}, Topology::NoCoalition));
  CHECK(nc.su_targets.begin()->second.size() == 15);
  CHECK_FALSE(nc.pu_coordinator.begin()->second.has_value());

  const auto co = topology_plan(fixtures::reference_topology({5}, Topology::CpuOnly));
  CHECK(co.su_targets.begin()->second.size() == 5);
  for (const auto& [_, members] : co.pu_groups) CHECK(members.size() == 3);

  const auto full = topology_plan(fixtures::reference_topology({5, 5, 5}));
  CHECK(full.su_groups.size() == 3);
  for (const auto& [_, t] : full.su_targets) CHECK(t.size() == 1);
}
