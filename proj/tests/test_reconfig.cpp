#include "doctest.h"
#include "support.hpp"
#include "tmw/bpmn.hpp"
#include "tmw/dsl.hpp"
#include "tmw/order_demo.hpp"
#include "tmw/reconfig.hpp"
#include "tmw/serialize.hpp"

using namespace tmw;
using namespace tmw::reconfig;

namespace {

Controller order_controller(std::uint64_t seed = 0) {
  bpmn::OrderCase oc = bpmn::build_order_case();
  Controller c(oc.model, seed);
  c.register_config(oc.e20);
  c.register_config(oc.e21);
  bpmn::install_order_hooks(c.simulation());
  return c;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

// The order graph with the Billing event and its edges removed. Shipping is
// still reachable through the fork.
Configuration without_billing(const StaticModel& m, const BehaviorGraph& g) {
  const std::string bill = *g.event_of_stage("Billing.process");
  std::vector<Event> events;
  for (const auto& [id, e] : g.events()) {
    if (id != bill) events.push_back(e);
  }
  std::vector<OrderingEdge> edges;
  for (const auto& e : g.edges()) {
    if (e.from != bill && e.to != bill) edges.push_back(e);
  }
  Configuration c{"NoBill", build_behavior(events, edges, g.initial()), "billing dropped"};
  REQUIRE_FALSE(validate_behavior(m, c.behavior).has_errors());
  return c;
}

}  // namespace

TEST_CASE("register_config") {
  bpmn::OrderCase oc = bpmn::build_order_case();
  Controller c(oc.model, 0);
  const std::string before = serialize_json(c.model());
  const auto fp = c.model().fingerprint();
  c.register_config(oc.e20);
  c.register_config(oc.e21);
  CHECK(c.configs().size() == 2);
  CHECK(serialize_json(c.model()) == before);
  CHECK(c.model().fingerprint() == fp);

  CHECK(code_of([&] { c.register_config(oc.e20); }) == ErrorCode::DuplicateConfig);

  ParseResult pipe = parse_model(test::fixture("pipe.tm"));
  std::set<StageId> sender;
  for (const auto* s : pipe.model.stages_of("Sender")) sender.insert(s->id);
  Configuration foreign{"P", build_behavior({define_event(pipe.model, "S", sender)}, {}, {"S"}), ""};
  CHECK(code_of([&] { c.register_config(foreign); }) == ErrorCode::RegionForeign);
  CHECK(c.configs().size() == 2);
}

TEST_CASE("activate") {
  Controller c = order_controller();
  CHECK(c.active().empty());
  CHECK(code_of([&] { c.start_case(std::string(bpmn::kOrderEntry)); }) == ErrorCode::UnknownConfig);
  c.activate("E21");
  CHECK(c.active() == "E21");
  c.activate("E21");
  CHECK(c.active() == "E21");
  CHECK(code_of([&] { c.activate("E99"); }) == ErrorCode::UnknownConfig);
  CHECK(c.active() == "E21");
  c.start_case(std::string(bpmn::kOrderEntry), bpmn::order_payload());
  CHECK(c.in_flight() == std::map<std::string, std::string>{{"case1", "E21"}});
}

TEST_CASE("switch with nothing in flight") {
  Controller c = order_controller();
  c.activate("E20");
  SwitchReport r = c.switch_to("E21", SwitchPolicy::DrainOld);
  CHECK(r.stranded_count() == 0);
  CHECK(r.coexisting == std::map<std::string, std::size_t>{{"E21", 0}});
  CHECK(c.active() == "E21");
  CHECK(code_of([&] { c.switch_to("E99", SwitchPolicy::Immediate); }) == ErrorCode::UnknownConfig);
  CHECK(r.to_json().dump() ==
        R"({"policy":"drain","target":"E21","coexisting":{"E21":0},"repinned":[],"stranded":[],"stranded_count":0})");
}

TEST_CASE("drain keeps the old case on its config") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CAPTURE(seed);
    demo::DemoResult d = demo::run_reconfig_demo(SwitchPolicy::DrainOld, seed);
    CHECK(d.report.coexisting == std::map<std::string, std::size_t>{{"E20", 1}, {"E21", 0}});
    CHECK(d.report.stranded_count() == 0);
    CHECK(d.report.repinned.empty());
    CHECK(d.old_case_finished);
    CHECK(d.new_case_finished);
    CHECK(d.model_before == d.model_after);
    for (const auto& r : d.trace) {
      if (r.case_id == d.old_case) CHECK(r.config == "E20");
      if (r.case_id == d.new_case) CHECK(r.config == "E21");
    }
    CHECK(demo::configs_interleave(d.trace, "E20", "E21"));
  }
}

TEST_CASE("immediate repins in-flight cases") {
  demo::DemoResult d = demo::run_reconfig_demo(SwitchPolicy::Immediate, 3);
  CHECK(d.report.repinned == std::vector<std::string>{d.old_case});
  CHECK(d.report.stranded_count() == 0);
  CHECK(d.report.coexisting == std::map<std::string, std::size_t>{{"E21", 1}});
  CHECK(d.old_case_finished);
  CHECK(d.new_case_finished);
}

TEST_CASE("immediate strands a case whose event is missing") {
  Controller c = order_controller(9);
  c.register_config(without_billing(c.model(), c.configs().at("E20").behavior));
  c.activate("E20");
  c.start_case(std::string(bpmn::kOrderEntry), bpmn::order_payload());
  auto& s = c.simulation();
  // Run until the case rests inside Billing.
  bool at_billing = false;
  while (!at_billing) {
    auto recs = s.step();
    REQUIRE_FALSE(recs.empty());
    at_billing = recs.back().thimac == "Billing" && recs.back().action == sim::Action::Accept;
  }
  const std::string bill = *c.configs().at("E20").behavior.event_of_stage("Billing.process");
  REQUIRE(s.current_events("case1").count(bill) == 1);

  SwitchReport r = c.switch_to("NoBill", SwitchPolicy::Immediate);
  CHECK(r.stranded == std::vector<std::string>{"case1"});
  CHECK(r.stranded_count() == 1);
  CHECK(r.repinned.empty());
  CHECK(s.case_config("case1") == "E20");
  CHECK(r.coexisting == std::map<std::string, std::size_t>{{"E20", 1}, {"NoBill", 0}});
  CHECK(r.to_json()["stranded"] == nlohmann::ordered_json::array({"case1"}));

  // The stranded case keeps running under its old graph.
  s.run(10000);
  CHECK_FALSE(s.case_in_flight("case1"));
}

TEST_CASE("static model never changes") {
  Controller c = order_controller(4);
  const std::string before = serialize_json(c.model());
  c.activate("E20");
  c.start_case(std::string(bpmn::kOrderEntry), bpmn::order_payload());
  c.simulation().run(5);
  c.switch_to("E21", SwitchPolicy::DrainOld);
  c.start_case(std::string(bpmn::kOrderEntry), bpmn::order_payload());
  c.switch_to("E20", SwitchPolicy::Immediate);
  c.activate("E21");
  c.simulation().run(10000);
  CHECK(serialize_json(c.model()) == before);
  CHECK(c.in_flight().empty());
}

TEST_CASE("E20 and E21 differ only in ordering edges") {
  bpmn::OrderCase oc = bpmn::build_order_case();
  CHECK(oc.e20.behavior.events() == oc.e21.behavior.events());
  CHECK(oc.e20.behavior.initial() == oc.e21.behavior.initial());
  CHECK(oc.e20.behavior.edges() != oc.e21.behavior.edges());
}
