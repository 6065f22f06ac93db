#include <random>

#include "doctest.h"
#include "support.hpp"
#include "tmw/bpmn.hpp"
#include "tmw/dsl.hpp"
#include "tmw/money.hpp"
#include "tmw/sim.hpp"

using namespace tmw;
using namespace tmw::sim;

namespace {

StaticModel load(const std::string& fixture) {
  ParseResult r = parse_model(test::fixture(fixture), fixture);
  REQUIRE(r.diagnostics.empty());
  return r.model;
}

StaticModel parse(const std::string& text) {
  ParseResult r = parse_model(text);
  REQUIRE(r.diagnostics.empty());
  return r.model;
}

std::vector<Action> actions(const std::vector<TraceRecord>& recs) {
  std::vector<Action> out;
  for (const auto& r : recs) out.push_back(r.action);
  return out;
}

std::set<StageId> stages_of(const StaticModel& m, const ThimacId& t) {
  std::set<StageId> out;
  for (const auto* s : m.stages_of(t)) out.insert(s->id);
  return out;
}

Simulation order_sim(const reconfig::Configuration& cfg, std::uint64_t seed) {
  bpmn::OrderCase oc = bpmn::build_order_case();
  Simulation s(oc.model, cfg.behavior, seed, cfg.id);
  bpmn::install_order_hooks(s);
  return s;
}

// Index of the last record in `thimac` and of the first record in `other`.
bool all_before(const std::vector<TraceRecord>& log, const std::string& thimac,
                const std::string& other) {
  std::size_t last = 0, first = log.size();
  bool seen = false;
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (log[i].thimac == thimac) {
      last = i;
      seen = true;
    }
    if (log[i].thimac == other && first == log.size()) first = i;
  }
  REQUIRE(seen);
  REQUIRE(first < log.size());
  return last < first;
}

// Every live thing rests on an interior post, and every queued thing is live
// and queued exactly once at its own location.
void check_resting(const Simulation& s) {
  std::map<std::string, int> seen;
  for (const auto& [stage, q] : s.queues()) {
    for (const auto& id : q) {
      ++seen[id];
      REQUIRE(s.things().count(id) == 1);
      CHECK(s.things().at(id).location == stage);
    }
  }
  for (const auto& [id, t] : s.things()) {
    CHECK(seen[id] == 1);
    CHECK(s.model().stage(t.location).post() == Post::Interior);
  }
}

// Mode law plus connectivity of each thing's path through the static model.
void check_trace_laws(const StaticModel& m, const std::vector<TraceRecord>& log) {
  std::map<std::string, std::vector<const TraceRecord*>> by_thing;
  for (const auto& r : log) {
    CHECK(r.mode == mode_of(r.action));
    const Stage& st = m.stage(r.stage);
    CHECK(r.thimac == st.owner);
    switch (r.action) {
      case Action::Arrive:
        CHECK(st.kind == StageKind::Receive);
        CHECK(r.mode == Mode::Progression);
        break;
      case Action::Accept:
        CHECK(st.kind == StageKind::Receive);
        CHECK(r.mode == Mode::State);
        break;
      case Action::Trigger:
        CHECK_FALSE(m.trigger_targets(r.stage).empty());
        break;
      default: {
        // Stage actions carry the mode of the post they happen at.
        const bool state = r.mode == Mode::State;
        CHECK(state == (st.post() == Post::Interior));
        CHECK(std::string(to_string(r.action)) == std::string(to_string(st.kind)));
      }
    }
    by_thing[r.thing].push_back(&r);
  }
  for (const auto& [thing, recs] : by_thing) {
    CAPTURE(thing);
    REQUIRE(recs.front()->action == Action::Create);
    const TraceRecord* prev = nullptr;
    for (const TraceRecord* r : recs) {
      if (r->action == Action::Trigger) continue;
      if (prev != nullptr) {
        const bool same = prev->stage == r->stage;
        if (same) {
          CHECK(prev->action == Action::Arrive);
          CHECK(r->action == Action::Accept);
        } else {
          CHECK(m.flows().count({prev->stage, r->stage}) == 1);
        }
      }
      prev = r;
    }
  }
  // Things born mid-run were created by a trigger in the same step.
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& r = log[i];
    if (r.action != Action::Create || i == 0 || log[i - 1].action != Action::Trigger) continue;
    CHECK(log[i - 1].step == r.step);
    CHECK(m.triggers().count({log[i - 1].stage, r.stage}) == 1);
  }
}

}  // namespace

TEST_CASE("initial state") {
  bpmn::OrderCase oc = bpmn::build_order_case();
  Simulation a(oc.model, oc.e21.behavior, 7, "E21");
  Simulation b(oc.model, oc.e21.behavior, 7, "E21");
  CHECK(a.step_count() == 0);
  CHECK(a.queues().empty());
  CHECK(a.things().empty());
  CHECK(a.quiescent());
  CHECK(a == b);
  Simulation c(oc.model, oc.e21.behavior, 8, "E21");
  CHECK(a.seed() != c.seed());

  StaticModel other = load("pipe.tm");
  try {
    Simulation bad(other, oc.e21.behavior, 7);
    FAIL("foreign behavior accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RegionForeign);
  }
}

TEST_CASE("inject_thing") {
  Simulation s(load("pipe.tm"), 1);
  const std::string t1 = s.inject_thing("Sender.create", {{"items", {30, 20}}, {"shipping", 10}});
  const std::string t2 = s.inject_thing("Sender.create");
  CHECK(t1 == "t1");
  CHECK(t2 == "t2");
  REQUIRE(s.queues().count("Sender.create") == 1);
  CHECK(s.queues().at("Sender.create") == std::deque<std::string>{t1, t2});
  CHECK(actions(s.log()) == std::vector<Action>{Action::Create, Action::Create});
  CHECK(s.things().at(t1).payload["shipping"] == 10);

  // FIFO: the older thing moves first.
  auto recs = s.step();
  REQUIRE_FALSE(recs.empty());
  CHECK(recs.front().thing == t1);

  try {
    s.inject_thing("Receiver.process");
    FAIL("process stage accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotACreateStage);
  }
  CHECK_THROWS_AS(s.inject_thing("Nowhere.create"), Error);
}

TEST_CASE("a step carries a thing across progression posts") {
  Simulation s(load("pipe.tm"), 3);
  const std::string t = s.inject_thing("Sender.create");
  auto recs = s.step();
  CHECK(actions(recs) == std::vector<Action>{Action::Release, Action::Transfer, Action::Transfer,
                                             Action::Arrive, Action::Accept});
  CHECK(recs[1].stage == "Sender.transfer.out");
  CHECK(recs[2].stage == "Receiver.transfer.in");
  CHECK(s.things().at(t).location == "Receiver.receive");
  for (const auto& r : recs) CHECK(r.step == 1);

  CHECK(actions(s.step()) == std::vector<Action>{Action::Process});
  CHECK(s.quiescent());
  CHECK(s.step().empty());
  CHECK(s.step_count() == 2);
  check_resting(s);
}

TEST_CASE("process completion fires a trigger") {
  Simulation s(parse(R"(
    thimac Credit { create; process; flow create -> process; }
    thimac Billing { create; process; flow create -> process; }
    trigger Credit.process -> Billing.create;
  )"), 5);
  s.inject_thing("Credit.create", {{"amount", 4}});
  auto recs = s.step();
  CHECK(actions(recs) == std::vector<Action>{Action::Process, Action::Trigger, Action::Create});
  CHECK(recs[2].stage == "Billing.create");
  CHECK(recs[2].thing == "t2");
  CHECK(recs[2].case_id == recs[0].case_id);
  CHECK(s.things().at("t2").payload["amount"] == 4);
  CHECK(actions(s.step()) == std::vector<Action>{Action::Process});
  CHECK(s.quiescent());
}

TEST_CASE("quiescent simulations") {
  Simulation s(load("pipe.tm"), 0);
  CHECK(s.step().empty());
  Trace t = s.run(100);
  CHECK(t.records.empty());
  CHECK(t.steps == 0);
  CHECK_FALSE(t.budget_exhausted);
  CHECK(s.run(0).records.empty());
}

TEST_CASE("budget exhaustion is metadata") {
  Simulation s = order_sim(bpmn::build_order_case().e21, 1);
  s.inject_thing(std::string(bpmn::kOrderEntry), bpmn::order_payload());
  Trace t = s.run(3);
  CHECK(t.steps == 3);
  CHECK(t.budget_exhausted);
  Trace rest = s.run(10000);
  CHECK_FALSE(rest.budget_exhausted);
  CHECK(s.quiescent());
}

TEST_CASE("E21 always bills before shipping") {
  auto cfg = bpmn::build_order_case().e21;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CAPTURE(seed);
    Simulation s = order_sim(cfg, seed);
    s.inject_thing(std::string(bpmn::kOrderEntry), bpmn::order_payload());
    s.run(10000);
    REQUIRE(s.quiescent());
    CHECK_FALSE(s.case_in_flight("case1"));
    CHECK(all_before(s.log(), "Billing", "Shipping"));
  }
}

TEST_CASE("E20 allows both interleavings") {
  auto cfg = bpmn::build_order_case().e20;
  int billing_first = 0, shipping_first = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Simulation s = order_sim(cfg, seed);
    s.inject_thing(std::string(bpmn::kOrderEntry), bpmn::order_payload());
    s.run(10000);
    CHECK_FALSE(s.case_in_flight("case1"));
    if (all_before(s.log(), "Billing", "Shipping")) {
      ++billing_first;
    } else {
      ++shipping_first;
    }
  }
  CHECK(billing_first > 0);
  CHECK(shipping_first > 0);
}

TEST_CASE("rejected orders skip billing") {
  Simulation s = order_sim(bpmn::build_order_case().e20, 4);
  auto payload = bpmn::order_payload();
  payload["approved"] = false;
  s.inject_thing(std::string(bpmn::kOrderEntry), payload);
  s.run(10000);
  CHECK_FALSE(s.case_in_flight("case1"));
  bool reject = false;
  for (const auto& r : s.log()) {
    CHECK(r.thimac != "Billing");
    CHECK(r.thimac != "ProcessOrder");
    reject = reject || r.thimac == "RejectOrder";
  }
  CHECK(reject);
}

TEST_CASE("billing hook computes the total") {
  Simulation s = order_sim(bpmn::build_order_case().e21, 2);
  std::optional<Payload> shipped;
  s.on_process("Shipping.process", [&](Payload& p) { shipped = p; });
  s.inject_thing(std::string(bpmn::kOrderEntry), bpmn::order_payload());
  std::optional<Payload> billed;
  while (!billed) {
    auto recs = s.step();
    REQUIRE_FALSE(recs.empty());
    if (recs.front().action == Action::Process && recs.front().thimac == "Billing") {
      billed = s.things().at(recs.front().thing).payload;
    }
  }
  CHECK((*billed)["total"] == "60.00");
  s.run(10000);
  REQUIRE(shipped.has_value());
  CHECK_FALSE(shipped->contains("total"));  // shipping runs on its own thing
  CHECK_THROWS_AS(s.on_process("Billing.receive", [](Payload&) {}), Error);
}

TEST_CASE("billing_total") {
  auto total = [](std::vector<std::string> items, const std::string& ship) {
    std::vector<Money> m;
    for (const auto& i : items) m.push_back(Money::parse(i));
    return billing_total(m, Money::parse(ship));
  };
  CHECK(total({"30", "20"}, "10") == Money::parse("60"));
  CHECK(total({}, "0") == Money::parse("0"));
  CHECK(total({"5"}, "2.5") == Money::parse("7.5"));
  CHECK(total({"5"}, "2.5").to_string() == "7.50");
  try {
    total({"-1"}, "0");
    FAIL("negative accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeAmount);
  }
  CHECK_THROWS_AS(total({}, "-0.01"), Error);
  CHECK_THROWS_AS(Money::parse("1.005"), Error);
  CHECK_THROWS_AS(Money::parse("1e3"), Error);
  CHECK(Money::from_json(2.5) == Money::parse("2.50"));
  CHECK(Money::from_json("12") == Money::from_cents(1200));
}

TEST_CASE("guards") {
  const Payload p = {{"approved", true}, {"n", 3}, {"who", "ann"}, {"empty", ""}};
  CHECK(guard_holds("", p));
  CHECK(guard_holds("approved", p));
  CHECK_FALSE(guard_holds("!approved", p));
  CHECK_FALSE(guard_holds("missing", p));
  CHECK(guard_holds("!missing", p));
  CHECK_FALSE(guard_holds("empty", p));
  CHECK(guard_holds("n == 3", p));
  CHECK(guard_holds("n != 4", p));
  CHECK(guard_holds("who == \"ann\"", p));
  CHECK_FALSE(guard_holds("who == \"bob\"", p));
  CHECK_THROWS_AS(guard_holds("n < 3", p), Error);
  CHECK_THROWS_AS(guard_holds("n == ann", p), Error);
}

TEST_CASE("injection scripts") {
  auto script = parse_injection_script(test::fixture("order_inject.json"));
  REQUIRE(script.size() == 2);
  CHECK(script[1].step == 4);

  Simulation s = order_sim(bpmn::build_order_case().e21, 11);
  Trace t = s.run_script(script, 10000);
  CHECK_FALSE(t.budget_exhausted);
  CHECK(s.quiescent());
  std::vector<std::uint64_t> creates;
  for (const auto& r : t.records) {
    if (r.action == Action::Create && r.stage == bpmn::kOrderEntry) creates.push_back(r.step);
  }
  CHECK(creates == std::vector<std::uint64_t>{0, 4});
  CHECK(s.case_ids() == std::vector<std::string>{"case1", "case2"});
  CHECK(t.records == s.log());

  // A late injection lands as soon as the simulation runs dry.
  Simulation late(load("pipe.tm"), 0);
  Trace lt = late.run_script({{1000, "Sender.create", {}}}, 50);
  CHECK(lt.records.size() == 7);
  CHECK(lt.records.front().step == 0);

  CHECK_THROWS_AS(parse_injection_script("{}"), Error);
  CHECK_THROWS_AS(parse_injection_script("[{\"step\": 1}]"), Error);
}

TEST_CASE("determinism") {
  auto cfg = bpmn::build_order_case().e20;
  auto script = parse_injection_script(test::fixture("order_inject.json"));
  for (std::uint64_t seed : {0ULL, 5ULL, 99ULL}) {
    std::string first;
    for (int i = 0; i < 3; ++i) {
      Simulation s = order_sim(cfg, seed);
      std::string text = to_jsonl(s.run_script(script, 10000).records);
      if (i == 0) {
        first = text;
      } else {
        CHECK(text == first);
      }
    }
  }
}

TEST_CASE("JSONL field order") {
  TraceRecord r{3, "t1", "A", "A.create", Action::Create, Mode::State, "case1", "E20"};
  CHECK(to_jsonl(r) ==
        R"({"step":3,"thing":"t1","thimac":"A","stage":"A.create","action":"create","mode":"state","case":"case1","config":"E20"})");
  std::vector<TraceRecord> two{r, r};
  CHECK(to_jsonl(two) == to_jsonl(r) + "\n" + to_jsonl(r) + "\n");
}

TEST_CASE("invariants hold over random runs") {
  bpmn::OrderCase oc = bpmn::build_order_case();
  std::vector<StaticModel> models;
  for (const auto& p : test::tm_corpus()) models.push_back(parse(test::slurp(p)));
  std::mt19937 rng(1234);

  auto exercise = [&](Simulation& s) {
    std::vector<StageId> creates;
    for (const auto& [id, st] : s.model().stages()) {
      if (st.kind == StageKind::Create) creates.push_back(id);
    }
    if (creates.empty()) return;
    for (int i = 0; i < 200; ++i) {
      if (rng() % 5 == 0) {
        Payload p = bpmn::order_payload();
        p["approved"] = rng() % 2 == 0;
        s.inject_thing(creates[rng() % creates.size()], p);
      }
      auto before = s.step_count();
      auto recs = s.step();
      CHECK(s.step_count() == before + (recs.empty() ? 0 : 1));
      check_resting(s);
    }
    check_trace_laws(s.model(), s.log());
  };

  for (const auto& m : models) {
    Simulation s(m, rng());
    exercise(s);
  }
  for (const auto* cfg : {&oc.e20, &oc.e21}) {
    for (int k = 0; k < 10; ++k) {
      Simulation s(oc.model, cfg->behavior, rng(), cfg->id);
      bpmn::install_order_hooks(s);
      exercise(s);
    }
  }
}

TEST_CASE("configurations and repinning") {
  StaticModel m = load("pipe.tm");
  auto send = define_event(m, "Send", stages_of(m, "Sender"));
  auto recv = define_event(m, "Recv", stages_of(m, "Receiver"));
  BehaviorGraph both = build_behavior({send, recv}, {{"Send", "Recv", EdgeKind::Sequence, {}}},
                                      {"Send"});
  BehaviorGraph recv_only = build_behavior({recv}, {}, {"Recv"});

  Simulation s(m, both, 0, "X");
  s.add_configuration("Y", recv_only);
  s.add_configuration("X2", both);
  CHECK_THROWS_AS(s.add_configuration("X", both), Error);
  CHECK_THROWS_AS(s.set_active_configuration("nope"), Error);

  s.inject_thing("Sender.create");
  CHECK(s.case_config("case1") == "X");
  CHECK(s.current_events("case1") == std::set<std::string>{"Send"});
  CHECK(s.event_status("case1", "Send") == EventStatus::Active);
  CHECK(s.event_status("case1", "Recv") == EventStatus::Idle);

  CHECK_FALSE(s.repin_case("case1", "Y"));
  CHECK(s.case_config("case1") == "X");
  CHECK(s.repin_case("case1", "X2"));
  CHECK(s.case_config("case1") == "X2");

  s.set_active_configuration("Y");
  s.inject_thing("Sender.create");
  CHECK(s.case_config("case2") == "Y");

  s.run(100);
  CHECK_FALSE(s.case_in_flight("case1"));
  CHECK(s.event_status("case1", "Recv") == EventStatus::Done);
  for (const auto& r : s.log()) {
    if (r.case_id == "case1" && r.step > 0) CHECK(r.config == "X2");
  }
  CHECK_THROWS_AS(s.case_config("case9"), Error);
}
