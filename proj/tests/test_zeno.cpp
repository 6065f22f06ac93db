#include <algorithm>

#include "doctest.h"
#include "tmw/zeno.hpp"

using namespace tmw;
using namespace tmw::zeno;

namespace {

struct Expected {
  std::size_t settle;
  std::size_t bounces;
  std::uint64_t residual;
};

// Closed form: the arrow spends one unit per bounce and the far end absorbs.
Expected closed_form(std::size_t n, std::uint64_t e) {
  const std::size_t settle = static_cast<std::size_t>(std::min<std::uint64_t>(e, n - 1));
  return {settle, settle, e - settle};
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& err) {
    return err.code();
  }
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("build_lattice") {
  SpaceLattice one = build_lattice(1);
  CHECK(one.nodes == 1);
  CHECK(one.model.thimacs().size() == 1);
  CHECK(one.model.validate().empty());
  for (const auto& f : one.model.flows()) {
    CHECK(one.model.stage(f.from).owner == one.model.stage(f.to).owner);
  }

  SpaceLattice five = build_lattice(5);
  CHECK(five.model.validate().empty());
  std::size_t cross = 0;
  for (const auto& f : five.model.flows()) {
    const Stage& a = five.model.stage(f.from);
    const Stage& b = five.model.stage(f.to);
    if (a.owner == b.owner) continue;
    ++cross;
    CHECK(a.kind == StageKind::Transfer);
    CHECK(b.kind == StageKind::Transfer);
  }
  CHECK(cross == 4);
  CHECK(five.model.flows().count({"Space2.transfer.out", "Space3.transfer.in"}) == 1);

  for (std::size_t i = 0; i < 5; ++i) {
    std::set<StageKind> kinds;
    for (const auto* s : five.model.stages_of(five.node_id(i))) kinds.insert(s->kind);
    CHECK(kinds == std::set<StageKind>{StageKind::Transfer, StageKind::Receive});
  }

  CHECK(code_of([] { build_lattice(0); }) == ErrorCode::EmptyLattice);
}

TEST_CASE("launch and single steps") {
  SpaceLattice l = build_lattice(5);
  ArrowSim a = launch(l, 3);
  CHECK(a.node() == 0);
  CHECK(a.energy() == 3);
  CHECK_FALSE(a.settled());

  auto first = arrow_step(a);
  REQUIRE(first.size() == 2);
  CHECK(first[0].action == ArrowAction::Arrive);
  CHECK(first[1].action == ArrowAction::Bounce);
  CHECK(a.node() == 1);
  CHECK(a.energy() == 2);

  ArrowSim z = launch(l, 0);
  auto settle = arrow_step(z);
  REQUIRE(settle.size() == 2);
  CHECK(settle[1].action == ArrowAction::Settle);
  CHECK(settle[1].node == 0);
  CHECK(z.settled());
  CHECK(code_of([&] { arrow_step(z); }) == ErrorCode::AlreadySettled);

  SpaceLattice single = build_lattice(1);
  ArrowSim s = launch(single, 10);
  CHECK(s.node() == 0);
  CHECK_FALSE(s.settled());
  BounceTrace t = run_until_settled(s);
  CHECK(t.settle_node == 0);
  CHECK(t.residual == 10);
  CHECK(t.bounces == 0);
}

TEST_CASE("run_until_settled examples") {
  auto run = [](std::size_t n, std::uint64_t e) {
    SpaceLattice l = build_lattice(n);
    ArrowSim a = launch(l, e);
    return run_until_settled(a);
  };
  BounceTrace a = run(5, 3);
  CHECK(a.settle_node == 3);
  CHECK(a.bounces == 3);
  CHECK(a.residual == 0);
  BounceTrace b = run(4, 10);
  CHECK(b.settle_node == 3);
  CHECK(b.bounces == 3);
  CHECK(b.residual == 7);
  BounceTrace c = run(5, 0);
  CHECK(c.settle_node == 0);
  CHECK(c.bounces == 0);
}

TEST_CASE("closed form and trace invariants") {
  for (std::size_t n = 1; n <= 16; ++n) {
    SpaceLattice l = build_lattice(n);
    for (std::uint64_t e = 0; e <= 32; ++e) {
      CAPTURE(n);
      CAPTURE(e);
      ArrowSim a = launch(l, e);
      BounceTrace t = run_until_settled(a);
      const Expected want = closed_form(n, e);
      CHECK(t.settle_node == want.settle);
      CHECK(t.bounces == want.bounces);
      CHECK(t.residual == want.residual);

      // Exactly one settle record, last.
      REQUIRE_FALSE(t.records.empty());
      CHECK(std::count_if(t.records.begin(), t.records.end(), [](const BounceRecord& r) {
              return r.action == ArrowAction::Settle;
            }) == 1);
      CHECK(t.records.back().action == ArrowAction::Settle);
      CHECK(t.records.back().node == want.settle);
      CHECK(t.records.size() == 2 * (want.bounces + 1));

      std::uint64_t prev = e;
      for (std::size_t i = 0; i < t.records.size(); ++i) {
        const BounceRecord& r = t.records[i];
        CHECK(r.energy_after <= prev);
        prev = r.energy_after;
        CHECK(l.model.stage(r.stage).owner == l.node_id(r.node));
        if (r.action == ArrowAction::Settle) {
          CHECK(r.post == Post::Interior);
        } else {
          // Never accepted on the way: every other record is at a boundary.
          CHECK(r.post == Post::Boundary);
        }
        // Arrivals visit nodes 0, 1, 2, ... in order.
        if (r.action == ArrowAction::Arrive) CHECK(r.node == i / 2);
      }
    }
  }
}

TEST_CASE("JSONL and DOT") {
  SpaceLattice l = build_lattice(3);
  ArrowSim a = launch(l, 1);
  BounceTrace t = run_until_settled(a);
  CHECK(to_jsonl(t) ==
        "{\"node\":0,\"action\":\"arrive\",\"energy_after\":1,\"stage\":\"Space0.receive\"}\n"
        "{\"node\":0,\"action\":\"bounce\",\"energy_after\":0,\"stage\":\"Space0.transfer.out\"}\n"
        "{\"node\":1,\"action\":\"arrive\",\"energy_after\":0,\"stage\":\"Space1.receive\"}\n"
        "{\"node\":1,\"action\":\"settle\",\"energy_after\":0,\"stage\":\"Space1.receive\"}\n");

  const std::string dot = render_lattice_dot(l, t.settle_node);
  CHECK(dot.find("subgraph \"cluster_Space1\"") != std::string::npos);
  const auto fill = dot.find("fillcolor");
  REQUIRE(fill != std::string::npos);
  CHECK(dot.rfind("cluster_Space1", fill) > dot.rfind("cluster_Space0", fill));
  CHECK(render_lattice_dot(l, std::nullopt).find("fillcolor") == std::string::npos);
  CHECK(render_lattice_dot(l, t.settle_node) == dot);
}
