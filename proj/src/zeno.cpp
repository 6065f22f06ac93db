#include "tmw/zeno.hpp"

#include "json.hpp"
#include "tmw/dot.hpp"

namespace tmw::zeno {

SpaceLattice build_lattice(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::EmptyLattice, "a lattice needs at least one node");
  SpaceLattice l;
  l.model.set_name("space");
  l.nodes = n;
  for (std::size_t i = 0; i < n; ++i) {
    const ThimacId t = l.model.add_thimac(l.node_id(i));
    const StageId in = l.model.add_stage(t, StageKind::Transfer, Port::In);
    const StageId rx = l.model.add_stage(t, StageKind::Receive);
    l.model.add_stage(t, StageKind::Transfer, Port::Out);
    l.model.add_flow(in, rx);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    l.model.add_flow(make_stage_id(l.node_id(i), StageKind::Transfer, Port::Out),
                     make_stage_id(l.node_id(i + 1), StageKind::Transfer, Port::In));
  }
  return l;
}

std::string_view to_string(ArrowAction a) noexcept {
  switch (a) {
    case ArrowAction::Arrive: return "arrive";
    case ArrowAction::Bounce: return "bounce";
    case ArrowAction::Settle: return "settle";
  }
  return "?";
}

std::string to_jsonl(const BounceTrace& trace) {
  std::string out;
  for (const auto& r : trace.records) {
    nlohmann::ordered_json j;
    j["node"] = r.node;
    j["action"] = std::string(to_string(r.action));
    j["energy_after"] = r.energy_after;
    j["stage"] = r.stage;
    out += j.dump();
    out += '\n';
  }
  return out;
}

ArrowSim::ArrowSim(const SpaceLattice& lattice, std::uint64_t energy)
    : lattice_(&lattice), energy_(energy) {}

std::optional<std::size_t> ArrowSim::next_node() const {
  const StageId out = make_stage_id(lattice_->node_id(node_), StageKind::Transfer, Port::Out);
  for (const StageId& to : lattice_->model.flow_targets(out)) {
    const ThimacId& owner = lattice_->model.stage(to).owner;
    for (std::size_t i = 0; i < lattice_->nodes; ++i) {
      if (lattice_->node_id(i) == owner) return i;
    }
  }
  return std::nullopt;
}

std::vector<BounceRecord> ArrowSim::step() {
  if (settled_) throw Error(ErrorCode::AlreadySettled, "the arrow has already settled");
  const ThimacId node = lattice_->node_id(node_);
  const StageId receive = make_stage_id(node, StageKind::Receive, Port::None);
  std::vector<BounceRecord> out;
  out.push_back({node_, ArrowAction::Arrive, energy_, receive, post_of(ReceivePost::Arrive)});
  auto next = next_node();
  if (energy_ > 0 && next) {
    --energy_;
    out.push_back({node_, ArrowAction::Bounce, energy_,
                   make_stage_id(node, StageKind::Transfer, Port::Out), Post::Boundary});
    node_ = *next;
  } else {
    out.push_back({node_, ArrowAction::Settle, energy_, receive, post_of(ReceivePost::Accept)});
    settled_ = true;
  }
  return out;
}

ArrowSim launch(const SpaceLattice& lattice, std::uint64_t energy) {
  return ArrowSim(lattice, energy);
}

std::vector<BounceRecord> arrow_step(ArrowSim& sim) { return sim.step(); }

BounceTrace run_until_settled(ArrowSim& sim) {
  BounceTrace trace;
  while (!sim.settled()) {
    for (auto& r : sim.step()) {
      if (r.action == ArrowAction::Bounce) ++trace.bounces;
      trace.records.push_back(std::move(r));
    }
  }
  trace.settle_node = sim.node();
  trace.residual = sim.energy();
  return trace;
}

std::string render_lattice_dot(const SpaceLattice& lattice, std::optional<std::size_t> settle_node) {
  DotOptions opt;
  if (settle_node) opt.highlight.insert(lattice.node_id(*settle_node));
  return render_dot(lattice.model, opt);
}

}  // namespace tmw::zeno
