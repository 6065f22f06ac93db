#include "tmw/behavior.hpp"

#include <deque>

namespace tmw {

std::string_view to_string(EdgeKind kind) noexcept {
  switch (kind) {
    case EdgeKind::Sequence: return "sequence";
    case EdgeKind::ParallelSplit: return "parallel_split";
    case EdgeKind::ParallelJoin: return "parallel_join";
    case EdgeKind::Choice: return "choice";
  }
  return "?";
}

std::optional<EdgeKind> edge_kind_from_string(std::string_view text) noexcept {
  for (EdgeKind k : {EdgeKind::Sequence, EdgeKind::ParallelSplit,
                     EdgeKind::ParallelJoin, EdgeKind::Choice}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

BehaviorGraph::BehaviorGraph(std::vector<Event> events,
                             std::vector<OrderingEdge> edges,
                             std::set<std::string> initial)
    : edges_(edges.begin(), edges.end()), initial_(std::move(initial)) {
  for (auto& e : events) events_.insert_or_assign(e.id, std::move(e));
  for (const auto& [id, e] : events_) {
    for (const auto& s : e.region.stages) stage_owner_.emplace(s, id);
  }
}

const Event* BehaviorGraph::find_event(const std::string& id) const {
  auto it = events_.find(id);
  return it == events_.end() ? nullptr : &it->second;
}

std::vector<const OrderingEdge*> BehaviorGraph::in_edges(const std::string& event) const {
  std::vector<const OrderingEdge*> out;
  for (const auto& e : edges_) {
    if (e.to == event) out.push_back(&e);
  }
  return out;
}

std::vector<const OrderingEdge*> BehaviorGraph::out_edges(const std::string& event) const {
  std::vector<const OrderingEdge*> out;
  for (const auto& e : edges_) {
    if (e.from == event) out.push_back(&e);
  }
  return out;
}

std::optional<std::string> BehaviorGraph::event_of_stage(const StageId& stage) const {
  auto it = stage_owner_.find(stage);
  if (it == stage_owner_.end()) return std::nullopt;
  return it->second;
}

std::set<std::string> BehaviorGraph::event_ids() const {
  std::set<std::string> ids;
  for (const auto& [id, e] : events_) ids.insert(id);
  return ids;
}

Event define_event(const StaticModel& model, std::string id,
                   const std::set<StageId>& stages, std::string description) {
  if (stages.empty()) {
    throw Error(ErrorCode::EmptyRegion, "event '" + id + "' has no stages");
  }
  return Event{std::move(id), model.extract_region(stages), std::move(description)};
}

std::set<std::string> reachable_events(const BehaviorGraph& graph) {
  std::set<std::string> seen;
  std::deque<std::string> work;
  for (const auto& id : graph.initial()) {
    if (graph.find_event(id) != nullptr && seen.insert(id).second) work.push_back(id);
  }
  while (!work.empty()) {
    std::string cur = work.front();
    work.pop_front();
    for (const auto* e : graph.out_edges(cur)) {
      if (graph.find_event(e->to) != nullptr && seen.insert(e->to).second) {
        work.push_back(e->to);
      }
    }
  }
  return seen;
}

namespace {

// Structural checks shared by build_behavior (throwing) and
// validate_behavior (reporting).
std::vector<std::pair<ErrorCode, Finding>> structural_findings(const BehaviorGraph& g) {
  std::vector<std::pair<ErrorCode, Finding>> out;
  auto add = [&](ErrorCode code, std::string subject, std::string message) {
    out.push_back({code, Finding{Severity::Error, std::string(to_string(code)),
                                 std::move(subject), std::move(message)}});
  };
  for (const auto& [id, e] : g.events()) {
    if (e.region.empty()) add(ErrorCode::EmptyRegion, id, "event has no stages");
  }
  for (const auto& id : g.initial()) {
    if (g.find_event(id) == nullptr) {
      add(ErrorCode::UnknownEndpoint, id, "initial event '" + id + "' is not defined");
    }
  }
  for (const auto& e : g.edges()) {
    for (const auto* end : {&e.from, &e.to}) {
      if (g.find_event(*end) == nullptr) {
        add(ErrorCode::UnknownEndpoint, e.from + "->" + e.to,
            "edge endpoint '" + *end + "' is not defined");
      }
    }
  }
  for (const auto& [id, ev] : g.events()) {
    auto outs = g.out_edges(id);
    bool any_choice = false;
    bool any_other = false;
    for (const auto* e : outs) {
      (e->kind == EdgeKind::Choice ? any_choice : any_other) = true;
    }
    if (any_choice && any_other) {
      add(ErrorCode::MixedChoice, id,
          "Choice alternatives out of '" + id + "' are mixed with other edge kinds");
    }
  }
  auto reached = reachable_events(g);
  for (const auto& [id, e] : g.events()) {
    if (reached.count(id) == 0) {
      add(ErrorCode::UnreachableEvent, id,
          "event '" + id + "' is not reachable from an initial event");
    }
  }
  return out;
}

}  // namespace

BehaviorGraph build_behavior(std::vector<Event> events, std::vector<OrderingEdge> edges,
                             std::set<std::string> initial) {
  std::set<std::string> ids;
  for (const auto& e : events) {
    if (!ids.insert(e.id).second) {
      throw Error(ErrorCode::DuplicateEvent, "event '" + e.id + "' defined twice");
    }
  }
  BehaviorGraph graph(std::move(events), std::move(edges), std::move(initial));
  auto problems = structural_findings(graph);
  if (!problems.empty()) {
    throw Error(problems.front().first, problems.front().second.message);
  }
  return graph;
}

bool statically_connected(const StaticModel& model, const Subdiagram& from,
                          const Subdiagram& to) {
  std::set<StageId> seen;
  std::deque<StageId> work;
  for (const auto& s : from.stages) {
    seen.insert(s);
    work.push_back(s);
  }
  while (!work.empty()) {
    StageId cur = work.front();
    work.pop_front();
    auto visit = [&](const StageId& next) {
      if (to.contains(next) && !from.contains(next)) return true;
      if (seen.insert(next).second) work.push_back(next);
      return false;
    };
    for (const auto& n : model.flow_targets(cur)) {
      if (visit(n)) return true;
    }
    for (const auto& n : model.trigger_targets(cur)) {
      if (visit(n)) return true;
    }
  }
  return false;
}

Report validate_behavior(const StaticModel& model, const BehaviorGraph& graph) {
  Report report;
  const std::uint64_t fp = model.fingerprint();

  for (const auto& [id, e] : graph.events()) {
    bool foreign = e.region.model_fingerprint != fp;
    for (const auto& s : e.region.stages) {
      if (model.find_stage(s) == nullptr) foreign = true;
    }
    if (foreign) {
      report.findings.push_back({Severity::Error, "RegionForeign", id,
                                 "region of '" + id + "' is not part of this model"});
    }
  }

  std::map<StageId, std::string> owner;
  for (const auto& [id, e] : graph.events()) {
    for (const auto& s : e.region.stages) {
      auto [it, fresh] = owner.emplace(s, id);
      if (!fresh) {
        report.findings.push_back(
            {Severity::Error, "OverlappingRegion", s,
             "stage '" + s + "' is in both '" + it->second + "' and '" + id + "'"});
      }
    }
  }

  for (auto& [code, finding] : structural_findings(graph)) {
    report.findings.push_back(std::move(finding));
  }

  for (const auto& e : graph.edges()) {
    if (e.kind != EdgeKind::Sequence) continue;
    const Event* a = graph.find_event(e.from);
    const Event* b = graph.find_event(e.to);
    if (a == nullptr || b == nullptr) continue;
    if (!statically_connected(model, a->region, b->region)) {
      report.findings.push_back(
          {Severity::Warning, "ControlImposed", e.from + "->" + e.to,
           "ordering " + e.from + " -> " + e.to +
               " is not backed by a static flow or trigger path"});
    }
  }
  return report;
}

}  // namespace tmw
