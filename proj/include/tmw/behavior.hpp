#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tmw/model.hpp"

namespace tmw {

// A static sub-diagram merged with time: the unit of the dynamic level.
struct Event {
  std::string id;
  Subdiagram region;
  std::string description;

  bool operator==(const Event&) const = default;
};

enum class EdgeKind : std::uint8_t { Sequence, ParallelSplit, ParallelJoin, Choice };

std::string_view to_string(EdgeKind kind) noexcept;
std::optional<EdgeKind> edge_kind_from_string(std::string_view text) noexcept;

struct OrderingEdge {
  std::string from;
  std::string to;
  EdgeKind kind = EdgeKind::Sequence;
  // Payload predicate for Choice alternatives: "key", "!key",
  // "key == <json literal>" or "key != <json literal>". Empty = unguarded.
  std::string guard;

  auto operator<=>(const OrderingEdge&) const = default;
};

class BehaviorGraph {
 public:
  BehaviorGraph() = default;

  // Unchecked construction; build_behavior() is the validating entry point.
  BehaviorGraph(std::vector<Event> events, std::vector<OrderingEdge> edges,
                std::set<std::string> initial);

  const std::map<std::string, Event>& events() const noexcept { return events_; }
  const std::set<OrderingEdge>& edges() const noexcept { return edges_; }
  const std::set<std::string>& initial() const noexcept { return initial_; }

  const Event* find_event(const std::string& id) const;
  std::vector<const OrderingEdge*> in_edges(const std::string& event) const;
  std::vector<const OrderingEdge*> out_edges(const std::string& event) const;

  // Event whose region holds the stage, if any. Regions are disjoint in a
  // valid graph; with overlaps the lexicographically first event wins.
  std::optional<std::string> event_of_stage(const StageId& stage) const;

  std::set<std::string> event_ids() const;

  bool operator==(const BehaviorGraph&) const = default;

 private:
  std::map<std::string, Event> events_;
  std::set<OrderingEdge> edges_;
  std::set<std::string> initial_;
  std::map<StageId, std::string> stage_owner_;
};

Event define_event(const StaticModel& model, std::string id,
                   const std::set<StageId>& stages, std::string description = {});

// Validates endpoints, reachability from the initial set and Choice
// exclusivity; throws on the first structural problem.
BehaviorGraph build_behavior(std::vector<Event> events,
                             std::vector<OrderingEdge> edges,
                             std::set<std::string> initial);

// Region containment, overlap, graph structure, and ControlImposed
// warnings for Sequence edges not backed by a static flow/trigger path.
Report validate_behavior(const StaticModel& model, const BehaviorGraph& graph);

// Events reachable from the initial set following ordering edges.
std::set<std::string> reachable_events(const BehaviorGraph& graph);

// Directed flow-or-trigger path from any stage of `from` to any of `to`.
bool statically_connected(const StaticModel& model, const Subdiagram& from,
                          const Subdiagram& to);

}  // namespace tmw
