#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tmw/behavior.hpp"
#include "tmw/model.hpp"
#include "tmw/reconfig.hpp"
#include "tmw/report.hpp"
#include "tmw/sim.hpp"

namespace tmw::bpmn {

enum class NodeKind : std::uint8_t { Task, StartEvent, EndEvent, ExclusiveGateway, ParallelGateway };

std::string_view to_string(NodeKind kind) noexcept;

struct Node {
  std::string id;
  std::string name;
  NodeKind kind = NodeKind::Task;
};

struct SequenceFlow {
  std::string id;
  std::string source;
  std::string target;
  std::string condition;  // text of conditionExpression, trimmed
};

struct BpmnGraph {
  std::string process_id;
  std::vector<Node> nodes;  // document order
  std::vector<SequenceFlow> flows;

  const Node* find(std::string_view id) const;
  std::size_t count(NodeKind kind) const;
  std::vector<const SequenceFlow*> outgoing(std::string_view id) const;
  std::vector<const SequenceFlow*> incoming(std::string_view id) const;
};

struct ParseResult {
  BpmnGraph graph;
  Report diagnostics;  // UnsupportedElement / DroppedFlow warnings
};

// Reads the supported subset: task, startEvent, endEvent, exclusiveGateway,
// parallelGateway, sequenceFlow. Throws MalformedXml, MissingStartEvent or
// InvalidBpmn (flow naming an id that never existed).
ParseResult parse_bpmn(std::string_view xml);

struct Mapping {
  StaticModel model;
  BehaviorGraph behavior;
  std::map<std::string, ThimacId> thimac_of;  // bpmn node id -> thimac
  std::map<std::string, std::string> event_of;  // bpmn node id -> event
};

// Throws DegenerateGateway for a gateway that neither splits nor merges.
Mapping map_bpmn(const BpmnGraph& graph);

// "Order Accepted?" -> "OrderAccepted"
std::string sanitize_name(std::string_view text);

struct OrderCase {
  StaticModel model;
  reconfig::Configuration e20;
  reconfig::Configuration e21;
};

std::string_view order_case_xml();
OrderCase build_order_case();

// Entry stage of the order case and a payload that takes the accept branch.
inline constexpr std::string_view kOrderEntry = "OrderReceived.create";
sim::Payload order_payload();

// Billing computes `total` from `items` and `shipping`.
void install_order_hooks(sim::Simulation& sim);

// Isomorphism of the thimac/stage/flow/trigger structure preserving thimac
// names (last path segment), stage kinds and ports. Ids are ignored.
bool labeled_isomorphic(const StaticModel& a, const StaticModel& b);

}  // namespace tmw::bpmn
