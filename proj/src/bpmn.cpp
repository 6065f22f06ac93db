#include "tmw/bpmn.hpp"

#include <expat.h>

#include <algorithm>
#include <cctype>
#include <memory>
#include <set>
#include <tuple>

#include "tmw/money.hpp"

namespace tmw::bpmn {

std::string_view to_string(NodeKind kind) noexcept {
  switch (kind) {
    case NodeKind::Task: return "task";
    case NodeKind::StartEvent: return "startEvent";
    case NodeKind::EndEvent: return "endEvent";
    case NodeKind::ExclusiveGateway: return "exclusiveGateway";
    case NodeKind::ParallelGateway: return "parallelGateway";
  }
  return "?";
}

const Node* BpmnGraph::find(std::string_view id) const {
  auto it = std::find_if(nodes.begin(), nodes.end(), [&](const Node& n) { return n.id == id; });
  return it == nodes.end() ? nullptr : &*it;
}

std::size_t BpmnGraph::count(NodeKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [&](const Node& n) { return n.kind == kind; }));
}

std::vector<const SequenceFlow*> BpmnGraph::outgoing(std::string_view id) const {
  std::vector<const SequenceFlow*> out;
  for (const auto& f : flows) {
    if (f.source == id) out.push_back(&f);
  }
  return out;
}

std::vector<const SequenceFlow*> BpmnGraph::incoming(std::string_view id) const {
  std::vector<const SequenceFlow*> out;
  for (const auto& f : flows) {
    if (f.target == id) out.push_back(&f);
  }
  return out;
}

// ---------------------------------------------------------------------------
// XML reading

namespace {

constexpr std::string_view kModelNs = "http://www.omg.org/spec/BPMN/20100524/MODEL";
constexpr char kNsSep = '|';

struct QName {
  std::string_view ns;
  std::string_view local;
};

QName split(const XML_Char* name) {
  std::string_view s(name);
  auto bar = s.find(kNsSep);
  if (bar == std::string_view::npos) return {{}, s};
  return {s.substr(0, bar), s.substr(bar + 1)};
}

std::string attr(const XML_Char** atts, std::string_view key) {
  for (int i = 0; atts[i] != nullptr; i += 2) {
    if (split(atts[i]).local == key && split(atts[i]).ns.empty()) return atts[i + 1];
  }
  return {};
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<NodeKind> node_kind(std::string_view local) {
  if (local == "task") return NodeKind::Task;
  if (local == "startEvent") return NodeKind::StartEvent;
  if (local == "endEvent") return NodeKind::EndEvent;
  if (local == "exclusiveGateway") return NodeKind::ExclusiveGateway;
  if (local == "parallelGateway") return NodeKind::ParallelGateway;
  return std::nullopt;
}

struct Reader {
  XML_Parser parser = nullptr;
  ParseResult result;
  std::set<std::string> skipped_ids;
  int depth = 0;
  int skip_until = -1;  // depth at which a skipped subtree started
  int process_depth = -1;
  bool in_flow = false;
  bool in_condition = false;
  std::string condition_text;

  void warn(std::string code, std::string subject, std::string message) {
    result.diagnostics.findings.push_back(
        {Severity::Warning, std::move(code), std::move(subject), std::move(message)});
  }

  void skip(QName q, const XML_Char** atts) {
    std::string id = attr(atts, "id");
    if (!id.empty()) skipped_ids.insert(id);
    warn("UnsupportedElement", std::string(q.local),
         "unsupported element <" + std::string(q.local) + ">" +
             (id.empty() ? "" : " id=\"" + id + "\"") + " at line " +
             std::to_string(XML_GetCurrentLineNumber(parser)) + " skipped");
    skip_until = depth;
  }

  void start(const XML_Char* name, const XML_Char** atts) {
    ++depth;
    if (skip_until >= 0) return;
    QName q = split(name);
    const bool bpmn = q.ns == kModelNs || q.ns.empty();
    if (!bpmn) {
      // Diagram interchange and vendor extensions carry no process semantics.
      skip_until = depth;
      return;
    }
    if (q.local == "definitions" && depth == 1) return;
    if (q.local == "process" && process_depth < 0) {
      process_depth = depth;
      result.graph.process_id = attr(atts, "id");
      return;
    }
    if (process_depth < 0 || depth < process_depth + 1) {
      skip(q, atts);
      return;
    }
    if (depth == process_depth + 1) {
      if (auto kind = node_kind(q.local)) {
        result.graph.nodes.push_back({attr(atts, "id"), attr(atts, "name"), *kind});
        return;
      }
      if (q.local == "sequenceFlow") {
        result.graph.flows.push_back(
            {attr(atts, "id"), attr(atts, "sourceRef"), attr(atts, "targetRef"), {}});
        in_flow = true;
        return;
      }
      skip(q, atts);
      return;
    }
    // Children of a supported element.
    if (q.local == "incoming" || q.local == "outgoing" || q.local == "documentation" ||
        q.local == "extensionElements") {
      skip_until = depth;
      return;
    }
    if (in_flow && q.local == "conditionExpression") {
      in_condition = true;
      condition_text.clear();
      return;
    }
    skip(q, atts);
  }

  void end() {
    if (skip_until >= 0) {
      if (depth == skip_until) skip_until = -1;
      --depth;
      return;
    }
    if (in_condition) {
      result.graph.flows.back().condition = trim(condition_text);
      in_condition = false;
    } else if (in_flow && depth == process_depth + 1) {
      in_flow = false;
    } else if (depth == process_depth) {
      process_depth = -2;  // only the first process is read
    }
    --depth;
  }

  void text(const XML_Char* s, int len) {
    if (in_condition && skip_until < 0) condition_text.append(s, static_cast<std::size_t>(len));
  }
};

void XMLCALL on_start(void* ud, const XML_Char* name, const XML_Char** atts) {
  static_cast<Reader*>(ud)->start(name, atts);
}
void XMLCALL on_end(void* ud, const XML_Char*) { static_cast<Reader*>(ud)->end(); }
void XMLCALL on_text(void* ud, const XML_Char* s, int len) {
  static_cast<Reader*>(ud)->text(s, len);
}

struct ParserDeleter {
  void operator()(XML_ParserStruct* p) const { XML_ParserFree(p); }
};

}  // namespace

ParseResult parse_bpmn(std::string_view xml) {
  std::unique_ptr<XML_ParserStruct, ParserDeleter> parser(XML_ParserCreateNS(nullptr, kNsSep));
  if (!parser) throw Error(ErrorCode::MalformedXml, "cannot allocate XML parser");
  Reader reader;
  reader.parser = parser.get();
  XML_SetUserData(parser.get(), &reader);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);
  if (XML_Parse(parser.get(), xml.data(), static_cast<int>(xml.size()), XML_TRUE) ==
      XML_STATUS_ERROR) {
    throw Error(ErrorCode::MalformedXml,
                std::string(XML_ErrorString(XML_GetErrorCode(parser.get()))) + " at line " +
                    std::to_string(XML_GetCurrentLineNumber(parser.get())) + ", column " +
                    std::to_string(XML_GetCurrentColumnNumber(parser.get()) + 1));
  }

  ParseResult out = std::move(reader.result);
  BpmnGraph& g = out.graph;
  std::set<std::string> ids;
  for (const auto& n : g.nodes) {
    if (n.id.empty()) throw Error(ErrorCode::InvalidBpmn, "<" + std::string(to_string(n.kind)) + "> without id");
    if (!ids.insert(n.id).second) throw Error(ErrorCode::InvalidBpmn, "duplicate id '" + n.id + "'");
  }
  std::vector<SequenceFlow> kept;
  for (auto& f : g.flows) {
    bool dropped = false;
    for (const std::string* ref : {&f.source, &f.target}) {
      if (ids.count(*ref) != 0) continue;
      if (reader.skipped_ids.count(*ref) == 0) {
        throw Error(ErrorCode::InvalidBpmn,
                    "sequenceFlow '" + f.id + "' references unknown node '" + *ref + "'");
      }
      dropped = true;
    }
    if (dropped) {
      out.diagnostics.findings.push_back({Severity::Warning, "DroppedFlow", f.id,
                                          "sequenceFlow '" + f.id +
                                              "' touches a skipped element and was dropped"});
    } else {
      kept.push_back(std::move(f));
    }
  }
  g.flows = std::move(kept);
  const std::size_t starts = g.count(NodeKind::StartEvent);
  if (starts == 0) throw Error(ErrorCode::MissingStartEvent, "process has no startEvent");
  if (starts > 1) {
    throw Error(ErrorCode::InvalidBpmn,
                "process has " + std::to_string(starts) + " startEvents, expected exactly one");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mapping

std::string sanitize_name(std::string_view text) {
  std::string out;
  bool boundary = true;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) != 0 || c == '_') {
      out += boundary ? static_cast<char>(std::toupper(u)) : c;
      boundary = false;
    } else {
      boundary = true;
    }
  }
  if (!out.empty() && std::isdigit(static_cast<unsigned char>(out.front())) != 0) out.insert(0, "N");
  return out;
}

namespace {

std::string unique(std::string base, std::set<std::string>& taken) {
  if (base.empty()) base = "Node";
  std::string name = base;
  for (int i = 2; taken.count(name) != 0; ++i) name = base + std::to_string(i);
  taken.insert(name);
  return name;
}

}  // namespace

Mapping map_bpmn(const BpmnGraph& graph) {
  Mapping m;
  StaticModel& model = m.model;
  model.set_name(graph.process_id);
  std::set<std::string> top_names;
  std::map<std::string, StageId> entry;  // node -> stage receiving its inbound flows
  std::map<std::string, StageId> exit;   // node -> stage sending its outbound flow
  std::map<std::string, StageId> outlet_of_flow;
  std::map<std::string, std::set<StageId>> region;

  auto chain = [&](const std::vector<StageId>& stages) {
    for (std::size_t i = 0; i + 1 < stages.size(); ++i) model.add_flow(stages[i], stages[i + 1]);
  };

  for (const auto& n : graph.nodes) {
    const bool gateway = n.kind == NodeKind::ExclusiveGateway || n.kind == NodeKind::ParallelGateway;
    if (gateway && graph.outgoing(n.id).size() < 2 && graph.incoming(n.id).size() < 2) {
      throw Error(ErrorCode::DegenerateGateway,
                  std::string(to_string(n.kind)) + " '" + n.id + "' neither splits nor merges");
    }
    const ThimacId t = model.add_thimac(unique(sanitize_name(n.name.empty() ? n.id : n.name), top_names));
    m.thimac_of[n.id] = t;
    std::vector<StageId> s;
    switch (n.kind) {
      case NodeKind::Task:
      case NodeKind::ExclusiveGateway:
        s = {model.add_stage(t, StageKind::Transfer, Port::In), model.add_stage(t, StageKind::Receive),
             model.add_stage(t, StageKind::Process), model.add_stage(t, StageKind::Release),
             model.add_stage(t, StageKind::Transfer, Port::Out)};
        entry[n.id] = s.front();
        exit[n.id] = s.back();
        break;
      case NodeKind::StartEvent:
        s = {model.add_stage(t, StageKind::Create), model.add_stage(t, StageKind::Release),
             model.add_stage(t, StageKind::Transfer, Port::Out)};
        exit[n.id] = s.back();
        break;
      case NodeKind::EndEvent:
        s = {model.add_stage(t, StageKind::Transfer, Port::In), model.add_stage(t, StageKind::Receive),
             model.add_stage(t, StageKind::Release)};
        entry[n.id] = s.front();
        break;
      case NodeKind::ParallelGateway: {
        s = {model.add_stage(t, StageKind::Transfer, Port::In), model.add_stage(t, StageKind::Receive),
             model.add_stage(t, StageKind::Process)};
        entry[n.id] = s.front();
        std::set<std::string> outlet_names;
        for (const SequenceFlow* f : graph.outgoing(n.id)) {
          const Node* target = graph.find(f->target);
          const ThimacId o = model.add_thimac(
              unique("to" + sanitize_name(target->name.empty() ? target->id : target->name), outlet_names), t);
          std::vector<StageId> os = {model.add_stage(o, StageKind::Create),
                                     model.add_stage(o, StageKind::Release),
                                     model.add_stage(o, StageKind::Transfer, Port::Out)};
          chain(os);
          model.add_trigger(s.back(), os.front());
          outlet_of_flow[f->id] = os.back();
          region[n.id].insert(os.begin(), os.end());
        }
        break;
      }
    }
    chain(s);
    if (n.kind != NodeKind::StartEvent && n.kind != NodeKind::EndEvent) {
      region[n.id].insert(s.begin(), s.end());
    }
  }

  for (const auto& f : graph.flows) {
    auto o = outlet_of_flow.find(f.id);
    if (exit.count(f.source) == 0 && o == outlet_of_flow.end()) {
      throw Error(ErrorCode::InvalidBpmn, "sequenceFlow '" + f.id + "' leaves an endEvent");
    }
    const StageId& from = o != outlet_of_flow.end() ? o->second : exit.at(f.source);
    auto to = entry.find(f.target);
    if (to == entry.end()) {
      throw Error(ErrorCode::InvalidBpmn, "sequenceFlow '" + f.id + "' enters a startEvent");
    }
    model.add_flow(from, to->second);
  }

  std::vector<Event> events;
  for (const auto& n : graph.nodes) {
    auto r = region.find(n.id);
    if (r == region.end()) continue;
    const std::string id = m.thimac_of.at(n.id);
    m.event_of[n.id] = id;
    events.push_back(define_event(model, id, r->second, n.name));
  }
  std::vector<OrderingEdge> edges;
  std::set<std::string> initial;
  for (const auto& f : graph.flows) {
    const Node* src = graph.find(f.source);
    const Node* dst = graph.find(f.target);
    auto se = m.event_of.find(f.source);
    auto de = m.event_of.find(f.target);
    if (de == m.event_of.end()) continue;
    if (src->kind == NodeKind::StartEvent) {
      initial.insert(de->second);
      continue;
    }
    if (se == m.event_of.end()) continue;
    OrderingEdge e{se->second, de->second, EdgeKind::Sequence, {}};
    if (dst->kind == NodeKind::ParallelGateway && graph.incoming(dst->id).size() >= 2) {
      e.kind = EdgeKind::ParallelJoin;
    } else if (src->kind == NodeKind::ExclusiveGateway) {
      e.kind = EdgeKind::Choice;
      e.guard = f.condition;
    } else if (src->kind == NodeKind::ParallelGateway && graph.outgoing(src->id).size() >= 2) {
      e.kind = EdgeKind::ParallelSplit;
    }
    edges.push_back(std::move(e));
  }
  if (!events.empty()) m.behavior = build_behavior(std::move(events), std::move(edges), std::move(initial));
  return m;
}

// ---------------------------------------------------------------------------
// Order-handling case

std::string_view order_case_xml() {
  return R"xml(<?xml version="1.0" encoding="UTF-8"?>
<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL"
             xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance"
             id="OrderDefinitions" targetNamespace="http://example.org/order">
  <process id="OrderHandling" isExecutable="false">
    <startEvent id="start" name="Order Received"/>
    <task id="fill" name="Fill Order Form"/>
    <task id="credit" name="Credit Check"/>
    <task id="inventory" name="Inventory Check"/>
    <exclusiveGateway id="accepted" name="Order Accepted?"/>
    <task id="process" name="Process Order"/>
    <task id="reject" name="Reject Order"/>
    <parallelGateway id="fork" name="Fork"/>
    <task id="billing" name="Billing"/>
    <task id="shipping" name="Shipping"/>
    <parallelGateway id="join" name="Join"/>
    <task id="archive" name="Archive Order"/>
    <task id="confirm" name="Send Confirmation"/>
    <endEvent id="end" name="Order Closed"/>

    <sequenceFlow id="f1" sourceRef="start" targetRef="fill"/>
    <sequenceFlow id="f2" sourceRef="fill" targetRef="credit"/>
    <sequenceFlow id="f3" sourceRef="credit" targetRef="inventory"/>
    <sequenceFlow id="f4" sourceRef="inventory" targetRef="accepted"/>
    <sequenceFlow id="f5" sourceRef="accepted" targetRef="process">
      <conditionExpression xsi:type="tFormalExpression">approved</conditionExpression>
    </sequenceFlow>
    <sequenceFlow id="f6" sourceRef="accepted" targetRef="reject">
      <conditionExpression xsi:type="tFormalExpression">!approved</conditionExpression>
    </sequenceFlow>
    <sequenceFlow id="f7" sourceRef="reject" targetRef="end"/>
    <sequenceFlow id="f8" sourceRef="process" targetRef="fork"/>
    <sequenceFlow id="f9" sourceRef="fork" targetRef="billing"/>
    <sequenceFlow id="f10" sourceRef="fork" targetRef="shipping"/>
    <sequenceFlow id="f11" sourceRef="billing" targetRef="join"/>
    <sequenceFlow id="f12" sourceRef="shipping" targetRef="join"/>
    <sequenceFlow id="f13" sourceRef="join" targetRef="archive"/>
    <sequenceFlow id="f14" sourceRef="archive" targetRef="confirm"/>
    <sequenceFlow id="f15" sourceRef="confirm" targetRef="end"/>
  </process>
</definitions>
)xml";
}

OrderCase build_order_case() {
  Mapping m = map_bpmn(parse_bpmn(order_case_xml()).graph);
  OrderCase oc;
  oc.model = m.model;
  oc.e20 = {"E20", m.behavior, "billing and shipping activated simultaneously"};

  std::vector<Event> events;
  for (const auto& [id, e] : m.behavior.events()) events.push_back(e);
  std::vector<OrderingEdge> edges;
  for (const auto& e : m.behavior.edges()) {
    if (e.from == "Fork" && e.to == "Shipping") continue;
    edges.push_back(e);
  }
  edges.push_back({"Billing", "Shipping", EdgeKind::Sequence, {}});
  oc.e21 = {"E21", build_behavior(std::move(events), std::move(edges), m.behavior.initial()),
            "billing before shipping"};
  return oc;
}

sim::Payload order_payload() {
  return sim::Payload{{"approved", true}, {"items", {30, 20}}, {"shipping", 10}};
}

void install_order_hooks(sim::Simulation& sim) {
  sim.on_process("Billing.process", [](sim::Payload& p) {
    std::vector<Money> items;
    if (p.contains("items")) {
      for (const auto& v : p.at("items")) items.push_back(Money::from_json(v));
    }
    Money shipping = p.contains("shipping") ? Money::from_json(p.at("shipping")) : Money{};
    p["total"] = billing_total(items, shipping).to_string();
  });
}

// ---------------------------------------------------------------------------
// Labeled isomorphism

namespace {

struct LGraph {
  std::vector<std::string> label;
  std::vector<std::vector<std::pair<int, char>>> out, in;
  std::set<std::tuple<int, int, char>> edges;
};

LGraph to_lgraph(const StaticModel& m) {
  LGraph g;
  std::map<std::string, int> idx;
  for (const auto& [id, t] : m.thimacs()) {
    idx["T" + id] = static_cast<int>(g.label.size());
    g.label.push_back("thimac:" + t.name);
  }
  for (const auto& [id, s] : m.stages()) {
    idx["S" + id] = static_cast<int>(g.label.size());
    g.label.push_back("stage:" + std::string(to_string(s.kind)) + ":" + std::string(to_string(s.port)));
  }
  g.out.resize(g.label.size());
  g.in.resize(g.label.size());
  auto add = [&](const std::string& a, const std::string& b, char type) {
    auto ia = idx.find(a);
    auto ib = idx.find(b);
    if (ia == idx.end() || ib == idx.end()) return;
    g.out[ia->second].push_back({ib->second, type});
    g.in[ib->second].push_back({ia->second, type});
    g.edges.insert({ia->second, ib->second, type});
  };
  for (const auto& [id, t] : m.thimacs()) {
    if (t.parent) add("T" + id, "T" + *t.parent, 'p');
  }
  for (const auto& [id, s] : m.stages()) add("S" + id, "T" + s.owner, 'o');
  for (const auto& f : m.flows()) add("S" + f.from, "S" + f.to, 'f');
  for (const auto& t : m.triggers()) add("S" + t.from, "S" + t.to, 't');
  return g;
}

// Joint colour refinement over both graphs so colours are comparable.
void refine(const LGraph& a, const LGraph& b, std::vector<int>& ca, std::vector<int>& cb) {
  std::map<std::string, int> initial;
  for (const auto* g : {&a, &b}) {
    for (const auto& l : g->label) initial.emplace(l, 0);
  }
  int next = 0;
  for (auto& [_, v] : initial) v = next++;
  ca.clear();
  cb.clear();
  for (const auto& l : a.label) ca.push_back(initial[l]);
  for (const auto& l : b.label) cb.push_back(initial[l]);
  std::size_t classes = initial.size();
  while (true) {
    using Sig = std::tuple<int, std::vector<std::pair<char, int>>, std::vector<std::pair<char, int>>>;
    auto sig = [](const LGraph& g, const std::vector<int>& c, int v) {
      std::vector<std::pair<char, int>> o, i;
      for (auto [w, t] : g.out[v]) o.push_back({t, c[w]});
      for (auto [w, t] : g.in[v]) i.push_back({t, c[w]});
      std::sort(o.begin(), o.end());
      std::sort(i.begin(), i.end());
      return Sig{c[v], o, i};
    };
    std::map<Sig, int> ids;
    std::vector<Sig> sa, sb;
    for (int v = 0; v < static_cast<int>(a.label.size()); ++v) sa.push_back(sig(a, ca, v));
    for (int v = 0; v < static_cast<int>(b.label.size()); ++v) sb.push_back(sig(b, cb, v));
    for (const auto& s : sa) ids.emplace(s, 0);
    for (const auto& s : sb) ids.emplace(s, 0);
    int n = 0;
    for (auto& [_, v] : ids) v = n++;
    for (std::size_t v = 0; v < sa.size(); ++v) ca[v] = ids[sa[v]];
    for (std::size_t v = 0; v < sb.size(); ++v) cb[v] = ids[sb[v]];
    if (ids.size() == classes) return;
    classes = ids.size();
  }
}

bool extend(const LGraph& a, const LGraph& b, const std::vector<int>& ca,
            const std::vector<int>& cb, std::vector<int>& map, std::vector<bool>& used,
            std::size_t v) {
  if (v == a.label.size()) return true;
  for (std::size_t w = 0; w < b.label.size(); ++w) {
    if (used[w] || ca[v] != cb[w]) continue;
    bool ok = true;
    for (auto [x, t] : a.out[v]) {
      if (map[static_cast<std::size_t>(x)] >= 0 &&
          b.edges.count({static_cast<int>(w), map[static_cast<std::size_t>(x)], t}) == 0) {
        ok = false;
        break;
      }
    }
    for (auto [x, t] : a.in[v]) {
      if (!ok) break;
      if (map[static_cast<std::size_t>(x)] >= 0 &&
          b.edges.count({map[static_cast<std::size_t>(x)], static_cast<int>(w), t}) == 0) {
        ok = false;
      }
    }
    if (!ok) continue;
    map[v] = static_cast<int>(w);
    used[w] = true;
    if (extend(a, b, ca, cb, map, used, v + 1)) return true;
    map[v] = -1;
    used[w] = false;
  }
  return false;
}

}  // namespace

bool labeled_isomorphic(const StaticModel& a, const StaticModel& b) {
  LGraph ga = to_lgraph(a);
  LGraph gb = to_lgraph(b);
  if (ga.label.size() != gb.label.size() || ga.edges.size() != gb.edges.size()) return false;
  std::vector<int> ca, cb;
  refine(ga, gb, ca, cb);
  std::vector<int> ha = ca, hb = cb;
  std::sort(ha.begin(), ha.end());
  std::sort(hb.begin(), hb.end());
  if (ha != hb) return false;
  std::vector<int> map(ga.label.size(), -1);
  std::vector<bool> used(gb.label.size(), false);
  return extend(ga, gb, ca, cb, map, used, 0);
}

}  // namespace tmw::bpmn
