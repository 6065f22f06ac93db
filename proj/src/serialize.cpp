#include "tmw/serialize.hpp"

namespace tmw {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json parse_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
}

void check_version(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::MalformedJson, "top level must be an object");
  auto it = j.find("version");
  if (it == j.end() || !it->is_number_integer()) {
    throw Error(ErrorCode::SchemaVersion, "missing integer \"version\"");
  }
  if (it->get<int>() != kSchemaVersion) {
    throw Error(ErrorCode::SchemaVersion,
                "expected version " + std::to_string(kSchemaVersion) + ", found " +
                    std::to_string(it->get<int>()));
  }
}

const json& member(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCode::MalformedJson, std::string("missing key \"") + key + "\"");
  }
  return *it;
}

std::string string_member(const json& obj, const char* key) {
  const json& v = member(obj, key);
  if (!v.is_string()) {
    throw Error(ErrorCode::MalformedJson, std::string("\"") + key + "\" must be a string");
  }
  return v.get<std::string>();
}

const json& array_member(const json& obj, const char* key) {
  const json& v = member(obj, key);
  if (!v.is_array()) {
    throw Error(ErrorCode::MalformedJson, std::string("\"") + key + "\" must be an array");
  }
  return v;
}

}  // namespace

ordered_json model_to_json(const StaticModel& model) {
  ordered_json j;
  j["version"] = kSchemaVersion;
  if (!model.name().empty()) j["name"] = model.name();
  j["thimacs"] = ordered_json::array();
  for (const auto& [id, t] : model.thimacs()) {
    ordered_json tj;
    tj["id"] = id;
    tj["name"] = t.name;
    if (t.parent) tj["parent"] = *t.parent;
    tj["stages"] = ordered_json::array();
    for (const Stage* s : model.stages_of(id)) {
      ordered_json sj;
      sj["id"] = s->id;
      sj["kind"] = std::string(to_string(s->kind));
      if (s->port != Port::None) sj["port"] = std::string(to_string(s->port));
      tj["stages"].push_back(std::move(sj));
    }
    j["thimacs"].push_back(std::move(tj));
  }
  j["flows"] = ordered_json::array();
  for (const auto& f : model.flows()) {
    j["flows"].push_back(ordered_json{{"from", f.from}, {"to", f.to}});
  }
  j["triggers"] = ordered_json::array();
  for (const auto& t : model.triggers()) {
    j["triggers"].push_back(ordered_json{{"from", t.from}, {"to", t.to}});
  }
  return j;
}

std::string serialize_json(const StaticModel& model) { return model_to_json(model).dump(); }

StaticModel model_from_json(const json& j) {
  check_version(j);
  std::string name;
  if (auto it = j.find("name"); it != j.end()) {
    if (!it->is_string()) throw Error(ErrorCode::MalformedJson, "\"name\" must be a string");
    name = it->get<std::string>();
  }
  std::vector<Thimac> thimacs;
  std::vector<Stage> stages;
  for (const auto& tj : array_member(j, "thimacs")) {
    Thimac t;
    t.id = string_member(tj, "id");
    t.name = string_member(tj, "name");
    if (tj.contains("parent")) t.parent = string_member(tj, "parent");
    for (const auto& sj : array_member(tj, "stages")) {
      Stage s;
      s.id = string_member(sj, "id");
      s.owner = t.id;
      auto kind = stage_kind_from_string(string_member(sj, "kind"));
      if (!kind) throw Error(ErrorCode::MalformedJson, "unknown stage kind in " + s.id);
      s.kind = *kind;
      if (sj.contains("port")) {
        auto port = port_from_string(string_member(sj, "port"));
        if (!port) throw Error(ErrorCode::MalformedJson, "unknown port in " + s.id);
        s.port = *port;
      }
      stages.push_back(std::move(s));
    }
    thimacs.push_back(std::move(t));
  }
  std::vector<FlowEdge> flows;
  for (const auto& fj : array_member(j, "flows")) {
    flows.push_back({string_member(fj, "from"), string_member(fj, "to")});
  }
  std::vector<TriggerEdge> triggers;
  for (const auto& tj : array_member(j, "triggers")) {
    triggers.push_back({string_member(tj, "from"), string_member(tj, "to")});
  }
  return StaticModel::assemble(std::move(name), std::move(thimacs), std::move(stages),
                               std::move(flows), std::move(triggers));
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
}

StaticModel deserialize_json(std::string_view text) {
  return guarded([&] { return model_from_json(parse_text(text)); });
}

ordered_json behavior_to_json(const BehaviorGraph& graph) {
  ordered_json j;
  j["version"] = kSchemaVersion;
  j["events"] = ordered_json::array();
  for (const auto& [id, e] : graph.events()) {
    ordered_json ej;
    ej["id"] = id;
    if (!e.description.empty()) ej["description"] = e.description;
    ej["stages"] = e.region.stages;
    j["events"].push_back(std::move(ej));
  }
  j["edges"] = ordered_json::array();
  for (const auto& e : graph.edges()) {
    ordered_json ej;
    ej["from"] = e.from;
    ej["to"] = e.to;
    ej["kind"] = std::string(to_string(e.kind));
    if (!e.guard.empty()) ej["guard"] = e.guard;
    j["edges"].push_back(std::move(ej));
  }
  j["initial"] = graph.initial();
  return j;
}

std::string serialize_behavior(const BehaviorGraph& graph) {
  return behavior_to_json(graph).dump();
}

BehaviorGraph behavior_from_json(const json& j, const StaticModel& model) {
  check_version(j);
  std::vector<Event> events;
  for (const auto& ej : array_member(j, "events")) {
    std::set<StageId> stages;
    for (const auto& s : array_member(ej, "stages")) {
      if (!s.is_string()) throw Error(ErrorCode::MalformedJson, "stage ids must be strings");
      stages.insert(s.get<std::string>());
    }
    std::string id = string_member(ej, "id");
    for (const auto& s : stages) {
      if (model.find_stage(s) == nullptr) {
        throw Error(ErrorCode::RegionForeign,
                    "event '" + id + "' names stage '" + s + "' absent from the model");
      }
    }
    std::string desc = ej.contains("description") ? string_member(ej, "description") : "";
    events.push_back(define_event(model, std::move(id), stages, std::move(desc)));
  }
  std::vector<OrderingEdge> edges;
  for (const auto& ej : array_member(j, "edges")) {
    OrderingEdge e;
    e.from = string_member(ej, "from");
    e.to = string_member(ej, "to");
    auto kind = edge_kind_from_string(string_member(ej, "kind"));
    if (!kind) throw Error(ErrorCode::MalformedJson, "unknown edge kind");
    e.kind = *kind;
    if (ej.contains("guard")) e.guard = string_member(ej, "guard");
    edges.push_back(std::move(e));
  }
  std::set<std::string> initial;
  for (const auto& i : array_member(j, "initial")) {
    if (!i.is_string()) throw Error(ErrorCode::MalformedJson, "initial ids must be strings");
    initial.insert(i.get<std::string>());
  }
  return build_behavior(std::move(events), std::move(edges), std::move(initial));
}

BehaviorGraph deserialize_behavior(std::string_view text, const StaticModel& model) {
  return guarded([&] { return behavior_from_json(parse_text(text), model); });
}

Bundle bundle_from_json(const json& j);

std::string serialize_bundle(const StaticModel& model, const BehaviorGraph* behavior) {
  ordered_json j;
  j["version"] = kSchemaVersion;
  j["model"] = model_to_json(model);
  if (behavior != nullptr) j["behavior"] = behavior_to_json(*behavior);
  return j.dump();
}

Bundle deserialize_bundle(std::string_view text) {
  return guarded([&] { return bundle_from_json(parse_text(text)); });
}

Bundle bundle_from_json(const json& j) {
  check_version(j);
  if (!j.contains("model")) return Bundle{model_from_json(j), std::nullopt};
  Bundle b{model_from_json(member(j, "model")), std::nullopt};
  if (j.contains("behavior")) b.behavior = behavior_from_json(j.at("behavior"), b.model);
  return b;
}

}  // namespace tmw
