#include "tmw/model.hpp"

#include <algorithm>
#include <array>

namespace tmw {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownParent: return "UnknownParent";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::InvalidName: return "InvalidName";
    case ErrorCode::UnknownThimac: return "UnknownThimac";
    case ErrorCode::UnknownStage: return "UnknownStage";
    case ErrorCode::DuplicateStageKind: return "DuplicateStageKind";
    case ErrorCode::InvalidPort: return "InvalidPort";
    case ErrorCode::IllegalFlow: return "IllegalFlow";
    case ErrorCode::DuplicateFlow: return "DuplicateFlow";
    case ErrorCode::SameThimacTrigger: return "SameThimacTrigger";
    case ErrorCode::DuplicateTrigger: return "DuplicateTrigger";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::DuplicateEvent: return "DuplicateEvent";
    case ErrorCode::UnknownEvent: return "UnknownEvent";
    case ErrorCode::UnknownEndpoint: return "UnknownEndpoint";
    case ErrorCode::UnreachableEvent: return "UnreachableEvent";
    case ErrorCode::MixedChoice: return "MixedChoice";
    case ErrorCode::RegionForeign: return "RegionForeign";
    case ErrorCode::InvalidBehavior: return "InvalidBehavior";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::NotACreateStage: return "NotACreateStage";
    case ErrorCode::NegativeAmount: return "NegativeAmount";
    case ErrorCode::InvalidAmount: return "InvalidAmount";
    case ErrorCode::DuplicateConfig: return "DuplicateConfig";
    case ErrorCode::UnknownConfig: return "UnknownConfig";
    case ErrorCode::UnknownCase: return "UnknownCase";
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::SchemaVersion: return "SchemaVersion";
    case ErrorCode::MalformedXml: return "MalformedXml";
    case ErrorCode::MissingStartEvent: return "MissingStartEvent";
    case ErrorCode::InvalidBpmn: return "InvalidBpmn";
    case ErrorCode::DegenerateGateway: return "DegenerateGateway";
    case ErrorCode::EmptyLattice: return "EmptyLattice";
    case ErrorCode::AlreadySettled: return "AlreadySettled";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

std::string_view to_string(StageKind kind) noexcept {
  switch (kind) {
    case StageKind::Create: return "create";
    case StageKind::Process: return "process";
    case StageKind::Release: return "release";
    case StageKind::Transfer: return "transfer";
    case StageKind::Receive: return "receive";
  }
  return "?";
}

std::string_view to_string(Port port) noexcept {
  switch (port) {
    case Port::None: return "none";
    case Port::In: return "in";
    case Port::Out: return "out";
  }
  return "?";
}

std::string_view to_string(Post post) noexcept {
  return post == Post::Interior ? "interior" : "boundary";
}

std::string_view to_string(Locality locality) noexcept {
  return locality == Locality::Intra ? "intra-thimac" : "cross-thimac";
}

std::optional<StageKind> stage_kind_from_string(std::string_view text) noexcept {
  for (StageKind k : kAllStageKinds) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::optional<Port> port_from_string(std::string_view text) noexcept {
  if (text == "in") return Port::In;
  if (text == "out") return Port::Out;
  if (text == "none") return Port::None;
  return std::nullopt;
}

namespace {

constexpr std::array<LegalityRow, 9> kLegality{{
    {StageKind::Create, StageKind::Process, Locality::Intra, Port::None, Port::None,
     "Create->Process"},
    {StageKind::Create, StageKind::Release, Locality::Intra, Port::None, Port::None,
     "Create->Release"},
    {StageKind::Receive, StageKind::Process, Locality::Intra, Port::None, Port::None,
     "Receive->Process"},
    {StageKind::Receive, StageKind::Release, Locality::Intra, Port::None, Port::None,
     "Receive->Release"},
    {StageKind::Process, StageKind::Release, Locality::Intra, Port::None, Port::None,
     "Process->Release"},
    {StageKind::Process, StageKind::Create, Locality::Intra, Port::None, Port::None,
     "Process->Create"},
    {StageKind::Transfer, StageKind::Receive, Locality::Intra, Port::In, Port::None,
     "Transfer(in)->Receive"},
    {StageKind::Release, StageKind::Transfer, Locality::Intra, Port::None, Port::Out,
     "Release->Transfer(out)"},
    {StageKind::Transfer, StageKind::Transfer, Locality::Cross, Port::Out, Port::In,
     "Transfer(out)->Transfer(in)"},
}};

constexpr std::array<std::string_view, 11> kReserved{
    "thimac", "flow",     "trigger", "model", "create", "process",
    "release", "transfer", "receive", "in",    "out"};

std::string describe_port(const Stage& s) {
  std::string out(to_string(s.kind));
  if (s.kind == StageKind::Transfer) {
    out += "(";
    out += to_string(s.port);
    out += ")";
  }
  return out;
}

}  // namespace

std::span<const LegalityRow> legality_table() noexcept { return kLegality; }

const LegalityRow* find_legality_row(StageKind from, StageKind to,
                                     Locality locality) noexcept {
  for (const auto& row : kLegality) {
    if (row.from == from && row.to == to && row.locality == locality) return &row;
  }
  return nullptr;
}

bool is_identifier(std::string_view text) noexcept {
  if (text.empty()) return false;
  auto alpha = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(text.front())) return false;
  return std::all_of(text.begin(), text.end(),
                     [&](char c) { return alpha(c) || digit(c); });
}

bool is_reserved_word(std::string_view text) noexcept {
  return std::find(kReserved.begin(), kReserved.end(), text) != kReserved.end();
}

StageId make_stage_id(const ThimacId& thimac, StageKind kind, Port port) {
  StageId id = thimac + "." + std::string(to_string(kind));
  if (kind == StageKind::Transfer) id += "." + std::string(to_string(port));
  return id;
}

std::optional<std::string> check_flow(const Stage& from, const Stage& to) {
  const Locality loc = from.owner == to.owner ? Locality::Intra : Locality::Cross;
  const LegalityRow* row = find_legality_row(from.kind, to.kind, loc);
  if (row == nullptr) {
    return "no legality row admits " + std::string(to_string(from.kind)) + "->" +
           std::string(to_string(to.kind)) + " (" + std::string(to_string(loc)) + ")";
  }
  if ((row->from_port != Port::None && from.port != row->from_port) ||
      (row->to_port != Port::None && to.port != row->to_port)) {
    return "row " + std::string(row->label) + " does not admit " +
           describe_port(from) + "->" + describe_port(to);
  }
  return std::nullopt;
}

StaticModel StaticModel::assemble(std::string name, std::vector<Thimac> thimacs,
                                  std::vector<Stage> stages,
                                  std::vector<FlowEdge> flows,
                                  std::vector<TriggerEdge> triggers) {
  StaticModel m(std::move(name));
  for (auto& t : thimacs) m.thimacs_.insert_or_assign(t.id, std::move(t));
  for (auto& s : stages) m.stages_.insert_or_assign(s.id, std::move(s));
  m.flows_.insert(flows.begin(), flows.end());
  m.triggers_.insert(triggers.begin(), triggers.end());
  return m;
}

ThimacId StaticModel::add_thimac(std::string_view name,
                                 const std::optional<ThimacId>& parent) {
  if (parent && thimacs_.count(*parent) == 0) {
    throw Error(ErrorCode::UnknownParent, "no thimac '" + *parent + "'");
  }
  if (!is_identifier(name) || is_reserved_word(name)) {
    throw Error(ErrorCode::InvalidName,
                "'" + std::string(name) + "' is not a usable thimac name");
  }
  ThimacId id = parent ? *parent + "." + std::string(name) : std::string(name);
  if (thimacs_.count(id) != 0) {
    throw Error(ErrorCode::DuplicateName, "thimac '" + id + "' already exists");
  }
  thimacs_.emplace(id, Thimac{id, std::string(name), parent});
  return id;
}

StageId StaticModel::add_stage(const ThimacId& thimac, StageKind kind, Port port) {
  if (thimacs_.count(thimac) == 0) {
    throw Error(ErrorCode::UnknownThimac, "no thimac '" + thimac + "'");
  }
  if ((kind == StageKind::Transfer) != (port != Port::None)) {
    throw Error(ErrorCode::InvalidPort,
                kind == StageKind::Transfer
                    ? "a transfer stage needs an in or out port"
                    : "only transfer stages have ports");
  }
  StageId id = make_stage_id(thimac, kind, port);
  if (stages_.count(id) != 0) {
    throw Error(ErrorCode::DuplicateStageKind,
                "thimac '" + thimac + "' already has a " +
                    std::string(to_string(kind)) +
                    (kind == StageKind::Transfer ? " " + std::string(to_string(port)) : "") +
                    " stage");
  }
  stages_.emplace(id, Stage{id, thimac, kind, port});
  return id;
}

std::string StaticModel::add_flow(const StageId& from, const StageId& to) {
  const Stage& a = stage(from);
  const Stage& b = stage(to);
  if (auto violation = check_flow(a, b)) {
    throw Error(ErrorCode::IllegalFlow, from + " -> " + to + ": " + *violation);
  }
  FlowEdge edge{from, to};
  if (!flows_.insert(edge).second) {
    throw Error(ErrorCode::DuplicateFlow, edge.id());
  }
  return edge.id();
}

std::string StaticModel::add_trigger(const StageId& from, const StageId& to) {
  const Stage& a = stage(from);
  const Stage& b = stage(to);
  if (a.owner == b.owner) {
    throw Error(ErrorCode::SameThimacTrigger,
                from + " => " + to + ": triggers must cross thimacs");
  }
  TriggerEdge edge{from, to};
  if (!triggers_.insert(edge).second) {
    throw Error(ErrorCode::DuplicateTrigger, edge.id());
  }
  return edge.id();
}

Report StaticModel::validate() const {
  Report report;
  auto add = [&](std::string code, std::string subject, std::string message) {
    report.findings.push_back(
        {Severity::Error, std::move(code), std::move(subject), std::move(message)});
  };

  for (const auto& [id, t] : thimacs_) {
    if (!is_identifier(t.name) || is_reserved_word(t.name)) {
      add("InvalidName", id, "thimac name '" + t.name + "' is not an identifier");
    }
    if (t.parent && thimacs_.count(*t.parent) == 0) {
      add("UnknownParent", id, "parent '" + *t.parent + "' does not exist");
      continue;
    }
    // Walk up the parent chain; a chain longer than the model is a cycle.
    std::size_t hops = 0;
    std::optional<ThimacId> cur = t.parent;
    while (cur && hops <= thimacs_.size()) {
      auto it = thimacs_.find(*cur);
      if (it == thimacs_.end()) break;
      cur = it->second.parent;
      ++hops;
    }
    if (hops > thimacs_.size()) {
      add("NestingCycle", id, "parent links of '" + id + "' form a cycle");
    }
  }

  std::map<std::pair<ThimacId, std::pair<StageKind, Port>>, StageId> seen;
  for (const auto& [id, s] : stages_) {
    if (thimacs_.count(s.owner) == 0) {
      add("UnknownOwner", id, "owner thimac '" + s.owner + "' does not exist");
    }
    if ((s.kind == StageKind::Transfer) != (s.port != Port::None)) {
      add("InvalidPort", id, "port does not match stage kind");
    }
    auto key = std::make_pair(s.owner, std::make_pair(s.kind, s.port));
    if (auto [it, fresh] = seen.emplace(key, id); !fresh) {
      add("DuplicateStageKind", id, "duplicates stage '" + it->second + "'");
    }
  }

  for (const auto& f : flows_) {
    const Stage* a = find_stage(f.from);
    const Stage* b = find_stage(f.to);
    if (a == nullptr || b == nullptr) {
      add("UnresolvedEndpoint", f.id(),
          "endpoint '" + (a == nullptr ? f.from : f.to) + "' does not exist");
      continue;
    }
    if (auto violation = check_flow(*a, *b)) add("IllegalFlow", f.id(), *violation);
  }

  for (const auto& t : triggers_) {
    const Stage* a = find_stage(t.from);
    const Stage* b = find_stage(t.to);
    if (a == nullptr || b == nullptr) {
      add("UnresolvedEndpoint", t.id(),
          "endpoint '" + (a == nullptr ? t.from : t.to) + "' does not exist");
      continue;
    }
    if (a->owner == b->owner) {
      add("SameThimacTrigger", t.id(), "triggers must cross thimacs");
    }
  }
  return report;
}

Subdiagram StaticModel::extract_region(const std::set<StageId>& stage_ids) const {
  Subdiagram sub;
  for (const auto& id : stage_ids) {
    if (stages_.count(id) == 0) {
      throw Error(ErrorCode::UnknownStage, "no stage '" + id + "'");
    }
  }
  sub.stages = stage_ids;
  for (const auto& f : flows_) {
    if (sub.contains(f.from) && sub.contains(f.to)) sub.flows.insert(f);
  }
  for (const auto& t : triggers_) {
    if (sub.contains(t.from) && sub.contains(t.to)) sub.triggers.insert(t);
  }
  sub.model_fingerprint = fingerprint();
  return sub;
}

std::uint64_t StaticModel::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::string_view text) {
    for (unsigned char c : text) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;  // field separator
    h *= 1099511628211ULL;
  };
  mix(name_);
  for (const auto& [id, t] : thimacs_) {
    mix("T");
    mix(id);
    mix(t.name);
    mix(t.parent.value_or(""));
  }
  for (const auto& [id, s] : stages_) {
    mix("S");
    mix(id);
    mix(s.owner);
    mix(to_string(s.kind));
    mix(to_string(s.port));
  }
  for (const auto& f : flows_) {
    mix("F");
    mix(f.from);
    mix(f.to);
  }
  for (const auto& t : triggers_) {
    mix("G");
    mix(t.from);
    mix(t.to);
  }
  return h;
}

const Thimac* StaticModel::find_thimac(const ThimacId& id) const {
  auto it = thimacs_.find(id);
  return it == thimacs_.end() ? nullptr : &it->second;
}

const Stage* StaticModel::find_stage(const StageId& id) const {
  auto it = stages_.find(id);
  return it == stages_.end() ? nullptr : &it->second;
}

const Stage& StaticModel::stage(const StageId& id) const {
  const Stage* s = find_stage(id);
  if (s == nullptr) throw Error(ErrorCode::UnknownStage, "no stage '" + id + "'");
  return *s;
}

const Stage* StaticModel::stage_of(const ThimacId& thimac, StageKind kind,
                                   Port port) const {
  return find_stage(make_stage_id(thimac, kind, port));
}

std::vector<const Stage*> StaticModel::stages_of(const ThimacId& thimac) const {
  std::vector<const Stage*> out;
  for (const auto& [id, s] : stages_) {
    if (s.owner == thimac) out.push_back(&s);
  }
  return out;
}

std::vector<const Thimac*> StaticModel::children_of(
    const std::optional<ThimacId>& parent) const {
  std::vector<const Thimac*> out;
  for (const auto& [id, t] : thimacs_) {
    if (t.parent == parent) out.push_back(&t);
  }
  return out;
}

std::vector<StageId> StaticModel::flow_targets(const StageId& from) const {
  std::vector<StageId> out;
  for (auto it = flows_.lower_bound(FlowEdge{from, {}});
       it != flows_.end() && it->from == from; ++it) {
    out.push_back(it->to);
  }
  return out;
}

std::vector<StageId> StaticModel::trigger_targets(const StageId& from) const {
  std::vector<StageId> out;
  for (auto it = triggers_.lower_bound(TriggerEdge{from, {}});
       it != triggers_.end() && it->from == from; ++it) {
    out.push_back(it->to);
  }
  return out;
}

}  // namespace tmw
