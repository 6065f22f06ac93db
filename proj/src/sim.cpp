#include "tmw/sim.hpp"

#include <algorithm>

namespace tmw::sim {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Action a) noexcept {
  switch (a) {
    case Action::Create: return "create";
    case Action::Process: return "process";
    case Action::Release: return "release";
    case Action::Transfer: return "transfer";
    case Action::Arrive: return "arrive";
    case Action::Accept: return "accept";
    case Action::Trigger: return "trigger";
    case Action::Bounce: return "bounce";
    case Action::Settle: return "settle";
  }
  return "?";
}

std::string_view to_string(Mode m) noexcept {
  return m == Mode::State ? "state" : "progression";
}

std::string to_jsonl(const TraceRecord& r) {
  ordered_json j;
  j["step"] = r.step;
  j["thing"] = r.thing;
  j["thimac"] = r.thimac;
  j["stage"] = r.stage;
  j["action"] = std::string(to_string(r.action));
  j["mode"] = std::string(to_string(r.mode));
  j["case"] = r.case_id;
  j["config"] = r.config;
  return j.dump();
}

std::string to_jsonl(std::span<const TraceRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += to_jsonl(r);
    out += '\n';
  }
  return out;
}

std::vector<Injection> parse_injection_script(std::string_view text) {
  try {
    json j = json::parse(text.begin(), text.end());
    if (!j.is_array()) throw Error(ErrorCode::MalformedJson, "injection script must be a list");
    std::vector<Injection> out;
    for (const auto& e : j) {
      Injection inj;
      inj.step = e.value("step", std::uint64_t{0});
      inj.stage = e.at("stage").get<std::string>();
      if (e.contains("payload")) inj.payload = e.at("payload");
      out.push_back(std::move(inj));
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool truthy(const json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number()) return v.get<double>() != 0.0;
  if (v.is_string()) return !v.get<std::string>().empty();
  if (v.is_array() || v.is_object()) return !v.empty();
  return false;
}

std::string checked_key(std::string_view key, std::string_view guard) {
  key = trim(key);
  if (!is_identifier(key)) {
    throw Error(ErrorCode::InvalidBehavior, "bad guard '" + std::string(guard) + "'");
  }
  return std::string(key);
}

std::string edge_key(const OrderingEdge& e) {
  return e.from + '\x1f' + e.to + '\x1f' + std::string(to_string(e.kind));
}

}  // namespace

bool guard_holds(std::string_view guard, const Payload& payload) {
  const std::string_view g = trim(guard);
  if (g.empty()) return true;
  auto lookup = [&](const std::string& key) -> const json* {
    if (!payload.is_object()) return nullptr;
    auto it = payload.find(key);
    return it == payload.end() ? nullptr : &*it;
  };
  for (std::string_view op : {"==", "!="}) {
    auto pos = g.find(op);
    if (pos == std::string_view::npos) continue;
    std::string key = checked_key(g.substr(0, pos), guard);
    std::string_view lit = trim(g.substr(pos + 2));
    json literal;
    try {
      literal = json::parse(lit.begin(), lit.end());
    } catch (const json::exception&) {
      throw Error(ErrorCode::InvalidBehavior, "bad guard literal in '" + std::string(guard) + "'");
    }
    const json* v = lookup(key);
    bool eq = v != nullptr && *v == literal;
    return op == "==" ? eq : !eq;
  }
  if (g.front() == '!') {
    const json* v = lookup(checked_key(g.substr(1), guard));
    return v == nullptr || !truthy(*v);
  }
  const json* v = lookup(checked_key(g, guard));
  return v != nullptr && truthy(*v);
}

// ---------------------------------------------------------------------------

Simulation::Simulation(StaticModel model, std::uint64_t seed)
    : model_(std::move(model)), seed_(seed), rng_(seed) {
  compute_moves();
}

Simulation::Simulation(StaticModel model, BehaviorGraph behavior, std::uint64_t seed,
                       std::string config_id)
    : Simulation(std::move(model), seed) {
  add_configuration(config_id, std::move(behavior));
  active_ = config_id;
}

void Simulation::walk(const StageId& at, std::vector<StageId>& path,
                      std::vector<Move>& out) const {
  for (const StageId& t : model_.flow_targets(at)) {
    if (std::find(path.begin(), path.end(), t) != path.end()) continue;
    path.push_back(t);
    if (model_.stage(t).post() == Post::Interior) {
      out.push_back(Move{path, false});
    } else if (model_.flow_targets(t).empty()) {
      out.push_back(Move{path, true});
    } else {
      walk(t, path, out);
    }
    path.pop_back();
  }
}

void Simulation::compute_moves() {
  moves_.clear();
  for (const auto& [id, s] : model_.stages()) {
    if (s.post() != Post::Interior) continue;
    std::vector<StageId> path;
    std::vector<Move> out;
    walk(id, path, out);
    moves_.emplace(id, std::move(out));
  }
}

const std::vector<Simulation::Move>& Simulation::moves_from(const StageId& stage) const {
  static const std::vector<Move> none;
  auto it = moves_.find(stage);
  return it == moves_.end() ? none : it->second;
}

void Simulation::add_configuration(const std::string& id, BehaviorGraph behavior) {
  if (configs_.count(id) != 0) {
    throw Error(ErrorCode::DuplicateConfig, "configuration '" + id + "' already registered");
  }
  Report r = validate_behavior(model_, behavior);
  for (const auto& f : r.findings) {
    if (f.severity != Severity::Error) continue;
    throw Error(f.code == "RegionForeign" ? ErrorCode::RegionForeign : ErrorCode::InvalidBehavior,
                f.message);
  }
  ConfigRuntime rt;
  for (const auto& e : behavior.edges()) {
    if (!e.guard.empty()) guard_holds(e.guard, Payload::object());
    rt.in[e.to].push_back(e);
    rt.out[e.from].push_back(e);
  }
  for (const auto& [eid, ev] : behavior.events()) {
    for (const auto& s : ev.region.stages) rt.event_of.emplace(s, eid);
  }
  for (const auto& [sid, ev] : rt.event_of) {
    const auto& moves = moves_from(sid);
    if (moves.empty()) continue;
    bool all_leave = std::all_of(moves.begin(), moves.end(), [&](const Move& m) {
      if (m.departs) return true;
      return std::any_of(m.path.begin(), m.path.end(), [&](const StageId& p) {
        auto it = rt.event_of.find(p);
        return it == rt.event_of.end() || it->second != ev;
      });
    });
    if (all_leave) rt.exit_ready.insert(sid);
  }
  rt.graph = std::move(behavior);
  configs_.emplace(id, std::move(rt));
}

void Simulation::set_active_configuration(const std::string& id) {
  if (configs_.count(id) == 0) {
    throw Error(ErrorCode::UnknownConfig, "no configuration '" + id + "'");
  }
  active_ = id;
}

const BehaviorGraph& Simulation::configuration(const std::string& id) const {
  auto it = configs_.find(id);
  if (it == configs_.end()) throw Error(ErrorCode::UnknownConfig, "no configuration '" + id + "'");
  return it->second.graph;
}

void Simulation::on_process(const StageId& stage, ProcessHook hook) {
  if (model_.stage(stage).kind != StageKind::Process) {
    throw Error(ErrorCode::UnknownStage, "'" + stage + "' is not a Process stage");
  }
  hooks_[stage] = std::move(hook);
}

const Simulation::ConfigRuntime* Simulation::runtime_for(const CaseState& cs) const {
  auto it = configs_.find(cs.config);
  return it == configs_.end() ? nullptr : &it->second;
}

std::optional<std::string> Simulation::event_of(const ConfigRuntime& cfg,
                                                const StageId& stage) const {
  auto it = cfg.event_of.find(stage);
  if (it == cfg.event_of.end()) return std::nullopt;
  return it->second;
}

bool Simulation::enabled(const CaseState& cs, const ConfigRuntime& cfg,
                         const std::string& event) const {
  auto run = cs.events.find(event);
  if (run != cs.events.end() && run->second.start_tokens > 0) return true;
  auto ins = cfg.in.find(event);
  if (ins == cfg.in.end() || ins->second.empty()) return false;
  bool joins_ok = true;
  bool any_other = false;
  bool has_other = false;
  for (const auto& e : ins->second) {
    auto t = cs.tokens.find(edge_key(e));
    bool marked = t != cs.tokens.end() && t->second > 0;
    if (e.kind == EdgeKind::ParallelJoin) {
      joins_ok = joins_ok && marked;
    } else {
      has_other = true;
      any_other = any_other || marked;
    }
  }
  return joins_ok && (!has_other || any_other);
}

bool Simulation::partially_enabled(const CaseState& cs, const ConfigRuntime& cfg,
                                   const std::string& event) const {
  auto ins = cfg.in.find(event);
  if (ins == cfg.in.end()) return false;
  return std::any_of(ins->second.begin(), ins->second.end(), [&](const OrderingEdge& e) {
    if (e.kind != EdgeKind::ParallelJoin) return false;
    auto t = cs.tokens.find(edge_key(e));
    return t != cs.tokens.end() && t->second > 0;
  });
}

void Simulation::activate(CaseState& cs, const ConfigRuntime& cfg,
                          const std::string& event) const {
  EventRun& run = cs.events[event];
  if (run.start_tokens > 0) {
    --run.start_tokens;
  } else if (auto ins = cfg.in.find(event); ins != cfg.in.end()) {
    bool took_other = false;
    for (const auto& e : ins->second) {
      auto t = cs.tokens.find(edge_key(e));
      if (t == cs.tokens.end() || t->second == 0) continue;
      if (e.kind == EdgeKind::ParallelJoin) {
        --t->second;
      } else if (!took_other) {
        --t->second;
        took_other = true;
      }
    }
  }
  run.status = EventStatus::Active;
  run.fired.clear();
}

void Simulation::complete(CaseState& cs, const ConfigRuntime& cfg, const std::string& event,
                          const std::optional<std::string>& toward,
                          const Payload& payload) const {
  cs.events[event].status = EventStatus::Done;
  auto outs = cfg.out.find(event);
  if (outs == cfg.out.end()) return;
  const OrderingEdge* choice = nullptr;
  for (const auto& e : outs->second) {
    if (e.kind != EdgeKind::Choice) {
      ++cs.tokens[edge_key(e)];
    } else if (toward && e.to == *toward) {
      choice = &e;
    }
  }
  if (choice == nullptr && (!toward || cfg.graph.find_event(*toward) == nullptr)) {
    // Leaving toward no alternative: take the first branch whose guard holds.
    for (const auto& e : outs->second) {
      if (e.kind == EdgeKind::Choice && guard_holds(e.guard, payload)) {
        choice = &e;
        break;
      }
    }
  }
  if (choice != nullptr && guard_holds(choice->guard, payload)) ++cs.tokens[edge_key(*choice)];
}

void Simulation::leave(CaseState& cs, const ConfigRuntime& cfg, const Thing& thing,
                       const std::string& event,
                       const std::optional<std::string>& toward) const {
  cs.member_of.erase(thing.id);
  if (cs.events[event].status != EventStatus::Active) return;
  for (const auto& [tid, ev] : cs.member_of) {
    if (ev != event) continue;
    const StageId& at = things_.at(tid).location;
    if (cfg.exit_ready.count(at) == 0 && !is_sink(at)) return;
  }
  complete(cs, cfg, event, toward, thing.payload);
}

std::optional<Simulation::CaseState> Simulation::try_move(const Thing& thing,
                                                          const Move& move) const {
  CaseState cs = cases_.at(thing.case_id);
  const ConfigRuntime* cfg = runtime_for(cs);
  if (cfg == nullptr) return cs;
  std::optional<std::string> cur;
  if (auto it = cs.member_of.find(thing.id); it != cs.member_of.end()) cur = it->second;
  bool first = true;
  for (const StageId& s : move.path) {
    std::optional<std::string> ev = event_of(*cfg, s);
    if (ev == cur) {
      // A pending participant may only move on once its event is running.
      if (first && cur && cs.events[*cur].status == EventStatus::Idle) {
        if (!enabled(cs, *cfg, *cur)) return std::nullopt;
        activate(cs, *cfg, *cur);
      }
    } else {
      if (cur) leave(cs, *cfg, thing, *cur, ev);
      if (ev) {
        EventStatus st = cs.events[*ev].status;
        if (st == EventStatus::Active) {
        } else if (enabled(cs, *cfg, *ev)) {
          activate(cs, *cfg, *ev);
        } else if (!partially_enabled(cs, *cfg, *ev)) {
          return std::nullopt;
        }
        cs.member_of[thing.id] = *ev;
      }
      cur = ev;
    }
    first = false;
  }
  if (move.departs && cur) leave(cs, *cfg, thing, *cur, std::nullopt);
  return cs;
}

void Simulation::settle_completions(CaseState& cs) const {
  const ConfigRuntime* cfg = runtime_for(cs);
  if (cfg == nullptr) return;
  for (auto& [eid, run] : cs.events) {
    if (run.status != EventStatus::Active) continue;
    const Thing* witness = nullptr;
    bool all_absorbed = true;
    for (const auto& [tid, ev] : cs.member_of) {
      if (ev != eid) continue;
      const Thing& t = things_.at(tid);
      if (witness == nullptr) witness = &t;
      if (!is_sink(t.location)) {
        all_absorbed = false;
        break;
      }
    }
    if (witness != nullptr && all_absorbed) complete(cs, *cfg, eid, std::nullopt, witness->payload);
  }
}

void Simulation::emit(const Thing& thing, const StageId& stage, Action action,
                      std::vector<TraceRecord>& out) {
  TraceRecord r;
  r.step = step_;
  r.thing = thing.id;
  r.thimac = model_.stage(stage).owner;
  r.stage = stage;
  r.action = action;
  r.mode = mode_of(action);
  r.case_id = thing.case_id;
  r.config = cases_.at(thing.case_id).config;
  out.push_back(r);
  log_.push_back(std::move(r));
}

std::string Simulation::inject_thing(const StageId& create_stage, Payload payload) {
  const Stage& st = model_.stage(create_stage);
  if (st.kind != StageKind::Create) {
    throw Error(ErrorCode::NotACreateStage, "'" + create_stage + "' is not a Create stage");
  }
  CaseState cs;
  cs.id = "case" + std::to_string(next_case_++);
  cs.config = active_;
  const ConfigRuntime* cfg = runtime_for(cs);
  if (cfg != nullptr) {
    for (const auto& e : cfg->graph.initial()) cs.events[e].start_tokens = 1;
  }
  Thing t;
  t.id = "t" + std::to_string(next_thing_++);
  t.payload = std::move(payload);
  t.location = create_stage;
  t.born_step = step_;
  t.case_id = cs.id;
  if (cfg != nullptr) {
    if (auto ev = event_of(*cfg, create_stage)) {
      EventRun& run = cs.events[*ev];
      if (run.status != EventStatus::Active) activate(cs, *cfg, *ev);
      cs.member_of[t.id] = *ev;
    }
  }
  std::string id = t.id;
  cases_.emplace(cs.id, std::move(cs));
  queues_[create_stage].push_back(id);
  auto [it, _] = things_.emplace(id, std::move(t));
  std::vector<TraceRecord> sink;
  emit(it->second, create_stage, Action::Create, sink);
  return id;
}

void Simulation::fire_triggers(const std::string& thing_id, const StageId& process_stage,
                               std::vector<TraceRecord>& out) {
  for (const StageId& target : model_.trigger_targets(process_stage)) {
    const Thing& x = things_.at(thing_id);
    CaseState& cs = cases_.at(x.case_id);
    const ConfigRuntime* cfg = runtime_for(cs);
    const std::string trigger_id = TriggerEdge{process_stage, target}.id();
    std::optional<std::string> target_event;
    if (cfg != nullptr) {
      std::optional<std::string> src;
      if (auto it = cs.member_of.find(x.id); it != cs.member_of.end()) src = it->second;
      if (src && cs.events[*src].status == EventStatus::Active) {
        if (!cs.events[*src].fired.insert(trigger_id).second) continue;
      }
      target_event = event_of(*cfg, target);
      if (target_event && target_event != src &&
          cs.events[*target_event].status != EventStatus::Active) {
        if (!enabled(cs, *cfg, *target_event)) continue;
        activate(cs, *cfg, *target_event);
      }
    }
    emit(x, process_stage, Action::Trigger, out);
    if (model_.stage(target).kind != StageKind::Create) continue;
    Thing y;
    y.id = "t" + std::to_string(next_thing_++);
    y.payload = x.payload;
    y.location = target;
    y.born_step = step_;
    y.case_id = x.case_id;
    if (target_event) cs.member_of[y.id] = *target_event;
    std::string yid = y.id;
    queues_[target].push_back(yid);
    auto [it, _] = things_.emplace(yid, std::move(y));
    emit(it->second, target, Action::Create, out);
  }
}

std::vector<TraceRecord> Simulation::step() {
  struct Candidate {
    std::string thing;
    const Move* move;
    CaseState next;
  };
  std::vector<Candidate> candidates;
  for (const auto& [stage, queue] : queues_) {
    const auto& moves = moves_from(stage);
    if (moves.empty()) continue;
    for (const auto& tid : queue) {
      const Thing& t = things_.at(tid);
      std::size_t before = candidates.size();
      for (const auto& m : moves) {
        if (auto next = try_move(t, m)) candidates.push_back({tid, &m, std::move(*next)});
      }
      if (candidates.size() != before) break;
    }
  }
  std::vector<TraceRecord> out;
  if (candidates.empty()) return out;

  ++step_;
  Candidate& c = candidates[rng_() % candidates.size()];
  Thing& t = things_.at(c.thing);
  cases_.at(t.case_id) = std::move(c.next);

  auto& q = queues_.at(t.location);
  q.erase(std::find(q.begin(), q.end(), t.id));
  if (q.empty()) queues_.erase(t.location);

  for (const StageId& s : c.move->path) {
    switch (model_.stage(s).kind) {
      case StageKind::Release: emit(t, s, Action::Release, out); break;
      case StageKind::Transfer: emit(t, s, Action::Transfer, out); break;
      case StageKind::Receive:
        emit(t, s, Action::Arrive, out);
        emit(t, s, Action::Accept, out);
        break;
      case StageKind::Process: emit(t, s, Action::Process, out); break;
      case StageKind::Create: emit(t, s, Action::Create, out); break;
    }
  }

  const std::string case_id = t.case_id;
  if (c.move->departs) {
    cases_.at(case_id).member_of.erase(t.id);
    things_.erase(c.thing);
  } else {
    t.location = c.move->path.back();
    queues_[t.location].push_back(t.id);
    if (model_.stage(t.location).kind == StageKind::Process) {
      if (auto h = hooks_.find(t.location); h != hooks_.end()) h->second(t.payload);
      fire_triggers(t.id, t.location, out);
    }
  }
  settle_completions(cases_.at(case_id));
  return out;
}

Trace Simulation::run(std::uint64_t max_steps) {
  Trace trace;
  while (trace.steps < max_steps) {
    auto recs = step();
    if (recs.empty()) break;
    ++trace.steps;
    trace.records.insert(trace.records.end(), recs.begin(), recs.end());
  }
  trace.budget_exhausted = trace.steps == max_steps && !quiescent();
  return trace;
}

Trace Simulation::run_script(std::vector<Injection> script, std::uint64_t max_steps) {
  std::stable_sort(script.begin(), script.end(),
                   [](const Injection& a, const Injection& b) { return a.step < b.step; });
  Trace trace;
  const std::size_t log_start = log_.size();
  std::size_t next = 0;
  while (true) {
    while (next < script.size() && script[next].step <= step_) {
      inject_thing(script[next].stage, script[next].payload);
      ++next;
    }
    if (trace.steps == max_steps) {
      trace.budget_exhausted = !quiescent() || next < script.size();
      break;
    }
    if (step().empty()) {
      if (next == script.size()) break;
      const std::uint64_t at = script[next].step;
      while (next < script.size() && script[next].step == at) {
        inject_thing(script[next].stage, script[next].payload);
        ++next;
      }
      continue;
    }
    ++trace.steps;
  }
  trace.records.assign(log_.begin() + static_cast<std::ptrdiff_t>(log_start), log_.end());
  return trace;
}

bool Simulation::quiescent() const {
  for (const auto& [stage, queue] : queues_) {
    const auto& moves = moves_from(stage);
    for (const auto& tid : queue) {
      for (const auto& m : moves) {
        if (try_move(things_.at(tid), m)) return false;
      }
    }
  }
  return true;
}

std::vector<std::string> Simulation::case_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : cases_) out.push_back(id);
  // case10 sorts after case9, not after case1
  std::sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

const std::string& Simulation::case_config(const std::string& case_id) const {
  auto it = cases_.find(case_id);
  if (it == cases_.end()) throw Error(ErrorCode::UnknownCase, "no case '" + case_id + "'");
  return it->second.config;
}

bool Simulation::case_in_flight(const std::string& case_id) const {
  if (cases_.count(case_id) == 0) throw Error(ErrorCode::UnknownCase, "no case '" + case_id + "'");
  return std::any_of(things_.begin(), things_.end(), [&](const auto& kv) {
    return kv.second.case_id == case_id && !is_sink(kv.second.location);
  });
}

std::set<std::string> Simulation::current_events(const std::string& case_id) const {
  auto it = cases_.find(case_id);
  if (it == cases_.end()) throw Error(ErrorCode::UnknownCase, "no case '" + case_id + "'");
  std::set<std::string> out;
  for (const auto& [eid, run] : it->second.events) {
    if (run.status == EventStatus::Active) out.insert(eid);
  }
  for (const auto& [tid, ev] : it->second.member_of) {
    if (!is_sink(things_.at(tid).location)) out.insert(ev);
  }
  return out;
}

EventStatus Simulation::event_status(const std::string& case_id, const std::string& event) const {
  auto it = cases_.find(case_id);
  if (it == cases_.end()) throw Error(ErrorCode::UnknownCase, "no case '" + case_id + "'");
  auto run = it->second.events.find(event);
  return run == it->second.events.end() ? EventStatus::Idle : run->second.status;
}

bool Simulation::repin_case(const std::string& case_id, const std::string& config_id) {
  auto cit = cases_.find(case_id);
  if (cit == cases_.end()) throw Error(ErrorCode::UnknownCase, "no case '" + case_id + "'");
  auto target_it = configs_.find(config_id);
  if (target_it == configs_.end()) {
    throw Error(ErrorCode::UnknownConfig, "no configuration '" + config_id + "'");
  }
  CaseState& old = cit->second;
  if (old.config == config_id) return true;
  const ConfigRuntime& target = target_it->second;
  for (const auto& ev : current_events(case_id)) {
    if (target.graph.find_event(ev) == nullptr) return false;
  }
  const ConfigRuntime* source = runtime_for(old);

  CaseState next;
  next.id = old.id;
  next.config = config_id;
  auto old_status = [&](const std::string& ev) {
    auto it = old.events.find(ev);
    return it == old.events.end() ? EventStatus::Idle : it->second.status;
  };
  for (const auto& [eid, _] : target.graph.events()) {
    if (auto it = old.events.find(eid); it != old.events.end()) next.events[eid] = it->second;
  }
  std::set<std::string> old_keys;
  if (source != nullptr) {
    for (const auto& e : source->graph.edges()) old_keys.insert(edge_key(e));
  }
  for (const auto& e : target.graph.edges()) {
    const std::string key = edge_key(e);
    if (old_keys.count(key) != 0) {
      if (auto t = old.tokens.find(key); t != old.tokens.end() && t->second > 0) {
        next.tokens[key] = t->second;
      }
    } else if (e.kind != EdgeKind::Choice && old_status(e.from) == EventStatus::Done &&
               old_status(e.to) == EventStatus::Idle) {
      next.tokens[key] = 1;
    }
  }
  for (const auto& [tid, t] : things_) {
    if (t.case_id != case_id) continue;
    if (auto ev = event_of(target, t.location)) next.member_of[tid] = *ev;
  }
  old = std::move(next);
  return true;
}

bool Simulation::operator==(const Simulation& o) const {
  return model_ == o.model_ && seed_ == o.seed_ && rng_ == o.rng_ && step_ == o.step_ &&
         next_thing_ == o.next_thing_ && next_case_ == o.next_case_ && active_ == o.active_ &&
         configs_ == o.configs_ && queues_ == o.queues_ && things_ == o.things_ &&
         cases_ == o.cases_ && log_ == o.log_;
}

}  // namespace tmw::sim
