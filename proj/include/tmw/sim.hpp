#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tmw/behavior.hpp"
#include "tmw/model.hpp"

namespace tmw::sim {

enum class Action : std::uint8_t {
  Create,
  Process,
  Release,
  Transfer,
  Arrive,
  Accept,
  Trigger,
  Bounce,
  Settle,
};

// State = the thing is somewhere it can be found; Progression = pure change.
enum class Mode : std::uint8_t { State, Progression };

constexpr Mode mode_of(Action a) noexcept {
  switch (a) {
    case Action::Create:
    case Action::Process:
    case Action::Accept:
    case Action::Settle:
      return Mode::State;
    default:
      return Mode::Progression;
  }
}

std::string_view to_string(Action a) noexcept;
std::string_view to_string(Mode m) noexcept;

struct TraceRecord {
  std::uint64_t step = 0;
  std::string thing;
  ThimacId thimac;
  StageId stage;
  Action action = Action::Create;
  Mode mode = Mode::State;
  std::string case_id;
  std::string config;

  bool operator==(const TraceRecord&) const = default;
};

// One JSON object per record, fields in a fixed order:
// step, thing, thimac, stage, action, mode, case, config.
std::string to_jsonl(const TraceRecord& record);
std::string to_jsonl(std::span<const TraceRecord> records);

struct Trace {
  std::vector<TraceRecord> records;
  std::uint64_t steps = 0;
  bool budget_exhausted = false;
};

using Payload = nlohmann::json;

struct Thing {
  std::string id;
  Payload payload = Payload::object();
  StageId location;  // always an interior post between steps
  std::uint64_t born_step = 0;
  std::string case_id;

  bool operator==(const Thing&) const = default;
};

struct Injection {
  std::uint64_t step = 0;
  StageId stage;
  Payload payload = Payload::object();
};

// JSON list of {"step": N, "stage": "<create stage id>", "payload": {...}}.
std::vector<Injection> parse_injection_script(std::string_view text);

// Evaluates a Choice guard against a payload. Throws InvalidBehavior when
// the guard text is not one of: key, !key, key == literal, key != literal.
bool guard_holds(std::string_view guard, const Payload& payload);

enum class EventStatus : std::uint8_t { Idle, Active, Done };

// Deterministic token simulation over a static model, gated per case by the
// behavior graph (configuration) the case is pinned to.
class Simulation {
 public:
  // No configuration: every stage is ungated.
  Simulation(StaticModel model, std::uint64_t seed);
  Simulation(StaticModel model, BehaviorGraph behavior, std::uint64_t seed,
             std::string config_id = "default");

  void add_configuration(const std::string& id, BehaviorGraph behavior);
  void set_active_configuration(const std::string& id);
  const std::string& active_configuration() const noexcept { return active_; }
  bool has_configuration(const std::string& id) const { return configs_.count(id) != 0; }
  const BehaviorGraph& configuration(const std::string& id) const;

  using ProcessHook = std::function<void(Payload&)>;
  // Runs whenever a thing comes to rest at the Process stage, before
  // triggers fire (so triggered things see the updated payload).
  void on_process(const StageId& stage, ProcessHook hook);

  // Births a thing at a Create stage and opens a new case for it, pinned
  // to the active configuration.
  std::string inject_thing(const StageId& create_stage, Payload payload = Payload::object());

  std::vector<TraceRecord> step();
  Trace run(std::uint64_t max_steps);
  // Applies injections when the step counter reaches their step; a pending
  // injection is applied early if the simulation goes quiescent.
  Trace run_script(std::vector<Injection> script, std::uint64_t max_steps);

  bool quiescent() const;

  std::uint64_t step_count() const noexcept { return step_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const StaticModel& model() const noexcept { return model_; }
  const std::vector<TraceRecord>& log() const noexcept { return log_; }
  const std::map<StageId, std::deque<std::string>>& queues() const noexcept { return queues_; }
  const std::map<std::string, Thing>& things() const noexcept { return things_; }

  std::vector<std::string> case_ids() const;
  const std::string& case_config(const std::string& case_id) const;
  bool case_in_flight(const std::string& case_id) const;
  std::set<std::string> current_events(const std::string& case_id) const;
  EventStatus event_status(const std::string& case_id, const std::string& event) const;

  // Moves an in-flight case onto another configuration, carrying its event
  // progress across. Returns false and leaves the case untouched when one
  // of its current events does not exist in the target.
  bool repin_case(const std::string& case_id, const std::string& config_id);

  // Compares simulation state (hooks excluded).
  bool operator==(const Simulation& other) const;

 private:
  struct Move {
    std::vector<StageId> path;  // stages crossed after the origin
    bool departs = false;       // ends at a boundary post with nowhere to go

    bool operator==(const Move&) const = default;
  };

  struct ConfigRuntime {
    BehaviorGraph graph;
    std::map<std::string, std::vector<OrderingEdge>> in;
    std::map<std::string, std::vector<OrderingEdge>> out;
    std::map<StageId, std::string> event_of;
    std::set<StageId> exit_ready;

    bool operator==(const ConfigRuntime&) const = default;
  };

  struct EventRun {
    EventStatus status = EventStatus::Idle;
    int start_tokens = 0;
    std::set<std::string> fired;  // trigger ids fired in this occurrence

    bool operator==(const EventRun&) const = default;
  };

  struct CaseState {
    std::string id;
    std::string config;
    std::map<std::string, int> tokens;  // keyed by edge_key()
    std::map<std::string, EventRun> events;
    std::map<std::string, std::string> member_of;  // thing -> event

    bool operator==(const CaseState&) const = default;
  };

  void compute_moves();
  void walk(const StageId& at, std::vector<StageId>& path, std::vector<Move>& out) const;
  const std::vector<Move>& moves_from(const StageId& stage) const;
  bool is_sink(const StageId& stage) const { return moves_from(stage).empty(); }

  const ConfigRuntime* runtime_for(const CaseState& cs) const;
  std::optional<std::string> event_of(const ConfigRuntime& cfg, const StageId& stage) const;

  bool enabled(const CaseState& cs, const ConfigRuntime& cfg, const std::string& event) const;
  bool partially_enabled(const CaseState& cs, const ConfigRuntime& cfg,
                         const std::string& event) const;
  void activate(CaseState& cs, const ConfigRuntime& cfg, const std::string& event) const;
  void complete(CaseState& cs, const ConfigRuntime& cfg, const std::string& event,
                const std::optional<std::string>& toward, const Payload& payload) const;
  void leave(CaseState& cs, const ConfigRuntime& cfg, const Thing& thing,
             const std::string& event, const std::optional<std::string>& toward) const;
  std::optional<CaseState> try_move(const Thing& thing, const Move& move) const;
  void settle_completions(CaseState& cs) const;

  void emit(const Thing& thing, const StageId& stage, Action action,
            std::vector<TraceRecord>& out);
  void fire_triggers(const std::string& thing_id, const StageId& process_stage,
                     std::vector<TraceRecord>& out);

  StaticModel model_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  std::uint64_t step_ = 0;
  std::uint64_t next_thing_ = 1;
  std::uint64_t next_case_ = 1;
  std::string active_;
  std::map<std::string, ConfigRuntime> configs_;
  std::map<StageId, std::vector<Move>> moves_;
  std::map<StageId, std::deque<std::string>> queues_;
  std::map<std::string, Thing> things_;
  std::map<std::string, CaseState> cases_;
  std::map<StageId, ProcessHook> hooks_;
  std::vector<TraceRecord> log_;
};

}  // namespace tmw::sim
