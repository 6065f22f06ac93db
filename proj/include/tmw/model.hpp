#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tmw/error.hpp"
#include "tmw/report.hpp"

namespace tmw {

// The five generic actions. Arrive/Accept are a view on Receive (see
// ReceivePost), never a kind of their own.
enum class StageKind : std::uint8_t { Create, Process, Release, Transfer, Receive };

inline constexpr std::array<StageKind, 5> kAllStageKinds{
    StageKind::Create, StageKind::Process, StageKind::Release,
    StageKind::Transfer, StageKind::Receive};

enum class ReceivePost : std::uint8_t { Arrive, Accept };

// Interior posts are state posts (things may rest there); boundary posts are
// progression posts (pure change, never a resting place).
enum class Post : std::uint8_t { Interior, Boundary };

// Transfer is one kind with two ports: the membrane inward and outward.
enum class Port : std::uint8_t { None, In, Out };

enum class Locality : std::uint8_t { Intra, Cross };

constexpr Post post_of(StageKind kind) noexcept {
  switch (kind) {
    case StageKind::Create:
    case StageKind::Process:
    case StageKind::Receive:  // the Accept side of Receive
      return Post::Interior;
    case StageKind::Release:
    case StageKind::Transfer:
      return Post::Boundary;
  }
  return Post::Boundary;
}

constexpr Post post_of(ReceivePost view) noexcept {
  return view == ReceivePost::Accept ? Post::Interior : Post::Boundary;
}

std::string_view to_string(StageKind kind) noexcept;
std::string_view to_string(Port port) noexcept;
std::string_view to_string(Post post) noexcept;
std::string_view to_string(Locality locality) noexcept;
std::optional<StageKind> stage_kind_from_string(std::string_view text) noexcept;
std::optional<Port> port_from_string(std::string_view text) noexcept;

using ThimacId = std::string;
using StageId = std::string;

struct Stage {
  StageId id;
  ThimacId owner;
  StageKind kind = StageKind::Create;
  Port port = Port::None;

  Post post() const noexcept { return post_of(kind); }

  bool operator==(const Stage&) const = default;
};

struct Thimac {
  ThimacId id;
  std::string name;
  std::optional<ThimacId> parent;

  bool operator==(const Thimac&) const = default;
};

struct FlowEdge {
  StageId from;
  StageId to;

  std::string id() const { return from + "->" + to; }
  auto operator<=>(const FlowEdge&) const = default;
};

struct TriggerEdge {
  StageId from;
  StageId to;

  std::string id() const { return from + "=>" + to; }
  auto operator<=>(const TriggerEdge&) const = default;
};

struct LegalityRow {
  StageKind from;
  StageKind to;
  Locality locality;
  Port from_port;  // Port::None unless a Transfer endpoint
  Port to_port;
  std::string_view label;
};

// The nine admitted flow shapes; every other (kind, kind, locality) is illegal.
std::span<const LegalityRow> legality_table() noexcept;
const LegalityRow* find_legality_row(StageKind from, StageKind to,
                                     Locality locality) noexcept;

// Induced sub-model over a set of stages: the static part of an event.
struct Subdiagram {
  std::set<StageId> stages;
  std::set<FlowEdge> flows;
  std::set<TriggerEdge> triggers;
  std::uint64_t model_fingerprint = 0;

  bool contains(const StageId& id) const { return stages.count(id) != 0; }
  bool empty() const noexcept { return stages.empty(); }
  bool operator==(const Subdiagram&) const = default;
};

// The timeless grand thimac. Holds structure only: no clocks, no tokens.
class StaticModel {
 public:
  explicit StaticModel(std::string name = {}) : name_(std::move(name)) {}

  // Builds a model from raw parts without any checks; validate() reports
  // whatever is wrong. Used by deserializers.
  static StaticModel assemble(std::string name, std::vector<Thimac> thimacs,
                              std::vector<Stage> stages,
                              std::vector<FlowEdge> flows,
                              std::vector<TriggerEdge> triggers);

  ThimacId add_thimac(std::string_view name,
                      const std::optional<ThimacId>& parent = std::nullopt);
  StageId add_stage(const ThimacId& thimac, StageKind kind,
                    Port port = Port::None);
  std::string add_flow(const StageId& from, const StageId& to);
  std::string add_trigger(const StageId& from, const StageId& to);

  Report validate() const;
  Subdiagram extract_region(const std::set<StageId>& stage_ids) const;

  // FNV-1a over the model content in canonical order.
  std::uint64_t fingerprint() const;

  const std::string& name() const noexcept { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  const std::map<ThimacId, Thimac>& thimacs() const noexcept { return thimacs_; }
  const std::map<StageId, Stage>& stages() const noexcept { return stages_; }
  const std::set<FlowEdge>& flows() const noexcept { return flows_; }
  const std::set<TriggerEdge>& triggers() const noexcept { return triggers_; }

  const Thimac* find_thimac(const ThimacId& id) const;
  const Stage* find_stage(const StageId& id) const;
  const Stage& stage(const StageId& id) const;  // throws UnknownStage

  // Stage of a thimac by kind; for Transfer pass the port.
  const Stage* stage_of(const ThimacId& thimac, StageKind kind,
                        Port port = Port::None) const;
  std::vector<const Stage*> stages_of(const ThimacId& thimac) const;
  std::vector<const Thimac*> children_of(const std::optional<ThimacId>& parent) const;

  std::vector<StageId> flow_targets(const StageId& from) const;
  std::vector<StageId> trigger_targets(const StageId& from) const;

  bool operator==(const StaticModel&) const = default;

 private:
  std::string name_;
  std::map<ThimacId, Thimac> thimacs_;
  std::map<StageId, Stage> stages_;
  std::set<FlowEdge> flows_;
  std::set<TriggerEdge> triggers_;
};

StageId make_stage_id(const ThimacId& thimac, StageKind kind, Port port);
bool is_identifier(std::string_view text) noexcept;
bool is_reserved_word(std::string_view text) noexcept;

// Checks one flow against the legality table. Returns the violated-row text
// or nullopt when legal.
std::optional<std::string> check_flow(const Stage& from, const Stage& to);

}  // namespace tmw
