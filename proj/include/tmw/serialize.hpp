#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "tmw/behavior.hpp"
#include "tmw/model.hpp"

namespace tmw {

inline constexpr int kSchemaVersion = 1;

// Canonical form: fixed key order, arrays sorted by id, compact separators.
// Structurally equal models serialize to identical bytes.
std::string serialize_json(const StaticModel& model);
StaticModel deserialize_json(std::string_view text);

nlohmann::ordered_json model_to_json(const StaticModel& model);
StaticModel model_from_json(const nlohmann::json& j);

// Behavior graphs reference stages by id; loading re-extracts each region
// from the model it is loaded against.
std::string serialize_behavior(const BehaviorGraph& graph);
BehaviorGraph deserialize_behavior(std::string_view text, const StaticModel& model);

nlohmann::ordered_json behavior_to_json(const BehaviorGraph& graph);
BehaviorGraph behavior_from_json(const nlohmann::json& j, const StaticModel& model);

// Container holding a model and, optionally, a behavior graph beside it.
struct Bundle {
  StaticModel model;
  std::optional<BehaviorGraph> behavior;
};

std::string serialize_bundle(const StaticModel& model, const BehaviorGraph* behavior);
// Accepts either a bundle or a bare model document.
Bundle deserialize_bundle(std::string_view text);

}  // namespace tmw
