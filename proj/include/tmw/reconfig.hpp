#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "tmw/behavior.hpp"
#include "tmw/model.hpp"
#include "tmw/sim.hpp"

namespace tmw::reconfig {

struct Configuration {
  std::string id;
  BehaviorGraph behavior;
  std::string description;
};

enum class SwitchPolicy : std::uint8_t { DrainOld, Immediate };

std::string_view to_string(SwitchPolicy p) noexcept;

struct SwitchReport {
  SwitchPolicy policy = SwitchPolicy::DrainOld;
  std::string target;
  // In-flight cases per pinned config, after the switch.
  std::map<std::string, std::size_t> coexisting;
  std::vector<std::string> repinned;
  std::vector<std::string> stranded;

  std::size_t stranded_count() const noexcept { return stranded.size(); }
  nlohmann::ordered_json to_json() const;
};

// Owns one simulation over a shared static model and switches the behavior
// graph new cases run under. The static model is never modified.
class Controller {
 public:
  Controller(StaticModel model, std::uint64_t seed);

  void register_config(Configuration config);
  void activate(const std::string& id);
  SwitchReport switch_to(const std::string& id, SwitchPolicy policy);

  // Injects a root thing under the active config.
  std::string start_case(const StageId& create_stage, sim::Payload payload = sim::Payload::object());

  const std::string& active() const noexcept { return sim_.active_configuration(); }
  const StaticModel& model() const noexcept { return sim_.model(); }
  const std::map<std::string, Configuration>& configs() const noexcept { return configs_; }
  std::map<std::string, std::string> in_flight() const;  // case -> pinned config

  sim::Simulation& simulation() noexcept { return sim_; }
  const sim::Simulation& simulation() const noexcept { return sim_; }

 private:
  std::map<std::string, Configuration> configs_;
  sim::Simulation sim_;
};

}  // namespace tmw::reconfig
