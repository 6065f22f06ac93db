#include "tmw/reconfig.hpp"

namespace tmw::reconfig {

std::string_view to_string(SwitchPolicy p) noexcept {
  return p == SwitchPolicy::DrainOld ? "drain" : "immediate";
}

nlohmann::ordered_json SwitchReport::to_json() const {
  nlohmann::ordered_json j;
  j["policy"] = std::string(to_string(policy));
  j["target"] = target;
  j["coexisting"] = nlohmann::ordered_json::object();
  for (const auto& [cfg, n] : coexisting) j["coexisting"][cfg] = n;
  j["repinned"] = repinned;
  j["stranded"] = stranded;
  j["stranded_count"] = stranded.size();
  return j;
}

Controller::Controller(StaticModel model, std::uint64_t seed) : sim_(std::move(model), seed) {}

void Controller::register_config(Configuration config) {
  if (configs_.count(config.id) != 0) {
    throw Error(ErrorCode::DuplicateConfig, "configuration '" + config.id + "' already registered");
  }
  sim_.add_configuration(config.id, config.behavior);
  std::string id = config.id;
  configs_.emplace(std::move(id), std::move(config));
}

void Controller::activate(const std::string& id) { sim_.set_active_configuration(id); }

SwitchReport Controller::switch_to(const std::string& id, SwitchPolicy policy) {
  if (configs_.count(id) == 0) throw Error(ErrorCode::UnknownConfig, "no configuration '" + id + "'");
  SwitchReport report;
  report.policy = policy;
  report.target = id;
  if (policy == SwitchPolicy::Immediate) {
    for (const auto& [case_id, cfg] : in_flight()) {
      if (cfg == id) continue;
      if (sim_.repin_case(case_id, id)) {
        report.repinned.push_back(case_id);
      } else {
        report.stranded.push_back(case_id);
      }
    }
  }
  sim_.set_active_configuration(id);
  report.coexisting[id] = 0;
  for (const auto& [case_id, cfg] : in_flight()) ++report.coexisting[cfg];
  return report;
}

std::string Controller::start_case(const StageId& create_stage, sim::Payload payload) {
  if (sim_.active_configuration().empty()) {
    throw Error(ErrorCode::UnknownConfig, "no configuration is active");
  }
  return sim_.inject_thing(create_stage, std::move(payload));
}

std::map<std::string, std::string> Controller::in_flight() const {
  std::map<std::string, std::string> out;
  for (const auto& c : sim_.case_ids()) {
    if (sim_.case_in_flight(c)) out.emplace(c, sim_.case_config(c));
  }
  return out;
}

}  // namespace tmw::reconfig
