#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tmw/reconfig.hpp"
#include "tmw/sim.hpp"

namespace tmw::demo {

struct DemoResult {
  reconfig::SwitchReport report;
  std::vector<sim::TraceRecord> trace;  // every record, both cases
  std::string model_before;  // canonical JSON
  std::string model_after;
  std::string old_case;
  std::string new_case;
  bool old_case_finished = false;
  bool new_case_finished = false;
};

// Order case under a controller: one case starts under E20, runs
// `steps_before_switch` steps, the controller switches to E21 with the given
// policy, a second case starts, and both run to quiescence.
DemoResult run_reconfig_demo(reconfig::SwitchPolicy policy, std::uint64_t seed,
                             std::uint64_t steps_before_switch = 6,
                             std::uint64_t max_steps = 10000);

// True when some record of config `a` comes after a record of config `b`
// and vice versa.
bool configs_interleave(const std::vector<sim::TraceRecord>& trace, const std::string& a,
                        const std::string& b);

}  // namespace tmw::demo
