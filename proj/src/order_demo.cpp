#include "tmw/order_demo.hpp"

#include <algorithm>

#include "tmw/bpmn.hpp"
#include "tmw/serialize.hpp"

namespace tmw::demo {

namespace {

bool reached_end(const std::vector<sim::TraceRecord>& trace, const std::string& case_id) {
  return std::any_of(trace.begin(), trace.end(), [&](const sim::TraceRecord& r) {
    return r.case_id == case_id && r.thimac == "OrderClosed" && r.action == sim::Action::Release;
  });
}

}  // namespace

DemoResult run_reconfig_demo(reconfig::SwitchPolicy policy, std::uint64_t seed,
                             std::uint64_t steps_before_switch, std::uint64_t max_steps) {
  bpmn::OrderCase oc = bpmn::build_order_case();
  DemoResult result;
  result.model_before = serialize_json(oc.model);

  reconfig::Controller ctl(oc.model, seed);
  ctl.register_config(oc.e20);
  ctl.register_config(oc.e21);
  ctl.activate("E20");
  bpmn::install_order_hooks(ctl.simulation());

  const std::string entry(bpmn::kOrderEntry);
  ctl.start_case(entry, bpmn::order_payload());
  result.old_case = ctl.simulation().case_ids().back();
  ctl.simulation().run(steps_before_switch);

  result.report = ctl.switch_to("E21", policy);
  ctl.start_case(entry, bpmn::order_payload());
  result.new_case = ctl.simulation().case_ids().back();
  ctl.simulation().run(max_steps);

  result.trace = ctl.simulation().log();
  result.model_after = serialize_json(ctl.model());
  result.old_case_finished = reached_end(result.trace, result.old_case);
  result.new_case_finished = reached_end(result.trace, result.new_case);
  return result;
}

bool configs_interleave(const std::vector<sim::TraceRecord>& trace, const std::string& a,
                        const std::string& b) {
  bool seen_a = false, seen_b = false, a_after_b = false, b_after_a = false;
  for (const auto& r : trace) {
    if (r.config == a) {
      a_after_b = a_after_b || seen_b;
      seen_a = true;
    } else if (r.config == b) {
      b_after_a = b_after_a || seen_a;
      seen_b = true;
    }
  }
  return a_after_b && b_after_a;
}

}  // namespace tmw::demo
