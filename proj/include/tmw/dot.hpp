#pragma once

#include <set>
#include <string>

#include "tmw/behavior.hpp"
#include "tmw/model.hpp"

namespace tmw {

struct DotOptions {
  // Thimacs drawn filled, e.g. the node where an arrow settled.
  std::set<ThimacId> highlight;
};

// One cluster per thimac (nested for sub-thimacs); flows solid, triggers dashed.
std::string render_dot(const StaticModel& model, const DotOptions& options = {});

// Events as boxes; ordering edges labelled by kind.
std::string render_dot(const BehaviorGraph& graph);

}  // namespace tmw
