#include "tmw/dot.hpp"

#include <sstream>

namespace tmw {

namespace {

std::string q(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string stage_label(const Stage& s) {
  std::string label(to_string(s.kind));
  if (s.kind == StageKind::Transfer) label += s.port == Port::In ? " (in)" : " (out)";
  return label;
}

void emit_cluster(const StaticModel& m, const Thimac& t, const DotOptions& opt, int depth,
                  std::ostringstream& os) {
  const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
  os << pad << "subgraph " << q("cluster_" + t.id) << " {\n";
  os << pad << "  label=" << q(t.name) << ";\n";
  if (opt.highlight.count(t.id) != 0) {
    os << pad << "  style=filled;\n" << pad << "  fillcolor=\"#ffd27f\";\n";
  }
  for (const Stage* s : m.stages_of(t.id)) {
    os << pad << "  " << q(s->id) << " [label=" << q(stage_label(*s))
       << (s->post() == Post::Interior ? ", shape=box" : ", shape=ellipse") << "];\n";
  }
  for (const Thimac* c : m.children_of(t.id)) emit_cluster(m, *c, opt, depth + 1, os);
  os << pad << "}\n";
}

}  // namespace

std::string render_dot(const StaticModel& model, const DotOptions& options) {
  std::ostringstream os;
  os << "digraph " << q(model.name().empty() ? "model" : model.name()) << " {\n";
  os << "  rankdir=LR;\n  compound=true;\n";
  for (const Thimac* t : model.children_of(std::nullopt)) emit_cluster(model, *t, options, 0, os);
  for (const auto& f : model.flows()) {
    os << "  " << q(f.from) << " -> " << q(f.to) << " [style=solid];\n";
  }
  for (const auto& t : model.triggers()) {
    os << "  " << q(t.from) << " -> " << q(t.to) << " [style=dashed];\n";
  }
  os << "}\n";
  return os.str();
}

std::string render_dot(const BehaviorGraph& graph) {
  std::ostringstream os;
  os << "digraph \"behavior\" {\n  rankdir=TB;\n";
  for (const auto& [id, e] : graph.events()) {
    os << "  " << q(id) << " [shape=box";
    if (graph.initial().count(id) != 0) os << ", peripheries=2";
    if (!e.description.empty()) os << ", tooltip=" << q(e.description);
    os << "];\n";
  }
  for (const auto& e : graph.edges()) {
    std::string label(to_string(e.kind));
    if (!e.guard.empty()) label += " [" + e.guard + "]";
    os << "  " << q(e.from) << " -> " << q(e.to) << " [label=" << q(label)
       << (e.kind == EdgeKind::Choice ? ", style=dotted" : "") << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace tmw
