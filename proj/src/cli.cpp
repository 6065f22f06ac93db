#include "tmw/cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "tmw/bpmn.hpp"
#include "tmw/dot.hpp"
#include "tmw/dsl.hpp"
#include "tmw/money.hpp"
#include "tmw/order_demo.hpp"
#include "tmw/serialize.hpp"
#include "tmw/sim.hpp"
#include "tmw/zeno.hpp"

namespace tmw::cli {

bool color_wanted() {
  const char* env = std::getenv("TM_COLOR");
  if (env != nullptr && std::string_view(env) == "0") return false;
  return isatty(STDOUT_FILENO) != 0;
}

namespace {

// Raised for problems with the invocation or unreadable inputs (exit 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Printer {
 public:
  Printer(std::ostream& out, bool color) : out_(out), color_(color) {}

  std::ostream& ok() { return tag("\033[32m", "ok"); }
  std::ostream& fail() { return tag("\033[31m", "fail"); }
  std::ostream& line() { return out_; }

 private:
  std::ostream& tag(const char* ansi, const char* word) {
    if (color_) return out_ << ansi << word << "\033[0m ";
    return out_ << word << ' ';
  }

  std::ostream& out_;
  bool color_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f || !(f << content)) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
}

std::string extension(const std::string& path) {
  return std::filesystem::path(path).extension().string();
}

struct Loaded {
  StaticModel model;
  std::optional<BehaviorGraph> behavior;
  std::vector<Diagnostic> diagnostics;  // non-syntax DSL findings
};

// .tm sources go through the DSL; anything else is read as canonical JSON
// (a bare model or a model+behavior bundle).
Loaded load_model(const std::string& path, std::ostream& err) {
  const std::string text = read_file(path);
  Loaded l;
  if (extension(path) == ".tm") {
    ParseResult pr = parse_model(text, path);
    bool syntax = false;
    for (const auto& d : pr.diagnostics) {
      if (is_syntax_diagnostic(d)) {
        err << format_diagnostic(d) << '\n';
        syntax = true;
      } else {
        l.diagnostics.push_back(d);
      }
    }
    if (syntax) throw UsageError(path + ": cannot parse model");
    l.model = std::move(pr.model);
    return l;
  }
  Bundle b = deserialize_bundle(text);
  l.model = std::move(b.model);
  l.behavior = std::move(b.behavior);
  return l;
}

// Error-severity findings of a loaded model, printed to err.
std::size_t report_model(const Loaded& l, std::ostream& err) {
  std::size_t errors = 0;
  for (const auto& d : l.diagnostics) {
    err << format_diagnostic(d) << '\n';
    if (d.severity == Severity::Error) ++errors;
  }
  for (const auto& f : l.model.validate().findings) {
    err << to_string(f.severity) << " [" << f.code << "] " << f.subject << ": " << f.message << '\n';
    if (f.severity == Severity::Error) ++errors;
  }
  return errors;
}

// --- subcommands ----------------------------------------------------------

int cmd_validate(const std::string& model_path, const std::string& behavior_path,
                 Printer& p, std::ostream& err) {
  Loaded l = load_model(model_path, err);
  std::size_t violations = report_model(l, err);
  std::optional<BehaviorGraph> behavior = l.behavior;
  if (!behavior_path.empty()) behavior = deserialize_behavior(read_file(behavior_path), l.model);
  if (behavior) {
    for (const auto& f : validate_behavior(l.model, *behavior).findings) {
      err << to_string(f.severity) << " [" << f.code << "] " << f.subject << ": " << f.message
          << '\n';
      if (f.severity == Severity::Error) ++violations;
    }
  }
  (violations == 0 ? p.ok() : p.fail()) << violations << " violations\n";
  return violations == 0 ? kOk : kFindings;
}

int cmd_render(const std::string& model_path, const std::string& dot_path,
               const std::string& behavior_dot, Printer& p, std::ostream& out, std::ostream& err) {
  Loaded l = load_model(model_path, err);
  write_output(dot_path, render_dot(l.model), out);
  if (!behavior_dot.empty()) {
    if (!l.behavior) throw UsageError("--behavior-dot needs a bundle carrying a behavior graph");
    write_output(behavior_dot, render_dot(*l.behavior), out);
  }
  if (dot_path != "-") {
    p.ok() << "rendered " << l.model.thimacs().size() << " thimacs to " << dot_path << '\n';
  }
  return kOk;
}

struct SimulateArgs {
  std::string model;
  std::string behavior;
  std::uint64_t seed = 0;
  std::string inject;
  std::string trace = "-";
  std::uint64_t max_steps = 10000;
  std::vector<std::string> billing_hooks;
};

int cmd_simulate(const SimulateArgs& a, Printer& p, std::ostream& out, std::ostream& err) {
  Loaded l = load_model(a.model, err);
  if (report_model(l, err) != 0) {
    p.fail() << "model has violations, not simulating\n";
    return kFindings;
  }
  std::optional<BehaviorGraph> behavior = l.behavior;
  if (!a.behavior.empty()) behavior = deserialize_behavior(read_file(a.behavior), l.model);
  sim::Simulation s = behavior ? sim::Simulation(l.model, *behavior, a.seed)
                               : sim::Simulation(l.model, a.seed);
  for (const auto& stage : a.billing_hooks) {
    s.on_process(stage, [](sim::Payload& pl) {
      std::vector<Money> items;
      if (pl.contains("items")) {
        for (const auto& v : pl.at("items")) items.push_back(Money::from_json(v));
      }
      Money ship = pl.contains("shipping") ? Money::from_json(pl.at("shipping")) : Money{};
      pl["total"] = billing_total(items, ship).to_string();
    });
  }
  std::vector<sim::Injection> script;
  if (!a.inject.empty()) script = sim::parse_injection_script(read_file(a.inject));
  sim::Trace t = s.run_script(std::move(script), a.max_steps);
  write_output(a.trace, sim::to_jsonl(t.records), out);
  std::ostream& os = a.trace == "-" ? err : p.line();
  os << "steps=" << t.steps << " records=" << t.records.size() << " cases=" << s.case_ids().size()
     << (t.budget_exhausted ? " budget exhausted" : " quiescent") << '\n';
  return kOk;
}

int cmd_import(const std::string& xml_path, const std::string& out_path,
               const std::string& behavior_out, Printer& p, std::ostream& out, std::ostream& err) {
  bpmn::ParseResult pr = bpmn::parse_bpmn(read_file(xml_path));
  for (const auto& f : pr.diagnostics.findings) {
    err << xml_path << ": " << to_string(f.severity) << " [" << f.code << "] " << f.message << '\n';
  }
  bpmn::Mapping m = bpmn::map_bpmn(pr.graph);
  write_output(out_path, serialize_bundle(m.model, &m.behavior) + "\n", out);
  if (!behavior_out.empty()) write_output(behavior_out, serialize_behavior(m.behavior) + "\n", out);
  std::ostream& os = out_path == "-" ? err : p.line();
  os << "imported " << pr.graph.count(bpmn::NodeKind::Task) << " tasks: "
     << m.model.thimacs().size() << " thimacs, " << m.model.stages().size() << " stages, "
     << m.behavior.events().size() << " events, " << m.behavior.edges().size() << " edges\n";
  return kOk;
}

int cmd_reconfig(const std::string& policy_text, std::uint64_t seed, const std::string& trace_path,
                 const std::string& report_path, std::uint64_t switch_after, Printer& p,
                 std::ostream& out) {
  const auto policy =
      policy_text == "drain" ? reconfig::SwitchPolicy::DrainOld : reconfig::SwitchPolicy::Immediate;
  demo::DemoResult r = demo::run_reconfig_demo(policy, seed, switch_after);
  if (!trace_path.empty()) write_output(trace_path, sim::to_jsonl(r.trace), out);
  const std::string report = r.report.to_json().dump() + "\n";
  if (!report_path.empty()) {
    write_output(report_path, report, out);
  } else {
    p.line() << report;
  }
  const bool unchanged = r.model_before == r.model_after;
  (unchanged ? p.ok() : p.fail()) << "static model "
                                  << (unchanged ? "unchanged" : "CHANGED") << '\n';
  p.line() << r.old_case << " " << (r.old_case_finished ? "finished" : "unfinished") << ", "
           << r.new_case << " " << (r.new_case_finished ? "finished" : "unfinished")
           << "; E20/E21 records interleave: "
           << (demo::configs_interleave(r.trace, "E20", "E21") ? "yes" : "no")
           << "; stranded=" << r.report.stranded_count() << '\n';
  return unchanged ? kOk : kFindings;
}

int cmd_zeno(std::size_t nodes, std::uint64_t energy, const std::string& trace_path,
             const std::string& dot_path, Printer& p, std::ostream& out) {
  zeno::SpaceLattice lattice = zeno::build_lattice(nodes);
  zeno::ArrowSim arrow = zeno::launch(lattice, energy);
  zeno::BounceTrace t = zeno::run_until_settled(arrow);
  if (!trace_path.empty()) write_output(trace_path, zeno::to_jsonl(t), out);
  if (!dot_path.empty()) write_output(dot_path, zeno::render_lattice_dot(lattice, t.settle_node), out);
  for (const auto& r : t.records) {
    if (r.action == zeno::ArrowAction::Settle) break;
    p.line() << to_string(r.action) << " node=" << r.node << " energy=" << r.energy_after << '\n';
  }
  p.line() << "settle node=" << t.settle_node << " residual=" << t.residual << '\n';
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const Options& options) {
  CLI::App app{"Thinging-machine workbench", "tmw"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  std::string model_path, behavior_path, dot_path, behavior_dot;
  auto* validate = app.add_subcommand("validate", "Check a model against the static rules");
  validate->add_option("model", model_path, "Model (.tm, .json or bundle)")->required();
  validate->add_option("--behavior", behavior_path, "Behavior graph JSON to check as well");

  auto* render = app.add_subcommand("render", "Render a model as Graphviz DOT");
  render->add_option("model", model_path, "Model (.tm, .json or bundle)")->required();
  render->add_option("--dot", dot_path, "Output path, - for stdout")->required();
  render->add_option("--behavior-dot", behavior_dot, "Also render the bundled behavior graph");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Run the token simulation");
  simulate->add_option("model", sa.model, "Model (.tm, .json or bundle)")->required();
  simulate->add_option("--behavior", sa.behavior, "Behavior graph JSON");
  simulate->add_option("--seed", sa.seed, "Scheduler seed")->required();
  simulate->add_option("--inject", sa.inject, "Injection script JSON");
  simulate->add_option("--trace", sa.trace, "JSONL trace path, - for stdout");
  simulate->add_option("--max-steps", sa.max_steps, "Step budget")->capture_default_str();
  simulate->add_option("--billing-hook", sa.billing_hooks,
                       "Process stage that sets payload.total from items and shipping");

  std::string xml_path, out_path, behavior_out;
  auto* import = app.add_subcommand("import-bpmn", "Map a BPMN process to a model bundle");
  import->add_option("file", xml_path, "BPMN 2.0 XML")->required();
  import->add_option("--out", out_path, "Bundle JSON path, - for stdout")->required();
  import->add_option("--behavior-out", behavior_out, "Behavior graph JSON path");

  std::string policy = "drain", report_path, demo_trace;
  std::uint64_t demo_seed = 0, switch_after = 6;
  auto* demo = app.add_subcommand("reconfig-demo", "Switch the order case from E20 to E21");
  demo->add_option("--policy", policy, "drain or immediate")
      ->check(CLI::IsMember({"drain", "immediate"}))
      ->capture_default_str();
  demo->add_option("--seed", demo_seed, "Scheduler seed")->required();
  demo->add_option("--trace", demo_trace, "JSONL trace path");
  demo->add_option("--report", report_path, "Switch report JSON path");
  demo->add_option("--switch-after", switch_after, "Steps run before switching")
      ->capture_default_str();

  std::size_t nodes = 0;
  std::uint64_t energy = 0;
  std::string zeno_trace, zeno_dot;
  auto* zeno = app.add_subcommand("zeno", "Bounce an arrow through a space lattice");
  zeno->add_option("--nodes", nodes, "Lattice size")->required()->check(CLI::PositiveNumber);
  zeno->add_option("--energy", energy, "Movement energy")->required();
  zeno->add_option("--trace", zeno_trace, "JSONL trace path, - for stdout");
  zeno->add_option("--dot", zeno_dot, "Lattice DOT path");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "tmw: " << e.what() << '\n';
    return kUsage;
  }

  Printer p(out, options.color);
  try {
    if (validate->parsed()) return cmd_validate(model_path, behavior_path, p, err);
    if (render->parsed()) return cmd_render(model_path, dot_path, behavior_dot, p, out, err);
    if (simulate->parsed()) return cmd_simulate(sa, p, out, err);
    if (import->parsed()) return cmd_import(xml_path, out_path, behavior_out, p, out, err);
    if (demo->parsed()) {
      return cmd_reconfig(policy, demo_seed, demo_trace, report_path, switch_after, p, out);
    }
    if (zeno->parsed()) return cmd_zeno(nodes, energy, zeno_trace, zeno_dot, p, out);
  } catch (const UsageError& e) {
    err << "tmw: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "tmw: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::MalformedJson:
      case ErrorCode::SchemaVersion:
      case ErrorCode::MalformedXml:
      case ErrorCode::Io:
        return kUsage;
      default:
        return kFindings;
    }
  }
  return kUsage;
}

}  // namespace tmw::cli
