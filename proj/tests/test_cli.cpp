#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "tmw/cli.hpp"
#include "tmw/serialize.hpp"

using namespace tmw;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args, bool color = false) {
  std::ostringstream out, err;
  cli::Options opt;
  opt.color = color;
  int code = cli::run_cli(args, out, err, opt);
  return {code, out.str(), err.str()};
}

std::string fx(const std::string& name) { return (test::fixture_dir() / name).string(); }

bool ends_with(const std::string& s, const std::string& tail) {
  return s.size() >= tail.size() && s.compare(s.size() - tail.size(), tail.size(), tail) == 0;
}

}  // namespace

TEST_CASE("validate") {
  Run ok = run({"validate", fx("order.tm")});
  CHECK(ok.code == 0);
  CHECK(ok.out == "ok 0 violations\n");

  Run bad = run({"validate", fx("invalid/illegal_flow.tm")});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("fail") == 0);
  CHECK(bad.err.find("IllegalFlow") != std::string::npos);

  Run syntax = run({"validate", fx("invalid/syntax.tm")});
  CHECK(syntax.code == 2);
  CHECK(syntax.err.find("Syntax") != std::string::npos);

  CHECK(run({"validate", fx("order.tm"), "--behavior", fx("order_e21.json")}).code == 0);
  CHECK(run({"validate", fx("missing.tm")}).code == 2);
  CHECK(run({"validate", fx("pipe.tm"), "--behavior", fx("order_e21.json")}).code == 1);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  Run unknown = run({"simulate", fx("order.tm"), "--seed", "1", "--bogus"});
  CHECK(unknown.code == 2);
  CHECK_FALSE(unknown.err.empty());
  CHECK(run({"simulate", fx("order.tm")}).code == 2);  // --seed is required
  CHECK(run({"zeno", "--nodes", "0", "--energy", "1"}).code == 2);
  CHECK(run({"reconfig-demo", "--policy", "sideways", "--seed", "1"}).code == 2);
  Run help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("simulate") != std::string::npos);
}

TEST_CASE("zeno") {
  Run r = run({"zeno", "--nodes", "5", "--energy", "3"});
  CHECK(r.code == 0);
  CHECK(ends_with(r.out, "settle node=3 residual=0\n"));
  CHECK(r.out.find("bounce node=0 energy=2") != std::string::npos);

  Run absorbed = run({"zeno", "--nodes", "4", "--energy", "10"});
  CHECK(ends_with(absorbed.out, "settle node=3 residual=7\n"));

  Run jsonl = run({"zeno", "--nodes", "2", "--energy", "0", "--trace", "-"});
  CHECK(jsonl.out.find("{\"node\":0,\"action\":\"settle\"") != std::string::npos);
}

TEST_CASE("render and import") {
  const auto dir = test::scratch_dir("cli_render");
  const std::string dot = (dir / "order.dot").string();
  Run r = run({"render", fx("order.tm"), "--dot", dot});
  CHECK(r.code == 0);
  CHECK(test::slurp(dot).rfind("digraph", 0) == 0);
  CHECK(run({"render", fx("pipe.tm"), "--dot", "-"}).out.find("cluster_Sender") != std::string::npos);

  const std::string bundle = (dir / "order.json").string();
  Run imp = run({"import-bpmn", fx("order.bpmn"), "--out", bundle});
  CHECK(imp.code == 0);
  CHECK(imp.out.find("17 thimacs") != std::string::npos);
  Bundle b = deserialize_bundle(test::slurp(bundle));
  CHECK(b.behavior.has_value());
  CHECK(run({"validate", bundle}).code == 0);

  Run bdot = run({"render", bundle, "--dot", (dir / "m.dot").string(), "--behavior-dot", "-"});
  CHECK(bdot.code == 0);
  CHECK(bdot.out.find("parallel_split") != std::string::npos);

  CHECK(run({"import-bpmn", fx("degenerate.bpmn"), "--out", "-"}).code == 1);
  CHECK(run({"import-bpmn", fx("malformed.bpmn"), "--out", "-"}).code == 2);
  CHECK(run({"import-bpmn", fx("no_start.bpmn"), "--out", "-"}).code == 1);
  Run warn = run({"import-bpmn", fx("unsupported.bpmn"), "--out", "-"});
  CHECK(warn.code == 0);
  CHECK(warn.err.find("UnsupportedElement") != std::string::npos);
}

TEST_CASE("simulate") {
  const auto dir = test::scratch_dir("cli_sim");
  const std::vector<std::string> base{"simulate",       fx("order.tm"),       "--behavior",
                                      fx("order_e21.json"), "--inject",     fx("order_inject.json"),
                                      "--billing-hook", "Billing.process",  "--seed"};
  std::string first;
  for (int i = 0; i < 3; ++i) {
    const std::string path = (dir / ("trace" + std::to_string(i) + ".jsonl")).string();
    auto args = base;
    args.insert(args.end(), {"7", "--trace", path});
    Run r = run(args);
    CHECK(r.code == 0);
    CHECK(ends_with(r.out, "quiescent\n"));
    const std::string text = test::slurp(path);
    CHECK_FALSE(text.empty());
    if (i == 0) {
      first = text;
    } else {
      CHECK(text == first);
    }
  }
  CHECK(first.rfind("{\"step\":0,\"thing\":\"t1\"", 0) == 0);

  auto other = base;
  other.insert(other.end(), {"8", "--trace", "-"});
  Run stdout_trace = run(other);
  CHECK(stdout_trace.code == 0);
  CHECK(stdout_trace.err.find("steps=") != std::string::npos);

  auto budget = base;
  budget.insert(budget.end(), {"7", "--trace", "-", "--max-steps", "2"});
  CHECK(run(budget).err.find("budget exhausted") != std::string::npos);

  CHECK(run({"simulate", fx("invalid/illegal_flow.tm"), "--seed", "1"}).code == 1);
}

TEST_CASE("reconfig-demo") {
  const auto dir = test::scratch_dir("cli_demo");
  const std::string report = (dir / "report.json").string();
  Run r = run({"reconfig-demo", "--policy", "drain", "--seed", "3", "--report", report});
  CHECK(r.code == 0);
  CHECK(r.out.find("ok static model unchanged") != std::string::npos);
  CHECK(r.out.find("interleave: yes") != std::string::npos);
  const std::string json = test::slurp(report);
  CHECK(json.find("\"coexisting\":{\"E20\":1,\"E21\":0}") != std::string::npos);
  CHECK(json.find("\"stranded_count\":0") != std::string::npos);

  Run imm = run({"reconfig-demo", "--policy", "immediate", "--seed", "3"});
  CHECK(imm.code == 0);
  CHECK(imm.out.find("\"repinned\":[\"case1\"]") != std::string::npos);
}

TEST_CASE("colour is opt-in") {
  Run plain = run({"validate", fx("order.tm")}, false);
  CHECK(plain.out.find('\033') == std::string::npos);
  Run colored = run({"validate", fx("order.tm")}, true);
  CHECK(colored.out.find("\033[32m") != std::string::npos);
}
