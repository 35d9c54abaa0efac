#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "ipslab/cli.hpp"
#include "ipslab/config.hpp"

using namespace ipslab;
using namespace ipslab::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = IPSLAB_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "ipslab_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::vector<ConfigIssue> issues_of(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigLoadError& e) {
    return e.issues();
  }
  return {};
}

bool has_issue(const std::vector<ConfigIssue>& issues, const std::string& pointer) {
  return std::any_of(issues.begin(), issues.end(), [&](const ConfigIssue& i) { return i.pointer == pointer; });
}

const char* kMinimal = R"({
  "version": 1,
  "alphabet": [0, 1],
  "sites": ["a", "b"],
  "kernel": {"type": "heat_bath", "hamiltonian": {"beta": 0.5, "couplings": [["a", "b", 1.0]], "spins": [-1, 1]}}
})";

}  // namespace

TEST_CASE("config loading") {
  SUBCASE("shipped configs load") {
    for (const char* name : {"ising2site.json", "ising3ring.json", "bernoulli3.json", "lazy_table.json"}) {
      CAPTURE(name);
      const LabConfig c = load_config(kConfigs / name);
      REQUIRE(c.model.has_value());
    }
    const LabConfig ring = load_config(kConfigs / "ising3ring.json");
    CHECK(ring.model->n_states() == 8);
    REQUIRE(ring.events.size() == 2);
    CHECK(ring.events[0].certified_increasing());
    CHECK_FALSE(ring.events[1].certified_increasing());
    CHECK(ring.events[1].name() == "parity");
    const LabConfig two = load_config(kConfigs / "ising2site.json");
    REQUIRE(two.family.has_value());
    CHECK(two.family->a() == 0.0);
  }
  SUBCASE("minimal config derives neighborhoods") {
    const LabConfig c = parse_config(kMinimal);
    CHECK(c.model->sites().neighborhood(0) == std::vector<std::size_t>{1});
    CHECK(c.tolerance == "default");
  }
  SUBCASE("every schema problem is reported") {
    const auto issues = issues_of(R"({
      "version": 2,
      "alphabet": [0, "x"],
      "sites": ["a", "a"],
      "kernel": {"type": "magic"},
      "colour": "blue"
    })");
    CHECK(has_issue(issues, "/version"));
    CHECK(has_issue(issues, "/alphabet/1"));
    CHECK(has_issue(issues, "/sites/1"));
    CHECK(has_issue(issues, "/kernel/type"));
    CHECK(has_issue(issues, "/colour"));
    try {
      (void)parse_config(R"({"version": 1, "colour": 1})");
      FAIL("expected a config error");
    } catch (const ConfigLoadError& e) {
      CHECK(e.code() == ErrorCode::ConfigError);
      const std::string what = e.what();
      CHECK(what.find("\n  /colour: unknown key") != std::string::npos);
      CHECK(what.find("\n  /alphabet: missing required key") != std::string::npos);
    }
  }
  SUBCASE("syntax errors carry the line") {
    const auto issues = issues_of("{\n  \"version\": 1,\n  \"alphabet\": [0, 1,]\n}");
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].message.find("line 3") != std::string::npos);
  }
  SUBCASE("nested problems") {
    CHECK(has_issue(issues_of(R"({"version": 1, "alphabet": [0, 1], "sites": ["a"],
      "kernel": {"type": "heat_bath", "hamiltonian": {"beta": 1, "temperature": 2}}})"),
                    "/kernel/hamiltonian/temperature"));
    CHECK(has_issue(issues_of(R"({"version": 1, "alphabet": [0, 1], "sites": ["a", "b"],
      "kernel": {"type": "heat_bath", "hamiltonian": {"couplings": [["a", "z", 1.0]]}}})"),
                    "/kernel/hamiltonian/couplings/0/1"));
    CHECK(has_issue(issues_of(R"({"version": 1, "alphabet": [0, 1], "sites": ["a"],
      "kernel": {"type": "heat_bath"}})"),
                    "/kernel"));
    CHECK(has_issue(issues_of(R"({"version": 1, "alphabet": [0, 1], "sites": ["a", "b"],
      "neighborhoods": {"a": ["b"]},
      "kernel": {"type": "heat_bath", "hamiltonian": {}}})"),
                    "/neighborhoods/b"));
    CHECK(has_issue(issues_of(R"({"version": 1, "alphabet": [0, 1], "sites": ["a"],
      "kernel": {"type": "table", "table": {"a": [[0.5, 0.5]]}}})"),
                    "/kernel/table/a"));
    CHECK(has_issue(issues_of(R"({"version": 1, "alphabet": [0, 1], "sites": ["a"],
      "kernel": {"type": "heat_bath", "hamiltonian": {}},
      "events": [{"name": "e", "formula": {"site": "a"}, "states": []}]})"),
                    "/events/0"));
    CHECK(has_issue(issues_of(R"({"version": 1, "alphabet": [0, 1], "sites": ["a"],
      "kernel": {"type": "heat_bath", "hamiltonian": {}},
      "events": [{"name": "e", "formula": {"nand": []}}]})"),
                    "/events/0/formula"));
    CHECK(has_issue(issues_of(R"({"version": 1, "alphabet": [0, 1], "sites": ["a"],
      "kernel": {"type": "heat_bath"}, "measure": [1.0],
      "family": {"parameter": [0.2, 0.8], "type": "hamiltonian"}})"),
                    "/family/type"));
  }
  SUBCASE("model invariants surface as config errors") {
    // Kernel of a depends on b although the declared neighborhood is empty.
    const auto issues = issues_of(R"({"version": 1, "alphabet": [0, 1], "sites": ["a", "b"],
      "neighborhoods": {"a": [], "b": ["a"]},
      "kernel": {"type": "heat_bath", "hamiltonian": {"couplings": [["a", "b", 1.0]]}}})");
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].pointer == "/kernel");
    CHECK(issues[0].message.find("FiniteRangeViolation") != std::string::npos);
    // Table kernels that are not reversible for the given measure.
    CHECK(has_issue(issues_of(R"({"version": 1, "alphabet": [0, 1], "sites": ["a"],
      "neighborhoods": {"a": ["a"]}, "neighborhoods_include_self": true,
      "kernel": {"type": "table", "table": {"a": [[0.8, 0.2], [0.3, 0.7]]}},
      "measure": [0.5, 0.5]})"),
                    "/kernel"));
  }
}

TEST_CASE("tolerance profiles") {
  CHECK(tolerance_profile("default").slack == 1e-6);
  CHECK(tolerance_profile("default").structural == 1e-10);
  CHECK(tolerance_profile("default").mc_sigmas == 4.0);
  CHECK(tolerance_profile("relaxed").slack == 1e-4);
  CHECK_CODE(tolerance_profile("lenient"), ErrorCode::ConfigError);
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("trees subcommand") {
  const fs::path out = scratch("trees");
  std::ostringstream log;
  RunFlags f;
  f.n = 4;
  f.out = out.string();
  const auto r = run("trees", f, log);
  CHECK(r.exit_code == kExitPass);
  const auto& t = r.report["results"]["trees"];
  CHECK(t["count"] == 5);
  CHECK(t["trees"].size() == 5);
  CHECK(t["catalan"] == "5");
  CHECK(t["boundCoefficient"] == "1/15");
  std::set<std::string> masses;
  for (const auto& e : t["trees"]) masses.insert(e["massCoefficient"].get<std::string>());
  CHECK(masses == std::set<std::string>{"1/15", "1/30"});
  CHECK(t["decompositions"].size() == 3);
  CHECK(r.report["manifest"]["configHash"] == "none");
  CHECK(fs::exists(out / "report.json"));
  CHECK_FALSE(fs::exists(out / "witness.csv"));
  f.n = 11;
  CHECK(run("trees", f, log).exit_code == kExitConfigError);
}

TEST_CASE("malformed configs exit with code 2") {
  const fs::path dir = scratch("malformed");
  const fs::path cfg = dir / "bad.json";
  spit(cfg, "{\n  \"version\": 1,\n  \"alphabet\": [0, 1],\n  \"sites\": [\"a\"],\n  \"kernal\": {}\n}\n");
  RunFlags f;
  f.config = cfg.string();
  f.out = dir.string();
  std::ostringstream log;
  CHECK(run("constants", f, log).exit_code == kExitConfigError);
  CHECK(log.str().find("\n  /kernal: unknown key\n") != std::string::npos);
  CHECK(log.str().find("\n  /kernel: missing required key") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "report.json"));

  f.config = (dir / "missing.json").string();
  CHECK(run("constants", f, log).exit_code == kExitConfigError);
  RunFlags none;
  none.out = dir.string();
  CHECK(run("constants", none, log).exit_code == kExitConfigError);
  CHECK(run("frobnicate", none, log).exit_code == kExitConfigError);
  RunFlags no_family;
  no_family.config = (kConfigs / "ising3ring.json").string();
  no_family.out = dir.string();
  CHECK(run("russo", no_family, log).exit_code == kExitConfigError);
  no_family.tolerance = "lenient";
  CHECK(run("constants", no_family, log).exit_code == kExitConfigError);
}

TEST_CASE("all is byte-identical across runs and replays from its manifest") {
  const fs::path a = scratch("all_a");
  const fs::path b = scratch("all_b");
  const fs::path c = scratch("all_c");
  RunFlags f;
  f.config = (kConfigs / "ising2site.json").string();
  f.seed = 7;
  std::ostringstream log;
  f.out = a.string();
  const auto ra = run("all", f, log);
  f.out = b.string();
  f.workers = 1;
  const auto rb = run("all", f, log);
  CHECK(ra.exit_code == kExitPass);
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  CHECK(slurp(a / "witness.csv") == slurp(b / "witness.csv"));
  CHECK(ra.report["results"].contains("russo"));
  CHECK(ra.report["results"].contains("threshold"));

  std::ostringstream rlog;
  const auto rr = replay((a / "report.json").string(), c.string(), rlog);
  CHECK(rr.exit_code == kExitPass);
  CHECK(rlog.str().find("replay: reproduced") != std::string::npos);
  CHECK(slurp(c / "report.json") == slurp(a / "report.json"));

  // A tampered report no longer reproduces.
  std::string doctored = slurp(a / "report.json");
  const auto pos = doctored.find("\"kappa\": ");
  REQUIRE(pos != std::string::npos);
  doctored.insert(pos + 9, "1");
  spit(b / "report.json", doctored);
  std::ostringstream tlog;
  CHECK(replay((b / "report.json").string(), c.string(), tlog).exit_code == kExitFail);
  CHECK(tlog.str().find("replay: differs") != std::string::npos);
}

TEST_CASE("replay rejects a changed config") {
  const fs::path dir = scratch("replay_hash");
  const fs::path cfg = dir / "model.json";
  spit(cfg, kMinimal);
  RunFlags f;
  f.config = cfg.string();
  f.out = dir.string();
  std::ostringstream log;
  REQUIRE(run("constants", f, log).exit_code == kExitPass);
  spit(cfg, std::string(kMinimal) + "\n");
  std::ostringstream rlog;
  CHECK(replay((dir / "report.json").string(), dir.string(), rlog).exit_code == kExitConfigError);
  CHECK(rlog.str().find("/manifest/configHash") != std::string::npos);
  CHECK(replay((dir / "nothing.json").string(), dir.string(), rlog).exit_code == kExitConfigError);
}

TEST_CASE("simulate is reproducible and independent of the worker count") {
  const fs::path dir = scratch("simulate");
  RunFlags f;
  f.config = (kConfigs / "ising3ring.json").string();
  f.seed = 3;
  f.t = 1.0;
  f.samples = 10000;
  f.out = dir.string();
  std::ostringstream log;
  const auto one = run("simulate", f, log);
  f.workers = 3;
  const auto three = run("simulate", f, log);
  CHECK(one.exit_code == kExitPass);
  CHECK(one.report["results"]["simulate"]["estimate"] == three.report["results"]["simulate"]["estimate"]);
  CHECK(one.report["results"]["simulate"]["stdErr"] == three.report["results"]["simulate"]["stdErr"]);
  CHECK(one.witness_csv.rfind("section,column,state,configuration,value\n", 0) == 0);
  CHECK(one.witness_csv.find("simulate,estimate,7,1 1 1,") != std::string::npos);

  // Replaying the three-worker manifest reproduces the estimates exactly.
  std::ostringstream rlog;
  const auto again = replay((dir / "report.json").string(), scratch("simulate_replay").string(), rlog);
  CHECK(again.exit_code == kExitPass);
  CHECK(again.report["results"]["simulate"]["estimate"] == three.report["results"]["simulate"]["estimate"]);
  f.samples = 10;
  CHECK(run("simulate", f, log).exit_code == kExitConfigError);
}

TEST_CASE("threshold skips events outside its hypotheses") {
  // On [0.9, 0.95] delta_p >= e^2 alpha_p^2 everywhere, and "down" is not
  // increasing: both events are reported as skipped, not failed.
  const fs::path dir = scratch("skips");
  const fs::path cfg = dir / "model.json";
  spit(cfg, R"({"version": 1, "alphabet": [0, 1], "sites": ["a"],
    "kernel": {"type": "heat_bath"}, "measure": [0.5, 0.5],
    "events": [{"name": "up", "formula": {"site": "a"}}, {"name": "down", "states": [[0]]}],
    "family": {"parameter": [0.9, 0.95], "type": "bernoulli"}})");
  RunFlags f;
  f.config = cfg.string();
  f.out = dir.string();
  std::ostringstream log;
  const auto r = run("threshold", f, log);
  CHECK(r.exit_code == kExitPass);
  const auto& events = r.report["results"]["threshold"]["events"];
  REQUIRE(events.size() == 2);
  CHECK(events[0].contains("skipped"));
  CHECK(events[1]["skipped"] == "not increasing");
}
