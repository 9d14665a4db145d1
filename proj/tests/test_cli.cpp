#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "navlearn/cli.hpp"

namespace fs = std::filesystem;
using navlearn::run_cli;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "navlearn");
  std::vector<const char *> argv;
  for (const std::string &a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string &name) {
  const fs::path p = fs::temp_directory_path() / ("navlearn_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("scenarios lists the builtins") {
  const Outcome o = cli({"scenarios"});
  CHECK(o.code == navlearn::kExitOk);
  for (const char *name : {"congested", "deadlock", "incoming", "blocks", "bidirectional", "circle",
                           "intersection", "crowd"}) {
    CHECK(o.out.find(name) != std::string::npos);
  }
}

TEST_CASE("run writes a summary and trace") {
  const fs::path dir = scratch("run");
  const Outcome o = cli({"run", "--scenario", "incoming", "--policy", "alan", "--seed", "7",
                         "--out-dir", dir.string()});
  REQUIRE(o.code == 0);
  CHECK(o.out.find("overhead ") == 0);
  const auto doc = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(doc["result"]["completed"] == true);
  CHECK(doc["result"]["interaction_overhead"].is_number());
  CHECK(doc["result"]["interaction_overhead"].get<double>() > 0.0);
  CHECK(doc["config"]["seed"] == 7);
  CHECK(doc["result"]["agents"].size() == 16);
  const std::string trace = slurp(dir / "trace.csv");
  CHECK(trace.rfind("t,agent_id,x,y,vx,vy,action_id\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("run reports an incomplete deadlock") {
  const fs::path dir = scratch("deadlock");
  const Outcome o = cli({"run", "--scenario", "deadlock", "--policy", "orca", "--trace-every", "0",
                         "--out-dir", dir.string()});
  CHECK(o.code == 0);
  CHECK(o.out.find("incomplete") == 0);
  const auto doc = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(doc["result"]["completed"] == false);
  CHECK(doc["result"]["interaction_overhead"].is_null());
  CHECK_FALSE(fs::exists(dir / "trace.csv"));
  fs::remove_all(dir);
}

TEST_CASE("invalid input exits with status 2") {
  const Outcome unknown = cli({"run", "--scenario", "atlantis", "--out-dir", scratch("bad").string()});
  CHECK(unknown.code == navlearn::kExitInvalidInput);
  CHECK(unknown.err.find("congested") != std::string::npos);
  CHECK(cli({}).code == navlearn::kExitInvalidInput);
  CHECK(cli({"run", "--scenario", "incoming", "--gamma", "1.5"}).code == navlearn::kExitInvalidInput);
  CHECK(cli({"sweep", "--scenario", "congested", "--param", "gamma", "--values", ""}).code ==
        navlearn::kExitInvalidInput);
  CHECK(cli({"sweep", "--scenario", "congested", "--param", "speed", "--values", "1"}).code ==
        navlearn::kExitInvalidInput);
  CHECK(cli({"optimize", "--scenario", "incoming", "--iterations", "0"}).code ==
        navlearn::kExitInvalidInput);
  CHECK(cli({"batch", "--scenario", "incoming", "--seeds", "0"}).code == navlearn::kExitInvalidInput);
  CHECK(cli({"run", "--scenario-file", "/nonexistent/file.json"}).code ==
        navlearn::kExitInvalidInput);
}

TEST_CASE("batch of one seed equals the single run") {
  const fs::path a = scratch("batch1");
  const fs::path b = scratch("run1");
  REQUIRE(cli({"batch", "--scenario", "incoming", "--agents", "6", "--policy", "alan", "--seeds",
               "1", "--seed", "4", "--out-dir", a.string()})
              .code == 0);
  REQUIRE(cli({"run", "--scenario", "incoming", "--agents", "6", "--policy", "alan", "--seed", "4",
               "--trace-every", "0", "--out-dir", b.string()})
              .code == 0);
  const auto batch = nlohmann::json::parse(slurp(a / "summary.json"));
  const auto single = nlohmann::json::parse(slurp(b / "summary.json"));
  const auto &agg = batch["aggregates"][0];
  CHECK(agg["runs"] == 1);
  CHECK(agg["mean_overhead"].get<double>() ==
        doctest::Approx(single["result"]["interaction_overhead"].get<double>()).epsilon(1e-12));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("repeated batch produces identical files") {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  const std::vector<std::string> base = {"batch",    "--scenario", "incoming", "--agents", "6",
                                         "--policy", "alan",       "--policy", "orca",     "--seeds",
                                         "3"};
  std::vector<std::string> args_a = base, args_b = base;
  args_a.insert(args_a.end(), {"--out-dir", a.string()});
  args_b.insert(args_b.end(), {"--out-dir", b.string(), "--threads", "2"});
  REQUIRE(cli(args_a).code == 0);
  REQUIRE(cli(args_b).code == 0);
  for (const char *f : {"runs.csv", "aggregate.csv"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const std::string agg = slurp(a / "aggregate.csv");
  CHECK(agg.find("incoming") != std::string::npos);
  CHECK(std::count(agg.begin(), agg.end(), '\n') == 3);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("sweep and optimize write their outputs") {
  const fs::path s = scratch("sweep");
  REQUIRE(cli({"sweep", "--scenario", "incoming", "--agents", "4", "--param", "gamma", "--values",
               "0,0.4", "--seeds", "2", "--out-dir", s.string()})
              .code == 0);
  const std::string sweep = slurp(s / "sweep.csv");
  CHECK(sweep.rfind("param,value,", 0) == 0);
  CHECK(std::count(sweep.begin(), sweep.end(), '\n') == 3);
  fs::remove_all(s);

  const fs::path o = scratch("optimize");
  const Outcome r = cli({"optimize", "--scenario", "incoming", "--agents", "4", "--iterations", "3",
                         "--evals-start", "1", "--evals-end", "1", "--out-dir", o.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("initial F") != std::string::npos);
  const std::string chain = slurp(o / "chain.csv");
  CHECK(chain.rfind("iteration,F,accepted,set_size,temperature\n", 0) == 0);
  CHECK(std::count(chain.begin(), chain.end(), '\n') == 5);
  const auto actions = nlohmann::json::parse(slurp(o / "actions.json"));
  CHECK(actions.is_array());
  CHECK(actions.size() >= 1);
  fs::remove_all(o);
}
