#include "doctest.h"

#include "ordertope/cli.hpp"
#include "ordertope/io.hpp"
#include "support/fixtures.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ordertope;
using io::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ordertope_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

const std::string kToy = "name,x,y\nA,1,0\nB,0,1\nC,0.4,0.4\n";

}  // namespace

TEST_CASE("envelope on the toy file lists two vertices") {
  TempDir dir;
  write(dir / "toy.csv", kToy);
  auto r = run_cli({"envelope", "--k", "1", "--scores", dir / "toy.csv", "--out", dir / "env.json"});
  REQUIRE(r.code == 0);
  auto j = io::read_json(dir / "env.json");
  REQUIRE(j["vertices"].size() == 2);
  std::set<std::string> tops;
  for (const auto& v : j["vertices"]) tops.insert(v["prefix_names"][0].get<std::string>());
  CHECK(tops == std::set<std::string>{"A", "B"});
  CHECK(r.out.find("vertices=2") != std::string::npos);

  auto g = run_cli({"envelope", "--k", "2", "--alpha-mode", "geometric", "--scores", dir / "toy.csv", "--out",
                dir / "env2.json"});
  REQUIRE(g.code == 0);
  CHECK(io::read_json(dir / "env2.json")["config"]["alpha"] == json::array({"4", "2"}));
}

TEST_CASE("sample, intervals and pairwise chain") {
  TempDir dir;
  write(dir / "toy.csv", kToy);
  auto a = run_cli({"sample", "--scores", dir / "toy.csv", "--samples", "5000", "--seed", "42", "--threads", "2", "--out",
                dir / "t1.json"});
  REQUIRE(a.code == 0);
  CHECK(a.out.find("seed=42") != std::string::npos);
  auto b = run_cli({"sample", "--scores", dir / "toy.csv", "--samples", "5000", "--seed", "42", "--threads", "1", "--out",
                dir / "t2.json"});
  REQUIRE(b.code == 0);
  CHECK(slurp(dir / "t1.json") == slurp(dir / "t2.json"));
  auto tally = io::read_json(dir / "t1.json");
  CHECK(tally["samples"] == 5000);
  CHECK(tally["seed"] == 42);

  REQUIRE(run_cli({"intervals", "--tally", dir / "t1.json", "--coverage", "0.9", "--out", dir / "iv.json"}).code == 0);
  auto iv = io::read_json(dir / "iv.json");
  CHECK(iv["coverage"] == "0.9");
  CHECK(iv["entities"][2]["name"] == "C");

  REQUIRE(run_cli({"pairwise", "--tally", dir / "t1.json", "--out", dir / "pw.json"}).code == 0);
  auto pw = io::read_json(dir / "pw.json");
  CHECK(pw["wins"][0][1].get<std::uint64_t>() + pw["wins"][1][0].get<std::uint64_t>() == 5000);

  REQUIRE(run_cli({"sample", "--scores", dir / "toy.csv", "--samples", "100", "--no-pairwise", "--out", dir / "t3.json"})
              .code == 0);
  CHECK(run_cli({"pairwise", "--tally", dir / "t3.json", "--out", dir / "pw3.json"}).code == cli::kExitFailure);
}

TEST_CASE("simulate writes a report with the mean width") {
  TempDir dir;
  auto r = run_cli({"simulate", "--n", "10", "--d", "3", "--p", "1", "--trials", "2", "--samples", "300", "--threads", "1",
                "--out", dir / "sim.json"});
  REQUIRE(r.code == 0);
  auto j = io::read_json(dir / "sim.json");
  CHECK(j["overall_mean"] == 1.0);
  CHECK(j["config"]["seed"] == 1);
  CHECK(run_cli({"simulate", "--p", "2", "--out", dir / "bad.json"}).code == cli::kExitFailure);
}

TEST_CASE("reverse with a control category") {
  TempDir dir;
  std::mt19937_64 rng(21);
  auto truth = fixtures::random_matrix(rng, 12, 4, 0, 1000, 10);
  auto data = reverse::publish(truth, {Rational(2, 5), Rational(3, 10), Rational(1, 5), Rational(1, 10)},
                               {true, false, false, true});
  io::write_published_csv(dir / "pub.csv", data);
  auto r = run_cli({"reverse", "--published", dir / "pub.csv", "--weights", "0.4,0.3,0.2,0.1", "--epsilon", "0.01",
                "--control", "c3", "--trials", "500", "--out", dir / "est.csv", "--report", dir / "rep.json"});
  REQUIRE(r.code == 0);
  auto est = io::read_scores_csv(dir / "est.csv");
  CHECK(est.names == truth.names);
  for (std::size_t i = 0; i < 12; ++i) CHECK(est.rows[i][0] == truth.rows[i][0]);
  auto rep = io::read_json(dir / "rep.json");
  CHECK(rep["unknown_categories"] == json::array({"c1", "c2", "c3"}));
  CHECK(rep["residual_violations"].empty());
  CHECK(rep["control"]["category"] == "c3");
  CHECK(rep["control"]["trials"] == 500);
  CHECK(r.out.find("control=c3") != std::string::npos);

  CHECK(run_cli({"reverse", "--published", dir / "pub.csv", "--weights", "0.4,0.3,0.2,0.1", "--control", "c1", "--out",
             dir / "x.csv"})
            .code == cli::kExitUsage);
  auto infeasible = run_cli({"reverse", "--published", dir / "pub.csv", "--weights", "0.4,0.3,0.2,0.1", "--epsilon", "90",
                         "--out", dir / "x.csv"});
  CHECK(infeasible.code == cli::kExitFailure);
  CHECK(infeasible.err.find("error:") == 0);
}

TEST_CASE("bundle assembly") {
  TempDir dir;
  write(dir / "toy.csv", kToy);
  REQUIRE(run_cli({"envelope", "--k", "2", "--scores", dir / "toy.csv", "--out", dir / "env2.json"}).code == 0);
  REQUIRE(run_cli({"sample", "--scores", dir / "toy.csv", "--samples", "1000", "--out", dir / "t.json"}).code == 0);
  auto r = run_cli({"bundle", "--scores", dir / "toy.csv", "--envelope", dir / "env2.json", "--k", "1", "--tally",
                dir / "t.json", "--weights", "1,1", "--out", dir / "b.json"});
  REQUIRE(r.code == 0);
  auto b = io::bundle_from_json(io::read_json(dir / "b.json"));
  REQUIRE(b.envelopes.size() == 2);
  CHECK(b.envelopes[0].config.k == 1);
  CHECK(b.envelopes[1].config.k == 2);
  CHECK(b.tally->samples == 1000);
  CHECK(b.extra["tally_seed"] == 1);

  write(dir / "other.csv", "name,x,y\nA,1,0\nB,0,1\nD,0.4,0.4\n");
  CHECK(run_cli({"bundle", "--scores", dir / "other.csv", "--tally", dir / "t.json", "--out", dir / "b2.json"}).code ==
        cli::kExitFailure);
}

TEST_CASE("config sidecar supplies flags the command line omits") {
  TempDir dir;
  write(dir / "toy.csv", kToy);
  write(dir / "cfg.json", json{{"scores", dir / "toy.csv"}, {"k", 2}, {"out", dir / "from_config.json"}}.dump());
  REQUIRE(run_cli({"envelope", "--config", dir / "cfg.json"}).code == 0);
  CHECK(io::read_json(dir / "from_config.json")["config"]["k"] == 2);
  REQUIRE(run_cli({"envelope", "--config", dir / "cfg.json", "--k", "1"}).code == 0);
  CHECK(io::read_json(dir / "from_config.json")["config"]["k"] == 1);
  CHECK(run_cli({"envelope", "--config", dir / "missing.json"}).code == cli::kExitUsage);
}

TEST_CASE("usage and input errors") {
  TempDir dir;
  write(dir / "toy.csv", kToy);
  write(dir / "bad.csv", "name,x\nA,1\nB,oops\n");
  CHECK(run_cli({}).code == cli::kExitUsage);
  CHECK(run_cli({"frobnicate"}).code == cli::kExitUsage);
  auto unknown = run_cli({"envelope", "--k", "1", "--scores", dir / "toy.csv", "--out", dir / "e.json", "--bogus"});
  CHECK(unknown.code == cli::kExitUsage);
  CHECK_FALSE(unknown.err.empty());
  CHECK(run_cli({"envelope", "--k", "1", "--scores", dir / "none.csv", "--out", dir / "e.json"}).code == cli::kExitUsage);
  CHECK(run_cli({"envelope", "--scores", dir / "toy.csv", "--out", dir / "e.json"}).code == cli::kExitUsage);
  auto malformed = run_cli({"envelope", "--k", "1", "--scores", dir / "bad.csv", "--out", dir / "e.json"});
  CHECK(malformed.code == cli::kExitFailure);
  CHECK(malformed.err.find(":3: column 2 (x): malformed number 'oops'") != std::string::npos);
  CHECK(run_cli({"envelope", "--k", "1", "--alpha-mode", "cubic", "--scores", dir / "toy.csv", "--out", dir / "e.json"})
            .code == cli::kExitUsage);
  CHECK(run_cli({"reverse", "--published", dir / "toy.csv", "--weights", "1", "--trials", "5", "--out", dir / "x.csv"})
            .code == cli::kExitUsage);
  CHECK(run_cli({"envelope", "--help"}).code == cli::kExitOk);
}
