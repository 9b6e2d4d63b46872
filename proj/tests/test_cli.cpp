#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fcba/cli.hpp"
#include "fcba/experiment_config.hpp"

using namespace fcba;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream o, e;
  args.insert(args.begin(), "fcba");
  const int code = run_cli(args, o, e);
  return {code, o.str(), e.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("fcba_cli_test_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

const char* kConfig = R"({
  "instance": {"generator": "stepping", "k": 4, "variance": "equal", "variance_value": 4},
  "policies": ["EA", "FCBA0", "LCFCBA0"],
  "budget": 40, "t0": 3, "macro_reps": 200, "seed": 5,
  "checkpoints": {"start": 20, "stop": 40, "step": 10},
  "posthoc": true
})";

}  // namespace

TEST_CASE("cli: approx prints per-term rows and a total") {
  const auto r = cli({"approx", "--means", "1,0", "-T", "64"});
  REQUIRE(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 3);
  CHECK(l[0] == "term_id,subset,rate,prefactor,value,critical_line");
  CHECK(l[1].rfind("1,1;2,0.125,0.5,", 0) == 0);
  CHECK(l[2].rfind("total,,,,", 0) == 0);

  const auto three = cli({"approx", "--means", "1,0.5,0", "--variances", "1,2,1", "-T", "200", "--variant",
                          "refined_k3", "--mc-draws", "20000", "--seed", "3"});
  REQUIRE(three.code == 0);
  CHECK(lines(three.out).back().rfind("total", 0) == 0);

  CHECK(cli({"approx", "--means", "1,0", "-T", "64", "--order", "3"}).code == 0);
  CHECK(cli({"approx", "--means", "1,0", "-T", "-1"}).code == kExitUsage);
  CHECK(cli({"approx", "--means", "1,0", "-T", "64", "--variant", "bogus"}).code == kExitUsage);
  CHECK(cli({"approx", "--means", "1,0", "-T", "64", "--ratios", "0.5"}).code == kExitUsage);
}

TEST_CASE("cli: solve rejects odd orders and reports residuals") {
  const auto bad = cli({"solve", "--means", "1,0.5,0", "-T", "100", "--order", "3"});
  CHECK(bad.code == kExitUsage);
  CHECK(bad.err.find("even order required") != std::string::npos);

  const auto ok = cli({"solve", "--means", "1,0.5,0", "-T", "100,1000", "--roa"});
  REQUIRE(ok.code == 0);
  const auto l = lines(ok.out);
  REQUIRE(l.size() == 4);
  CHECK(l[0] == "method,budget,p_1,p_2,p_3,score_spread,relative_score_spread,balance_gap");
  CHECK(l[3].rfind("roa,", 0) == 0);
}

TEST_CASE("cli: lowconf prints the critical-line flag for three alternatives") {
  const auto r = cli({"lowconf", "--means", "1,0.9,0", "--ratios", "0.2,0.2,0.6"});
  REQUIRE(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 5);
  CHECK((l[0] == "critical_line,true" || l[0] == "critical_line,false"));
  CHECK(l[1] == "subset,critical_point,rate,order,active_count,sibc,sibc_stderr");
  CHECK(l[2].rfind("1;2,0.94999999999999996,", 0) == 0);
  CHECK(l[4].rfind("1;2;3,", 0) == 0);
}

TEST_CASE("cli: oracle rows agree") {
  const auto r = cli({"oracle", "--means", "1,0", "--counts", "32,32", "--draws", "100000", "--seed", "1"});
  REQUIRE(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 4);
  CHECK(l[0] == "method,value,stderr");
  CHECK(l[1].rfind("exact,3.1671", 0) == 0);
  CHECK(l[2].rfind("quadrature,3.1671", 0) == 0);
  CHECK(l[3].rfind("monte_carlo,", 0) == 0);
  CHECK(cli({"oracle", "--means", "1,0", "--counts", "32"}).code == kExitUsage);
  CHECK(cli({"oracle", "--means", "1,0", "--counts", "32,32", "--subset", "5"}).code == kExitUsage);
}

TEST_CASE("cli: usage errors") {
  CHECK(cli({}).code == kExitUsage);
  std::ostringstream o, e;
  CHECK(run_cli({}, o, e) == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"--threads", "-1", "approx", "--means", "1,0", "-T", "10"}).code == kExitUsage);
}

TEST_CASE("cli: run writes byte-identical CSVs on rerun") {
  const auto dir = scratch("run");
  {
    std::ofstream(dir / "cfg.json") << kConfig;
  }
  const auto a = cli({"run", "-c", (dir / "cfg.json").string(), "-o", (dir / "a").string()});
  REQUIRE(a.code == 0);
  CHECK(a.out.find("FCBA0") != std::string::npos);
  const auto b = cli({"--threads", "2", "run", "-c", (dir / "cfg.json").string(), "-o", (dir / "b").string(), "-q"});
  REQUIRE(b.code == 0);
  CHECK(b.out.empty());
  CHECK(slurp(dir / "a" / "pcs_curve.csv") == slurp(dir / "b" / "pcs_curve.csv"));
  CHECK(slurp(dir / "a" / "summary.csv") == slurp(dir / "b" / "summary.csv"));

  const auto pcs = lines(slurp(dir / "a" / "pcs_curve.csv"));
  CHECK(pcs[0] == "policy,checkpoint,pcs,stderr,p_1,p_2,p_3,p_4");
  CHECK(pcs.size() == 1 + 3 * 3);
  const auto sum = lines(slurp(dir / "a" / "summary.csv"));
  CHECK(sum[0] == "policy,budget,pcs,stderr,true_best_ratio,mean_v0,sd_v0,mean_ldr,sd_ldr");
  CHECK(sum.size() == 4);

  const auto c = cli({"--seed", "6", "run", "-c", (dir / "cfg.json").string(), "-o", (dir / "c").string(), "-q"});
  REQUIRE(c.code == 0);
  CHECK(slurp(dir / "a" / "pcs_curve.csv") != slurp(dir / "c" / "pcs_curve.csv"));
}

TEST_CASE("cli: malformed config exits with a usage code naming the field") {
  const auto dir = scratch("bad");
  {
    std::ofstream(dir / "cfg.json") << R"({"instance": {"generator": "stepping", "k": 4}, "budget": 40, "macro_reps": 10})";
  }
  const auto r = cli({"run", "-c", (dir / "cfg.json").string(), "-o", (dir / "o").string()});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("policies") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(dir / "o"));
  CHECK(cli({"run", "-c", (dir / "missing.json").string(), "-o", (dir / "o").string()}).code == kExitUsage);
}

TEST_CASE("config parsing") {
  const auto c = parse_experiment_config(kConfig);
  CHECK(c.generator.k == 4);
  CHECK(c.generator.equal_variance == 4.0);
  CHECK(c.policies.size() == 3);
  CHECK(c.checkpoints == std::vector<std::int64_t>{20, 30, 40});
  CHECK(c.posthoc);
  CHECK(c.seed == 5);

  const auto alt = parse_experiment_config(R"({
    "instance": {"alternatives": [{"model": "gaussian", "mean": 1, "variance": 2}, {"model": "exponential", "mean": 0.5}]},
    "policies": ["EA"], "budget": 20, "macro_reps": 3, "checkpoints": [10, 20]})");
  REQUIRE(alt.instance.has_value());
  CHECK(alt.instance->size() == 2);
  CHECK(alt.instance->best_index() == 0);

  CHECK_THROWS_WITH_AS(parse_experiment_config(R"({"instance": {"generator": "stepping", "k": 4}, "policies": ["EA"],
    "budget": 40, "macro_reps": 10, "colour": 1})"), doctest::Contains("colour"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_experiment_config(R"({"instance": {"generator": "stepping", "k": 4}, "policies": ["XYZ"],
    "budget": 40, "macro_reps": 10})"), doctest::Contains("policies"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_experiment_config(R"({"instance": {"generator": "stepping", "k": 4}, "policies": ["EA"],
    "budget": 40.5, "macro_reps": 10})"), doctest::Contains("budget"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_experiment_config(R"({"instance": {"generator": "stepping", "k": 4}, "policies": ["EA"],
    "budget": 10, "macro_reps": 10})"), doctest::Contains("budget"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("{not json"), ConfigError);
}

TEST_CASE("cli: documented examples") {
  auto value_of = [](const std::string& row) { return std::stod(row.substr(row.rfind(",,,,") + 4)); };
  const auto e = lines(cli({"approx", "--means", "1,0", "-T", "64"}).out);
  CHECK(value_of(e.back()) == doctest::Approx(3.3457e-5).epsilon(1e-4));
  const auto l = lines(cli({"approx", "--means", "1,0", "-T", "64", "--variant", "ldr"}).out);
  CHECK(value_of(l.back()) == doctest::Approx(3.3546e-4).epsilon(1e-4));
  const auto r = lines(cli({"approx", "--means", "1,0.2,0", "-T", "100", "--variant", "refined_k3", "--mc-draws",
                            "2000"}).out);
  CHECK(r.back().substr(r.back().rfind(',')) == ",true");

  const auto s = lines(cli({"solve", "--means", "1,0,0", "--roa", "-T", "100"}).out);
  CHECK(s.back().rfind("roa,,0.414213562373095", 0) == 0);
  CHECK(s.back().find(",0.29289321881345") != std::string::npos);
}
