#include <gtest/gtest.h>
#include <sys/wait.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string output;
};

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("gaudin_cli_test_" + std::to_string(::getpid())) / name;
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run lab(const std::string& args, const std::string& name) {
  auto dir = scratch(name);
  auto log = dir / "console.txt";
  std::string cmd = std::string(GAUDIN_LAB) + " " + args + " --out " + dir.string() + " > " + log.string() + " 2>&1";
  int st = std::system(cmd.c_str());
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, slurp(log)};
}

fs::path write_config(const std::string& name, const std::string& text) {
  auto p = scratch("configs") / (name + ".yaml");
  std::ofstream(p) << text;
  return p;
}

std::string config(const std::string& name) { return std::string(CONFIG_DIR) + "/" + name + ".yaml"; }

json report(const std::string& name) { return json::parse(slurp(scratch(name) / "report.json")); }

}  // namespace

TEST(Cli, CommuteCheckExact) {
  auto r = lab("commute-check --config " + config("sl2_three_points"), "commute");
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("all commutators zero (exact)"), std::string::npos);
  auto j = report("commute");
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["verdict"], "pass");
  EXPECT_EQ(j["results"]["field"], "exact");
  EXPECT_TRUE(j.contains("config_hash") && j.contains("library_version") && j.contains("wall_time_s"));
  EXPECT_TRUE(fs::exists(scratch("commute") / "commutators.csv"));
}

TEST(Cli, HermiticityRefusal) {
  auto r = lab("spectrum --config " + config("complex_points"), "refusal");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("Hermiticity unavailable for non-real parameters"), std::string::npos) << r.output;
  EXPECT_FALSE(fs::exists(scratch("refusal") / "report.json"));
}

TEST(Cli, NonHermitianSpectrumWithoutFlag) {
  auto c = write_config("complex_free", "weights: [1, 1, 1]\npoints: [0, 1+1/2i, 3]\n");
  auto r = lab("spectrum --config " + c.string(), "generic");
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(report("generic")["results"]["method"], "generic");
}

TEST(Cli, BijectionTable) {
  auto r = lab("bijection-count --config " + config("bijection_1111"), "bijection");
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("1/1, 3/3, 2/2"), std::string::npos) << r.output;
  auto csv = slurp(scratch("bijection") / "sectors.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "nu,m,singular_dim,eigen_count,bethe_count,matched,incomplete");
}

TEST(Cli, DeterministicReports) {
  auto first = lab("bethe --config " + config("bijection_1111") + " --threads 1", "det1");
  auto second = lab("bethe --config " + config("bijection_1111") + " --threads 1", "det2");
  ASSERT_EQ(first.code, 0) << first.output;
  ASSERT_EQ(second.code, 0) << second.output;
  auto a = report("det1"), b = report("det2");
  a.erase("wall_time_s");
  b.erase("wall_time_s");
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(slurp(scratch("det1") / "bethe_roots.csv"), slurp(scratch("det2") / "bethe_roots.csv"));

  auto other = lab("bethe --config " + config("bijection_1111") + " --threads 1 --seed 8", "det3");
  EXPECT_NE(report("det3")["config_hash"], a["config_hash"]);
  EXPECT_EQ(report("det3")["seed"], 8);
}

TEST(Cli, ReportRederivesItself) {
  ASSERT_EQ(lab("cyclicity --config " + config("twisted_full"), "echo1").code, 0);
  auto j = report("echo1");
  auto c = write_config("echoed", j["config"].get<std::string>());
  ASSERT_EQ(lab("cyclicity --config " + c.string(), "echo2").code, 0);
  auto k = report("echo2");
  EXPECT_EQ(j["config_hash"], k["config_hash"]);
  EXPECT_EQ(j["results"].dump(), k["results"].dump());
}

TEST(Cli, OperationalErrors) {
  auto bad = write_config("coincident", "weights: [1, 1]\npoints: [0, 0/3]\n");
  auto r = lab("spectrum --config " + bad.string(), "coincident");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("line 2"), std::string::npos) << r.output;
  EXPECT_EQ(lab("spectrum --config /nonexistent.yaml", "missing").code, 1);
  EXPECT_EQ(lab("frobnicate --config " + config("sl2_three_points"), "unknown").code, 1);
  EXPECT_EQ(lab("limit --config " + config("sl3_defining"), "wrongalg").code, 1);
  auto twisted = write_config("twisted_sing", "weights: [1, 1]\npoints: [0, 1]\nmu: h\n");
  auto t = lab("cyclicity --config " + twisted.string(), "twisted_sing");
  EXPECT_EQ(t.code, 1);
  EXPECT_NE(t.output.find("subspace: full"), std::string::npos) << t.output;
}

TEST(Cli, DefiningModules) {
  for (const char* c : {"commute-check", "cyclicity", "spectrum"}) {
    auto r = lab(std::string(c) + " --config " + config("sl3_defining"), std::string("sl3_") + c);
    EXPECT_EQ(r.code, 0) << c << ": " << r.output;
  }
}

TEST(Cli, FailedVerdictExitsTwo) {
  // without a twist the algebra commutes with the diagonal sl2, so the triplet
  // inside V_1 x V_1 cannot be reached from a single vector
  auto c = write_config("cyclic_fail", "weights: [1, 1]\npoints: [0, 1]\nsubspace: full\n");
  auto r = lab("cyclicity --config " + c.string(), "cycfail");
  EXPECT_EQ(r.code, 2) << r.output;
  EXPECT_EQ(report("cycfail")["verdict"], "fail");
}
