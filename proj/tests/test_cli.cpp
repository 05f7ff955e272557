#include "phb/trace.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run(const std::string& args, const std::string& env = {}) {
  const std::string cmd = env + (env.empty() ? "" : " ") + PHB_CLI + std::string(" ") + args + " 2>/dev/null";
  CliResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(PHB_TEST_DATA) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("phb_cli_" + name);
  std::ofstream(path) << content;
  return path.string();
}

bool contains(const std::string& s, const std::string& what) { return s.find(what) != std::string::npos; }

}  // namespace

TEST(Cli, VerifySingleIdentity) {
  const CliResult r = run("verify 2.3");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "PASS 2.3")) << r.out;
}

TEST(Cli, VerifyAllJson) {
  const CliResult r = run("--json verify all");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("results").size(), 17u);
  for (const auto& x : j.at("results")) EXPECT_EQ(x.at("status"), "PASS") << x.at("id");
}

TEST(Cli, VerifyPrintsTheTorsionfulResidual) {
  const CliResult r = run("verify 3.5");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "direct residual: ")) << r.out;
}

TEST(Cli, VerifyMutate) {
  const CliResult r = run("verify 2.3 2.9 --mutate");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(contains(r.out, "FAIL (killed")) << r.out;
}

TEST(Cli, UnknownIdAndBadCorpusAreErrors) {
  EXPECT_EQ(run("verify 9.9").code, 2);
  EXPECT_EQ(run("--corpus /nonexistent verify all").code, 2);
  EXPECT_EQ(run("verify all", "PHB_CORPUS=" + temp_file("bad.corpus", "[a]\nexpr x: f +* R\n")).code, 2);
  EXPECT_EQ(run("").code, 2);
}

TEST(Cli, BrokenCorpusIdentityFails) {
  const std::string path = temp_file("broken.corpus", "[2.9]\ntitle: t\nlatex: x\nexpr rhs: f_{11} + 2*i*A11*f\n");
  const CliResult r = run("--corpus " + path + " verify 2.9");
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_TRUE(contains(r.out, "FAIL 2.9"));
}

TEST(Cli, CheckSphereCorollaryC) {
  const CliResult r = run("--json check " + data("sphere.json") + " --cond corollaryC");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  const auto& c = j.at("points").at(0).at("conditions").at("corollaryC");
  EXPECT_EQ(c.at("value").get<double>(), 20);
  EXPECT_TRUE(c.at("pass").get<bool>());
}

TEST(Cli, CheckTheoremB) {
  const CliResult r = run("--json check " + data("sphere.json") + " --cond thm-b,3.11,3.12");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  const auto& conds = j.at("points").at(0).at("conditions");
  EXPECT_TRUE(conds.at("thm-b").at("pass").get<bool>());
  EXPECT_DOUBLE_EQ(conds.at("3.11").at("value").get<double>(), 0.375);
  EXPECT_NEAR(conds.at("3.12").at("value").get<double>(), 83.0 / 9216, 1e-15);
}

TEST(Cli, CheckMixedPoints) {
  const CliResult r = run("check " + data("points.json") + " --cond thm-a --cond bianchi");
  EXPECT_EQ(r.code, 1);  // only the negative point satisfies Theorem A (a)
  EXPECT_TRUE(contains(r.out, "point negative")) << r.out;
  const CliResult c = run("check " + data("points.json") + " --cond corollaryC");
  EXPECT_EQ(c.code, 1);
  EXPECT_TRUE(contains(c.out, "requires A11 = 0")) << c.out;
}

TEST(Cli, CheckInputErrors) {
  EXPECT_EQ(run("check " + temp_file("empty.json", "") + " --cond 3.11").code, 2);
  EXPECT_EQ(run("check " + temp_file("emptyarr.json", "[]") + " --cond 3.11").code, 2);
  EXPECT_EQ(run("check " + data("sphere.json") + " --cond nosuch").code, 2);
  EXPECT_EQ(run("check /nonexistent.json --cond 3.11").code, 2);
}

TEST(Cli, ScaleTest) {
  const CliResult r = run("--json scaletest " + data("points.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("runs").size(), 16u);
  const CliResult k = run("scaletest " + data("sphere.json") + " --k 1/7,5");
  EXPECT_EQ(k.code, 0);
  EXPECT_EQ(run("scaletest " + data("sphere.json") + " --k 0").code, 2);
  EXPECT_EQ(run("scaletest " + data("sphere.json") + " --k abc").code, 2);
}

TEST(Cli, EquivSmall) {
  const CliResult r = run("--json equiv --samples 3000 --matrices 500 --exact 100");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.at("pass").get<bool>());
}

TEST(Cli, SeedPrecedence) {
  const std::string args = "--json equiv --samples 500 --matrices 50 --exact 10";
  const CliResult a = run("--seed 5 " + args), b = run("--seed 6 " + args);
  const CliResult c = run("--seed 6 " + args, "PHB_SEED=5");
  EXPECT_EQ(a.code, 0);
  EXPECT_NE(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
  EXPECT_EQ(run("--seed 5 " + args).out, a.out);
  EXPECT_EQ(run(args, "PHB_SEED=x").code, 2);
}

TEST(Cli, TraceExportReplays) {
  const CliResult r = run("--json trace 2.8.ibp");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  const phb::RewriteTrace t = phb::trace_from_json(j.at("steps"));
  EXPECT_FALSE(t.steps.empty());
  EXPECT_TRUE(phb::replay(t).ok);
  const CliResult text = run("trace 2.7");
  EXPECT_TRUE(contains(text.out, "replay: ok")) << text.out;
}

TEST(Cli, OpsListing) {
  const CliResult r = run("ops");
  EXPECT_EQ(r.code, 0);
  for (const char* k : {"DJ ", "DJstar ", "DQJ ", "Q11 ", "bianchi ", "L_i_s3 "}) EXPECT_TRUE(contains(r.out, k)) << k;
}
