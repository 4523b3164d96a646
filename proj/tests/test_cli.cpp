#include "support.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <sys/wait.h>

using slice::testing::corpus_path;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

// Runs the CLI through the shell; stdout is captured, stderr discarded.
Outcome run(const std::string& args) {
  std::string cmd = std::string(SLICE_CLI) + " " + args + " 2>/dev/null";
  Outcome o;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return o;
  std::array<char, 4096> buf;
  while (auto n = fread(buf.data(), 1, buf.size(), p)) o.out.append(buf.data(), n);
  int status = pclose(p);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::string c(const std::string& rel) { return "'" + corpus_path(rel) + "'"; }

}  // namespace

TEST(Cli, Typecheck) {
  auto ok = run("typecheck " + c("cut_choose.slice"));
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("well-formed"), std::string::npos);
  auto bad = run("typecheck " + c("ill_typed/surplus_divides_twice.slice"));
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("p"), std::string::npos);
}

TEST(Cli, PathsCount) {
  auto r = run("paths " + c("selfridge_conway_full.slice"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("1800"), std::string::npos);
  auto j = nlohmann::json::parse(run("paths --json " + c("waste_makes_haste_3.slice")).out);
  EXPECT_EQ(j["paths"], 24);
}

TEST(Cli, VerifyExitCodes) {
  EXPECT_EQ(run("verify " + c("cut_choose.slice")).code, 0);
  EXPECT_EQ(run("verify " + c("bad/cut_choose_agent1_chooses.slice")).code, 1);
  EXPECT_EQ(run("verify " + c("ill_typed/surplus_divides_twice.slice")).code, 1);
  EXPECT_EQ(run("verify " + c("stretch/aziz_mackenzie_3.slice")).code, 64);
  EXPECT_EQ(run("verify --solver /nonexistent/solver " + c("cut_choose.slice")).code, 2);
  EXPECT_EQ(run("frobnicate").code, 64);
  EXPECT_EQ(run("verify /nonexistent.slice").code, 64);
}

TEST(Cli, VerifyJsonAndReplay) {
  auto dir = std::filesystem::temp_directory_path() / ("slice_cli_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  auto cex = (dir / "cex.json").string();
  auto r = run("verify --json --cex-out '" + cex + "' " + c("bad/surplus_unsafe_trim.slice"));
  EXPECT_EQ(r.code, 1);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["verdict"], "Invalid");
  EXPECT_EQ(j["nonlinear_vcs"], 0);
  EXPECT_TRUE(j.contains("counterexample"));
  EXPECT_EQ(run("replay " + c("bad/surplus_unsafe_trim.slice") + " '" + cex + "'").code, 1);
  // The fixed protocol takes the same valuations without envy.
  EXPECT_EQ(run("replay " + c("surplus.slice") + " '" + cex + "'").code, 0);
  std::filesystem::remove_all(dir);
}

TEST(Cli, SeededSimulationIsDeterministic) {
  auto a = run("simulate --seed 7 " + c("selfridge_conway_full.slice"));
  auto b = run("simulate --seed 7 " + c("selfridge_conway_full.slice"));
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(a.out.empty());
}

TEST(Cli, CompileWritesScripts) {
  auto dir = std::filesystem::temp_directory_path() / ("slice_vcs_" + std::to_string(::getpid()));
  auto r = run("compile --out '" + dir.string() + "' " + c("cut_choose.slice"));
  EXPECT_EQ(r.code, 0);
  int n = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".smt2") ++n;
  EXPECT_EQ(n, 2);
  std::filesystem::remove_all(dir);
}
