#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("ncq_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Run run(const std::string& args, const fs::path& dir) {
  const auto log = dir / "stdout.txt";
  const std::string cmd = std::string(NCQ_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, AlgebraVerifyDefaultAndMoyal) {
  const auto d = scratch("algebra");
  EXPECT_EQ(run("--out " + (d / "a").string() + " algebra-verify", d).code, 0);
  EXPECT_TRUE(fs::exists(d / "a" / "algebra.json"));
  EXPECT_EQ(run("--params omega1=0,omega2=0 --out " + (d / "m").string() + " algebra-verify", d).code, 0);
}

TEST(Cli, IdentityFailureExitsOne) {
  const auto d = scratch("nested");
  EXPECT_EQ(run("--convention nested --out " + d.string() + " algebra-verify", d).code, 1);
}

TEST(Cli, UsageErrorsExitTwo) {
  const auto d = scratch("usage");
  std::ofstream(d / "bad.cfg") << "theta = nonsense\n";
  EXPECT_EQ(run("--config " + (d / "bad.cfg").string() + " algebra-verify", d).code, 2);
  EXPECT_EQ(run("--params theta=0 --out " + d.string() + " transform-verify", d).code, 2);
  EXPECT_EQ(run("--order 0 algebra-verify", d).code, 2);
  EXPECT_EQ(run("--tol -1 algebra-verify", d).code, 2);
  EXPECT_EQ(run("--format xml algebra-verify", d).code, 2);
  EXPECT_EQ(run("", d).code, 2);
  EXPECT_EQ(run("frobnicate", d).code, 2);
  EXPECT_EQ(run("spectrum --e1 1", d).code, 2);
  EXPECT_EQ(run("--out " + d.string() + " spectrum --e1 0 --n 1", d).code, 2);
  EXPECT_EQ(run("--out " + d.string() + " residuals --which bogus", d).code, 2);
  std::ofstream(d / "empty.cfg") << "grid.ode2 = 0:1:0\n";
  EXPECT_EQ(run("--config " + (d / "empty.cfg").string() + " --out " + d.string() + " residuals --which ode2", d).code,
            2);
  EXPECT_EQ(run("--help", d).code, 0);
}

TEST(Cli, TransformVerifyGeneralTiltSkipsSpectralChecks) {
  const auto d = scratch("tilt");
  const auto r = run("--params omega1=1,omega2=1 --out " + d.string() + " transform-verify", d);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("[SKIP] transform.factorization"), std::string::npos);
  EXPECT_EQ(run("--out " + d.string() + " transform-verify", d).code, 0);
}

TEST(Cli, HamiltonianCompareWritesDiff) {
  const auto d = scratch("ham");
  ASSERT_EQ(run("--out " + d.string() + " hamiltonian-expand --compare", d).code, 0);
  const auto j = nlohmann::json::parse(slurp(d / "hamiltonian.json"));
  EXPECT_TRUE(j["data"].contains("comparison"));
  EXPECT_TRUE(j["data"]["comparison"]["him"].empty());
  ASSERT_EQ(run("--out " + d.string() + " hamiltonian-expand", d).code, 0);
  EXPECT_FALSE(nlohmann::json::parse(slurp(d / "hamiltonian.json"))["data"].contains("comparison"));
}

TEST(Cli, SpectrumTables) {
  const auto d = scratch("spectrum");
  ASSERT_EQ(run("--format both --out " + d.string() + " spectrum --e1 1 --n 0", d).code, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(d / "spectrum.json"))["E"], 1.5);
  ASSERT_EQ(run("--out " + d.string() + " spectrum --e1 1 --n 1", d).code, 0);
  const auto psi2 = nlohmann::json::parse(slurp(d / "spectrum.json"))["psi2"];
  ASSERT_EQ(psi2.size(), 121u);
  for (std::size_t k = 0; k < psi2.size(); ++k) {
    const double a = psi2[k][1], b = psi2[psi2.size() - 1 - k][1];
    EXPECT_NEAR(a, -b, 1e-15);
  }
  const std::string csv = slurp(d / "spectrum_psi1.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "xt1,psi1");
}

TEST(Cli, ResidualsAssertOnlyOscillator) {
  const auto d = scratch("residuals");
  const auto r = run("--format both --out " + d.string() + " residuals", d);
  EXPECT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(slurp(d / "residuals.json"));
  for (const char* key : {"im", "real", "realnew", "ode1", "ode2", "ode1ConventionScan"}) EXPECT_TRUE(j.contains(key));
  EXPECT_TRUE(fs::exists(d / "residual_ode2_n10.csv"));
}

TEST(Cli, ReportsAreByteIdentical) {
  const auto d = scratch("determinism");
  for (const char* sub : {"algebra-verify", "transform-verify", "hamiltonian-expand --compare", "residuals"}) {
    ASSERT_NE(run("--out " + (d / "a").string() + " " + sub, d).code, 2);
    ASSERT_NE(run("--out " + (d / "b").string() + " " + sub, d).code, 2);
  }
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(d / "a")) {
    EXPECT_EQ(slurp(e.path()), slurp(d / "b" / e.path().filename())) << e.path();
    ++compared;
  }
  EXPECT_EQ(compared, 4u);
}
