#include "cli.hpp"

#include "flapkin/mechanism_io.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

namespace flapkin {
namespace {

namespace fs = std::filesystem;
using test::data_path;

struct Result {
  int code = 0;
  std::string out, err;
};

Result run(std::initializer_list<std::string> args) {
  std::vector<std::string> store{"flapkin"};
  store.insert(store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : store) argv.push_back(s.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("flapkin_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string tmp(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, ValidateReference) {
  const Result r = run({"validate", data_path("reference_armwing.json").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("ok name=reference_armwing"), std::string::npos);
  EXPECT_NE(r.out.find("loops=5"), std::string::npos);
}

TEST_F(CliTest, NoArgumentsIsUsage) {
  const Result r = run({});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE((r.out + r.err).find("Usage"), std::string::npos);
}

TEST_F(CliTest, UnknownOptionIsUsage) {
  EXPECT_EQ(run({"sweep", "--bogus"}).code, 2);
  EXPECT_EQ(run({"sweep", "--mech", data_path("fourbar_demo.json").string(), "--mode", "sideways"}).code, 2);
}

TEST_F(CliTest, HelpIsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST_F(CliTest, BrokenSweepNamesPhase) {
  LinkageSpec s = parse_mechanism_file(data_path("reference_armwing.json"));
  for (auto& l : s.links)
    if (l.id == "coupler4") l.length = 45.0;
  write_mechanism_file(s, tmp("broken.json"));
  const Result r = run({"sweep", "--mech", tmp("broken.json"), "-n", "360"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("code=NotAssemblable"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("phase_deg="), std::string::npos) << r.err;
}

TEST_F(CliTest, MissingFileIsError) {
  const Result r = run({"validate", tmp("nothing.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("code=IoError"), std::string::npos) << r.err;
}

TEST_F(CliTest, SolveRocker) {
  const Result r = run({"solve", "--mech", data_path("fourbar_demo.json").string(), "--phi", "90"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("80.2569"), std::string::npos) << r.out;
}

TEST_F(CliTest, SweepToFileMatchesStdout) {
  const std::string mech = data_path("fourbar_demo.json").string();
  const Result a = run({"sweep", "--mech", mech, "-n", "36"});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(run({"sweep", "--mech", mech, "-n", "36", "-o", tmp("s.csv")}).code, 0);
  EXPECT_EQ(read_text_file(tmp("s.csv")), a.out);
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 37);
}

TEST_F(CliTest, TargetCsv) {
  const Result r = run({"target", "-n", "8"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("phi_deg,theta_s_deg,theta_e_deg", 0), 0u);
  EXPECT_NE(r.out.find("\n0,-10,131.780972451,"), std::string::npos) << r.out;
}

TEST_F(CliTest, Material) {
  Result r = run({"material", "--check", "--strain", "43", "--material", "FLX9870"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("result=pass"), std::string::npos);
  r = run({"material", "--check", "--strain", "130", "--material", "FLX9870"});
  EXPECT_NE(r.out.find("result=fail"), std::string::npos);
  r = run({"material", "--stretch", "1.43", "--material", "FLX9870"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0.6279"), std::string::npos) << r.out;
  EXPECT_EQ(run({"material", "--check", "--strain", "43", "--material", "FLX0000"}).code, 1);
}

TEST_F(CliTest, OptimizeIsDeterministic) {
  const std::string mech = data_path("fourbar_demo.json").string();
  for (const char* name : {"a.json", "b.json"}) {
    const Result r = run({"optimize", "--mech", mech, "--stage", "humerus", "--multistarts", "2", "--seed", "3", "-n", "36",
                       "-o", tmp(name)});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(read_text_file(tmp("a.json")), read_text_file(tmp("b.json")));
  EXPECT_EQ(read_text_file(tmp("a.mechanism.json")), read_text_file(tmp("b.mechanism.json")));
  // the fitted file is a valid mechanism
  EXPECT_EQ(run({"validate", tmp("a.mechanism.json")}).code, 0);
}

TEST_F(CliTest, OptimizeNeedsElbowForStagedFit) {
  const Result r = run({"optimize", "--mech", data_path("fourbar_demo.json").string(), "-n", "36"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("code=InvalidArgument"), std::string::npos);
}

TEST_F(CliTest, PlotBothKinds) {
  const std::string mech = data_path("fourbar_demo.json").string();
  const Result p = run({"plot", "--mech", mech, "--kind", "path", "-n", "36"});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(p.out.rfind("<svg", 0), 0u);
  ASSERT_EQ(run({"sweep", "--mech", mech, "-n", "36", "-o", tmp("t.csv")}).code, 0);
  const Result a = run({"plot", "--trajectory", tmp("t.csv"), "--kind", "angles", "--with-targets", "-o", tmp("a.svg")});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NE(read_text_file(tmp("a.svg")).find("<polyline"), std::string::npos);
}

TEST_F(CliTest, SensitivityRange) {
  const Result r = run({"sensitivity", "--mech", data_path("fourbar_demo.json").string(), "--param", "coupler.length",
                     "--range", "0.9:1.1:0.1", "-n", "36", "--svg", tmp("f.svg")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\n1,ok,,0\n"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(tmp("f.svg")));
}

}  // namespace
}  // namespace flapkin
