#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_configs.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::path(TRAPWAVE_TEST_WORKDIR) / "e2e";

int run(const std::string& args) {
  const std::string cmd = std::string("SOURCE_DATE_EPOCH=1700000000 \"") + TRAPWAVE_EXE + "\" " + args +
                          " >\"" + (kWork / "last.log").string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kWork);
  const fs::path p = kWork / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
  fs::create_directories(kWork);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("bands"), 2);
  EXPECT_EQ(run("bands --config \"" + write_config("empty.yaml", "").string() + "\""), 2);
  EXPECT_NE(read_file(kWork / "last.log").find("geometry"), std::string::npos);
  EXPECT_EQ(run("bands --config \"" + (kWork / "missing.yaml").string() + "\""), 2);
}

TEST(Cli, VersionAndHelp) {
  EXPECT_EQ(run("--version"), 0);
  EXPECT_NE(read_file(kWork / "last.log").find("0.1.0"), std::string::npos);
  EXPECT_EQ(run("--help"), 0);
}

TEST(Cli, DispersionRunWritesCsv) {
  const fs::path out = kWork / "disp";
  fs::remove_all(out);
  const fs::path cfg = write_config("quick.yaml", tw_test::quick_ref2_yaml((kWork / "unused").string()));
  ASSERT_EQ(run("dispersion --quiet --config \"" + cfg.string() + "\" --out \"" + out.string() + "\""), 0)
      << read_file(kWork / "last.log");
  const std::string csv = read_file(out / "dispersion.csv");
  EXPECT_NE(csv.find("zeta,M1,ess,trapped,M2"), std::string::npos);
  const std::string summary = read_file(out / "summary.json");
  EXPECT_NE(summary.find("0.6168502750680849"), std::string::npos);
}

TEST(Cli, RerunsAreByteIdentical) {
  const fs::path cfg = write_config("quick.yaml", tw_test::quick_ref2_yaml((kWork / "unused").string()));
  const fs::path a = kWork / "rerun_a", b = kWork / "rerun_b";
  fs::remove_all(a);
  fs::remove_all(b);
  ASSERT_EQ(run("all --quiet --threads 4 --config \"" + cfg.string() + "\" --out \"" + a.string() + "\""), 0)
      << read_file(kWork / "last.log");
  ASSERT_EQ(run("all --quiet --threads 4 --config \"" + cfg.string() + "\" --out \"" + b.string() + "\""), 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    EXPECT_EQ(read_file(e.path()), read_file(b / e.path().filename())) << e.path().filename();
  }
  EXPECT_GE(files, 8u);
  EXPECT_EQ(run("check \"" + a.string() + "\""), 0) << read_file(kWork / "last.log");
  const fs::path plots = kWork / "plots";
  EXPECT_EQ(run("export --from \"" + a.string() + "\" --kind dispersion --out \"" + plots.string() + "\""), 0);
  EXPECT_TRUE(fs::exists(plots / "dispersion_plot.csv"));
}

TEST(Cli, ExhaustedSolverExitsThree) {
  const fs::path cfg = write_config("strict.yaml", tw_test::quick_ref2_yaml((kWork / "strict").string()) +
                                                       "solver:\n  tolerance: 1.0e-300\n  max_restarts: 2\n");
  EXPECT_EQ(run("bands --quiet --config \"" + cfg.string() + "\""), 3);
  EXPECT_NE(read_file(kWork / "last.log").find("bands"), std::string::npos);
}

TEST(Cli, UntrappedFloquetExitsFour) {
  const std::string untrapped = read_file(fs::path(TRAPWAVE_SOURCE_DIR) / "configs/untrapped.yaml");
  const fs::path out = kWork / "untrapped";
  const fs::path cfg = write_config("untrapped.yaml", untrapped);
  EXPECT_EQ(run("floquet --quiet --config \"" + cfg.string() + "\" --out \"" + out.string() + "\""), 4)
      << read_file(kWork / "last.log");
}
