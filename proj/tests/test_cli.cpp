#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "cli_configs.hpp"
#include "trapwave_cli/bundle.hpp"
#include "trapwave_cli/config.hpp"
#include "trapwave_cli/export.hpp"
#include "trapwave_cli/pipeline.hpp"

namespace fs = std::filesystem;
using namespace trapwave;
using namespace trapwave::cli;

namespace {

const StageSet kAll = StageSet::for_subcommand("all");

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("trapwave_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string error_of(const std::string& yaml, const StageSet& stages = kAll) {
  try {
    parse_config(yaml, "t.yaml", stages);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

// One full in-process run shared by the bundle tests.
const ResultBundle& quick_bundle() {
  static const ResultBundle b = [] {
    RunOptions o;
    o.subcommand = "all";
    o.threads = 4;
    return run_pipeline(parse_config(tw_test::quick_ref2_yaml("unused"), "quick.yaml", kAll), o);
  }();
  return b;
}

}  // namespace

TEST(Numbers, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 0.61685027506808487, -2.5e-300, 1e300, 0.0}) {
    EXPECT_EQ(parse_number(format_number(v)), v);
  }
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_TRUE(std::isnan(parse_number(format_number(std::numeric_limits<double>::quiet_NaN()))));
  EXPECT_EQ(parse_number(format_number(-std::numeric_limits<double>::infinity())),
            -std::numeric_limits<double>::infinity());
}

TEST(Hash, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Config, ReferenceFileParses) {
  const Config c = load_config(fs::path(TRAPWAVE_SOURCE_DIR) / "configs/ref2.yaml", kAll);
  EXPECT_EQ(c.strip.J, 2);
  EXPECT_EQ(c.strip.K, 6);
  ASSERT_TRUE(c.window.has_value());
  EXPECT_EQ(c.window->guide_rows, 2);
  EXPECT_EQ(c.zetas, default_zeta_samples());
  EXPECT_EQ(c.grid.h, 0.125);
}

TEST(Config, HashIgnoresOutputsAndFormatting) {
  const Config a = parse_config(tw_test::quick_ref2_yaml("out/a"), "a", kAll);
  const Config b = parse_config("# comment\n" + tw_test::quick_ref2_yaml("out/b"), "b", kAll);
  EXPECT_EQ(a.hash(), b.hash());
  const Config c = parse_config(tw_test::quick_ref2_yaml("out/a") + "solver:\n  tolerance: 1.0e-10\n", "c", kAll);
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_EQ(a.hash().size(), 16u);
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_NE(error_of("").find("geometry"), std::string::npos);
  const std::string no_h = "geometry:\n  cell:\n    l1: 1\n    l2: 1\n  strip:\n    J: 2\n    K: 6\ngrid: {}\n";
  EXPECT_NE(error_of(no_h).find("grid.h"), std::string::npos);
  const std::string bad_l = "geometry:\n  cell:\n    l1: wide\n    l2: 1\ngrid:\n  h: 0.125\n";
  const std::string e = error_of(bad_l, StageSet::for_subcommand("bands"));
  EXPECT_NE(e.find("geometry.cell.l1"), std::string::npos);
  EXPECT_NE(e.find("t.yaml:3:"), std::string::npos) << e;
}

TEST(Config, StageRequirements) {
  const std::string cell_only = "geometry:\n  cell:\n    l1: 1\n    l2: 1\ngrid:\n  h: 0.25\n";
  EXPECT_TRUE(error_of(cell_only, StageSet::for_subcommand("bands")).empty());
  EXPECT_NE(error_of(cell_only, StageSet::for_subcommand("dispersion")).find("geometry.strip"), std::string::npos);
  const std::string no_parabola = tw_test::quick_ref2_yaml("o") + "";
  std::string y = no_parabola;
  y.replace(y.find("[-0.3, -0.1, -0.05, 0.0, 0.05, 0.1, 0.3]"), 40, "[-0.3, 0.0, 0.3]");
  EXPECT_TRUE(error_of(y, StageSet::for_subcommand("dispersion")).empty());
  EXPECT_NE(error_of(y, StageSet::for_subcommand("floquet")).find("sampling.zetas"), std::string::npos);
}

TEST(Config, RejectsBadValues) {
  auto with = [](const std::string& extra) { return tw_test::quick_ref2_yaml("o") + extra; };
  EXPECT_NE(error_of(with("solver:\n  shift: 0.5\n")).find("solver.shift"), std::string::npos);
  std::string even = tw_test::quick_ref2_yaml("o");
  even.replace(even.find("[5, 5]"), 6, "[4, 5]");
  EXPECT_NE(error_of(even).find("sampling.band_grid"), std::string::npos);
  std::string off_grid = tw_test::quick_ref2_yaml("o");
  off_grid.replace(off_grid.find("h: 0.125"), 8, "h: 0.3");
  EXPECT_NE(error_of(off_grid).find("grid.h"), std::string::npos);
  EXPECT_THROW(StageSet::for_subcommand("nope"), ConfigError);
}

TEST(Pipeline, QuickRunHasEveryStageAndNoFailures) {
  const ResultBundle& b = quick_bundle();
  EXPECT_TRUE(b.bands && b.dispersion && b.floquet && b.trapped);
  EXPECT_TRUE(b.failures.empty()) << (b.failures.empty() ? "" : b.failures.front());
  EXPECT_EQ(b.stages, (std::vector<std::string>{"bands", "dispersion", "floquet", "trapped"}));
  EXPECT_EQ(b.trapped->report.verdict, TrappedVerdict::Pass);
  EXPECT_NO_THROW(validate_bundle(b));
}

TEST(Bundle, SaveLoadSaveIsByteIdentical) {
  const fs::path d1 = scratch("rt1"), d2 = scratch("rt2");
  save_bundle(quick_bundle(), d1);
  const ResultBundle back = load_bundle(d1);
  EXPECT_NO_THROW(validate_bundle(back));
  save_bundle(back, d2);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(d1)) {
    ++files;
    EXPECT_EQ(read_file(e.path()), read_file(d2 / e.path().filename())) << e.path().filename();
  }
  EXPECT_GE(files, 6u);
}

TEST(Bundle, CsvCarriesHashAndHeader) {
  const fs::path d = scratch("csv");
  save_bundle(quick_bundle(), d);
  std::istringstream in(read_file(d / "dispersion.csv"));
  std::string first, second;
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_EQ(first, "# config_hash=" + quick_bundle().provenance.config_hash);
  EXPECT_EQ(second, "zeta,M1,ess,trapped,M2");
}

TEST(Bundle, MixedProvenanceIsRejected) {
  const fs::path d = scratch("mixed");
  save_bundle(quick_bundle(), d);
  std::string csv = read_file(d / "bands.csv");
  csv.replace(csv.find('=') + 1, 16, "0000000000000000");
  std::ofstream(d / "bands.csv", std::ios::binary) << csv;
  EXPECT_THROW(load_bundle(d), BundleError);
}

TEST(Bundle, MissingDirectoryIsRejected) {
  EXPECT_THROW(load_bundle(scratch("absent")), BundleError);
}

TEST(Export, AllKinds) {
  const fs::path d = scratch("export");
  const auto bd = export_plot_data(quick_bundle(), PlotKind::BandDiagram, d);
  ASSERT_EQ(bd.size(), 1u);
  EXPECT_TRUE(fs::exists(bd[0]));
  const auto dp = export_plot_data(quick_bundle(), PlotKind::Dispersion, d);
  std::istringstream in(read_file(dp.at(0)));
  std::string line;
  std::getline(in, line);
  if (line.rfind("#", 0) == 0) std::getline(in, line);
  EXPECT_EQ(line, "zeta,kappa,M1,ess,trapped,M2,M_sharp");
  const auto f = export_plot_data(quick_bundle(), PlotKind::FieldHeatmap, d, "W0");
  EXPECT_FALSE(f.empty());
  EXPECT_THROW(export_plot_data(quick_bundle(), PlotKind::FieldHeatmap, d, "nope"), BundleError);
  EXPECT_EQ(parse_plot_kind("band-diagram"), PlotKind::BandDiagram);
  EXPECT_THROW(parse_plot_kind("pie"), ConfigError);

  ResultBundle empty = quick_bundle();
  empty.bands.reset();
  EXPECT_THROW(export_plot_data(empty, PlotKind::BandDiagram, d), BundleError);
}

TEST(Pipeline, TimestampHonoursSourceDateEpoch) {
  ::setenv("SOURCE_DATE_EPOCH", "0", 1);
  EXPECT_EQ(build_timestamp(), "1970-01-01T00:00:00Z");
  ::unsetenv("SOURCE_DATE_EPOCH");
}
