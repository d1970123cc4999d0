#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "caginalp/config.hpp"
#include "caginalp/csv_io.hpp"
#include "caginalp/errors.hpp"

using namespace caginalp;
namespace fs = std::filesystem;

namespace {

const std::string kMinimal =
    "[grid]\nn = 9\n[time]\nt_final = 0.1\nnt = 4\n"
    "[model]\nell = 1\nlambda_big = 1\nchi = 0.5\n";

const std::string kWithCost = kMinimal +
    "[cost]\nb1 = 1\nb5 = 0.5\n"
    "[admissible]\nu_min = -1\nu_max = 1\nm_bound = 2\n";

fs::path tmp_dir(const std::string& name) {
  const fs::path p = fs::path(CAGINALP_TEST_TMP) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text, CAGINALP_TEST_TMP, "inline");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

}  // namespace

TEST(Ini, CommentsAndValues) {
  const IniDocument d = IniDocument::parse(
      "# leading\n[a]\nx = 1.5 ; trailing\ny=two words\n; note\n[b]\nz = 3\n", "t");
  EXPECT_DOUBLE_EQ(d.real("a", "x"), 1.5);
  EXPECT_EQ(d.get("a", "y"), "two words");
  EXPECT_EQ(d.integer("b", "z"), 3);
  EXPECT_EQ(d.get_or("b", "w", "dflt"), "dflt");
  EXPECT_NO_THROW(d.reject_unknown({"a", "b"}));
}

TEST(Ini, MalformedInput) {
  EXPECT_THROW(IniDocument::parse("x = 1\n", "t"), ConfigError);
  EXPECT_THROW(IniDocument::parse("[a]\nnovalue\n", "t"), ConfigError);
  EXPECT_THROW(IniDocument::parse("[a]\nx = 1\nx = 2\n", "t"), ConfigError);
  const IniDocument d = IniDocument::parse("[a]\nx = 1.5e\n", "t");
  EXPECT_THROW(d.real("a", "x"), ConfigError);
}

TEST(Config, MinimalDefaults) {
  const RunConfig c = parse_config(kMinimal, CAGINALP_TEST_TMP, "inline");
  EXPECT_EQ(c.problem.grid.node_count(), 9);
  EXPECT_EQ(c.problem.time.steps(), 4);
  EXPECT_FALSE(c.has_cost);
  EXPECT_FALSE(c.has_admissible);
  EXPECT_EQ(c.output.slices, (std::vector<int>{0, 4}));
  EXPECT_DOUBLE_EQ(c.problem.init.sigma0[0], 1.0);
}

TEST(Config, MissingEllNamesKey) {
  const std::string msg = error_of(replace(kMinimal, "ell = 1\n", ""));
  EXPECT_NE(msg.find("[model].ell"), std::string::npos) << msg;
}

TEST(Config, UnknownKeyAndSectionRejected) {
  EXPECT_NE(error_of(kMinimal + "[solver]\nstabilisation = 2\n").find("stabilisation"),
            std::string::npos);
  EXPECT_NE(error_of(kMinimal + "[extras]\nx = 1\n").find("extras"), std::string::npos);
}

TEST(Config, HypothesisViolations) {
  EXPECT_NE(error_of(replace(kMinimal, "chi = 0.5", "chi = -1")).find("[model].chi"),
            std::string::npos);
  const RunConfig c = parse_config(replace(kMinimal, "chi = 0.5", "chi = 0"),
                                   CAGINALP_TEST_TMP, "inline");
  EXPECT_FALSE(c.warnings.empty());
}

TEST(Config, InfeasibleBounds) {
  EXPECT_FALSE(error_of(replace(kWithCost, "u_min = -1", "u_min = 1.5")).empty());
  EXPECT_FALSE(error_of(replace(kWithCost, "m_bound = 2", "m_bound = 0.5")).empty());
  EXPECT_TRUE(error_of(kWithCost).empty());
}

TEST(Config, CostRequiresB5) {
  EXPECT_NE(error_of(replace(kWithCost, "b5 = 0.5\n", "")).find("[cost].b5"),
            std::string::npos);
}

TEST(Config, TimeStepFromSolverSection) {
  const std::string text = replace(kMinimal, "nt = 4\n", "") + "[solver]\ndt = 0.025\n";
  EXPECT_EQ(parse_config(text, CAGINALP_TEST_TMP, "inline").problem.time.steps(), 4);
}

TEST(Config, EffectiveConfigRoundTrips) {
  const std::string text = kWithCost +
                           "[initial]\nphi0 = cosine:0,0.5,1\n"
                           "[control]\nu = wave:1,0.5,2\n[output]\nslices = all\n";
  const RunConfig a = parse_config(text, CAGINALP_TEST_TMP, "inline");
  const RunConfig b = parse_config(a.effective, CAGINALP_TEST_TMP, "effective");
  EXPECT_EQ(a.effective, b.effective);
  EXPECT_EQ(a.problem.init.phi0.values(), b.problem.init.phi0.values());
  EXPECT_EQ(a.problem.control.slice(2).values(), b.problem.control.slice(2).values());
  EXPECT_EQ(b.output.slices.size(), 5u);
}

TEST(Config, FileSourcesResolveRelativeToConfig) {
  const fs::path dir = tmp_dir("filesrc");
  const Grid g = Grid::line(9, 1.0);
  write_field_csv(dir / "phi0.csv", cosine_field(g, 0.1, 0.3, 2));
  std::ofstream(dir / "run.ini") << kMinimal << "[initial]\nphi0 = file:phi0.csv\n";
  const RunConfig c = load_config(dir / "run.ini");
  EXPECT_EQ(c.problem.init.phi0.values(), cosine_field(g, 0.1, 0.3, 2).values());
  EXPECT_NE(c.effective.find((dir / "phi0.csv").string()), std::string::npos);
}

TEST(Config, CustomNonlinearity) {
  const fs::path dir = tmp_dir("custom_nl");
  std::ofstream(dir / "nl.ini") << "[nonlinearity]\nh_steepness = 3\nh_height = 0.5\n"
                                   "k_steepness = 1\n";
  std::ofstream(dir / "run.ini") << kMinimal << "nonlinearity = custom:nl.ini\n";
  const RunConfig c = load_config(dir / "run.ini");
  EXPECT_DOUBLE_EQ(c.problem.model.nonlin.h_star, 0.5);
  EXPECT_NEAR(c.problem.model.nonlin.h_gate.value(0.0), 0.25, 1e-15);
  std::ofstream(dir / "nl.ini") << "[nonlinearity]\nh_steepness = 3\nk_steepness = -1\n";
  EXPECT_THROW(load_config(dir / "run.ini"), ConfigError);
  std::ofstream(dir / "nl.ini") << "[nonlinearity]\nh_steepness = 3\nk_steepness = 1\nextra = 2\n";
  EXPECT_THROW(load_config(dir / "run.ini"), ConfigError);
}

TEST(Csv, FieldRoundTrip) {
  const fs::path dir = tmp_dir("csv");
  std::mt19937_64 rng(1);
  for (const Grid& g : {Grid::line(7, 1.3), Grid::rect(5, 4, 1.0, 0.6)}) {
    const Field f = random_smooth_field(g, rng);
    write_field_csv(dir / "f.csv", f);
    EXPECT_EQ(read_field_csv(dir / "f.csv", g).values(), f.values());
    const TimeGrid t(0.4, 3);
    const SpaceTimeField s = random_smooth_field(g, t, rng);
    write_spacetime_csv(dir / "s.csv", s);
    const SpaceTimeField r = read_spacetime_csv(dir / "s.csv", g, t);
    for (int n = 0; n <= 3; ++n) EXPECT_EQ(r.slice(n).values(), s.slice(n).values());
  }
}

TEST(Csv, RejectsMismatchedFiles) {
  const fs::path dir = tmp_dir("csvbad");
  write_field_csv(dir / "f.csv", Field::constant(Grid::line(7, 1.0), 1.0));
  EXPECT_THROW(read_field_csv(dir / "f.csv", Grid::line(8, 1.0)), ConfigError);
  EXPECT_THROW(read_field_csv(dir / "f.csv", Grid::line(7, 2.0)), ConfigError);
  std::ofstream(dir / "bad.csv") << "i,x,v\n0,0,1\n";
  EXPECT_THROW(read_field_csv(dir / "bad.csv", Grid::line(7, 1.0)), ConfigError);
  EXPECT_THROW(read_field_csv(dir / "missing.csv", Grid::line(7, 1.0)), ConfigError);
}

TEST(Csv, FormatRealRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678}) {
    EXPECT_EQ(std::stod(format_real(v)), v);
  }
}
