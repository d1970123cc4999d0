#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "caginalp/errors.hpp"
#include "caginalp/verification.hpp"

using namespace caginalp;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Verification, SuiteNames) {
  const auto& names = suite_names();
  ASSERT_EQ(names.size(), 10u);
  EXPECT_EQ(names.front(), "conservation");
  EXPECT_EQ(names.back(), "lipschitz");
}

TEST(Verification, UnknownTestIsRejected) {
  VerifySuiteConfig cfg;
  cfg.tests = {"conservation", "bogus"};
  EXPECT_THROW(run_suite(cfg, desk_problem()), UsageError);
}

TEST(Verification, PinnedOracleMatrix) {
  const auto cases = pinned_oracle_cases();
  ASSERT_EQ(cases.size(), 8u);
  int with_tau = 0;
  for (const auto& c : cases) {
    if (c.model.params.tau > 0) ++with_tau;
    const OracleComparison r = compare_with_oracle(c, SolverConfig{}, 42);
    EXPECT_LE(r.state, 1e-10) << c.label;
    EXPECT_LE(r.linearized, 1e-10) << c.label;
    EXPECT_LE(r.adjoint, 1e-10) << c.label;
  }
  EXPECT_EQ(with_tau, 4);
}

TEST(Verification, FaultInjectionIsDetected) {
  Problem pb = desk_problem();
  pb.solver.debug_flip_adjoint_sign = true;
  VerifySuiteConfig cfg;
  cfg.tests = {"conservation", "adjoint", "gradient"};
  const VerifyReport r = run_suite(cfg, pb);
  EXPECT_TRUE(r.find("conservation")->passed);
  EXPECT_FALSE(r.find("adjoint")->passed);
  EXPECT_FALSE(r.find("gradient")->passed);
  EXPECT_FALSE(r.all_passed());
}

TEST(Verification, VerdictsAreSeedRobust) {
  VerifySuiteConfig cfg;
  cfg.tests = {"taylor", "adjoint", "gradient", "lipschitz"};
  for (std::uint64_t seed : {1u, 77u, 20240611u}) {
    cfg.seed = seed;
    const VerifyReport r = run_suite(cfg, desk_problem());
    EXPECT_EQ(r.seed, seed);
    for (const auto& t : r.results) EXPECT_TRUE(t.passed) << t.test << " seed " << seed;
  }
}

TEST(Verification, MissingCostIsReportedPerTest) {
  VerifySuiteConfig cfg;
  cfg.tests = {"conservation", "optimizer", "equilibrium"};
  cfg.has_cost = false;
  const VerifyReport r = run_suite(cfg, desk_problem());
  ASSERT_EQ(r.results.size(), 3u);
  EXPECT_TRUE(r.find("conservation")->passed);
  EXPECT_FALSE(r.find("optimizer")->passed);
  EXPECT_FALSE(r.find("optimizer")->error.empty());
  EXPECT_TRUE(r.find("equilibrium")->passed);
}

TEST(Verification, ReportIsReproducible) {
  VerifySuiteConfig cfg;
  cfg.tests = {"conservation", "taylor", "adjoint"};
  const std::filesystem::path base = std::filesystem::path(CAGINALP_TEST_TMP) / "repro";
  std::filesystem::remove_all(base);
  write_verify_report(base / "a", run_suite(cfg, desk_problem()));
  write_verify_report(base / "b", run_suite(cfg, desk_problem()));
  const std::string a = slurp(base / "a" / "verify_report.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(base / "b" / "verify_report.csv"));
  EXPECT_EQ(slurp(base / "a" / "taylor_report.csv"),
            slurp(base / "b" / "taylor_report.csv"));
  EXPECT_NE(a.find("test,measure,value,tolerance,comparison,passed,seed"),
            std::string::npos);
}

TEST(Verification, RegimeModels) {
  const Model base = desk_problem().model;
  const Model lin = fully_linear_model(base);
  EXPECT_EQ(lin.params.chi, 0.0);
  EXPECT_EQ(lin.params.Lambda, 0.0);
  EXPECT_EQ(lin.potential.f(2.0), 0.0);
  const Model ch = decoupled_cahn_hilliard_model(base);
  EXPECT_EQ(ch.params.lambda_P, 0.0);
  EXPECT_EQ(ch.potential.f(2.0), 6.0);
}
