#include "fairprice/experiments.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace fairprice;

namespace {

std::string slurp(const std::filesystem::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text)
{
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override
  {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir = std::filesystem::temp_directory_path() / (std::string("fairprice_") + info->name());
    std::filesystem::remove_all(dir);
  }
  void TearDown() override { std::filesystem::remove_all(dir); }
  std::filesystem::path dir;
};

RunConfig small_config(const std::filesystem::path& out)
{
  RunConfig c;
  c.seller.horizon = 2000;
  c.reps = 2;
  c.output_dir = out;
  c.buyer.oracle_kind = OracleKind::Linear;
  c.curve_points = 50;
  return c;
}

}  // namespace

TEST(RunConfigFrom, DefaultsAndOverrides)
{
  std::istringstream in(
      "[run]\nscenario = theorem1\nreps = 3\nseed = 9\n[seller]\nhorizon = 5000\n[buyer]\nmode = truthful\n"
      "oracle = tree\nretrain_every = 5\n");
  const RunConfig c = run_config_from(KeyValueConfig::parse(in));
  EXPECT_EQ(c.scenario, Scenario::Theorem1);
  EXPECT_EQ(c.seller.delta, 0.25);
  EXPECT_EQ(c.manipulation_cost, 5.0 / 16.0);
  EXPECT_EQ(c.reps, 3u);
  EXPECT_EQ(c.base_seed, 9u);
  EXPECT_EQ(c.seller.horizon, 5000u);
  EXPECT_EQ(c.buyer.mode, BuyerMode::Truthful);
  EXPECT_EQ(c.buyer.oracle_kind, OracleKind::Tree);
  EXPECT_EQ(c.buyer.retrain_every, 5u);
}

TEST(RunConfigFrom, CalibratedDefaults)
{
  const RunConfig c = scenario_defaults(Scenario::Calibrated);
  EXPECT_EQ(c.manipulation_cost, 0.11);
  EXPECT_EQ(c.seller.delta, 0.1);
  EXPECT_EQ(c.seller.price_cap, 1.0);
  EXPECT_EQ(c.seller.tau, 5.0);
  EXPECT_EQ(c.seller.horizon, 50000u);
  EXPECT_EQ(c.reps, 20u);
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(RunConfigFrom, Rejections)
{
  std::istringstream bad_scenario("[run]\nscenario = mars\n");
  EXPECT_THROW(run_config_from(KeyValueConfig::parse(bad_scenario)), ConfigError);
  std::istringstream bad_reps("[run]\nreps = 0\n");
  EXPECT_THROW(run_config_from(KeyValueConfig::parse(bad_reps)), ConfigError);
  std::istringstream bad_alpha("[run]\nscenario = theorem3\n[scenario]\nalpha = -0.7\n");
  const RunConfig c = run_config_from(KeyValueConfig::parse(bad_alpha));
  EXPECT_THROW(scenario_environment(c), ConfigError);
}

TEST(SimulationEnvironment, Coefficients)
{
  const Environment d3 = simulation_environment(3, 0.5, 1.0);
  Vector b1(4);
  b1 << 1.0, 0.25, 0.5, 0.5;
  EXPECT_EQ(d3.theta1().beta(), b1);
  const Environment d10 = simulation_environment(10, 0.5, 1.0);
  Vector b0(11);
  b0 << 2.0, 0.5, 1.0, 1.0, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5;
  EXPECT_EQ(d10.theta0().beta(), b0);
  EXPECT_EQ(d10.theta1().beta(), b0 / 2.0);
}

TEST(CurveSteps, StrideAndLast)
{
  EXPECT_EQ(curve_steps(10, 3), (std::vector<std::size_t>{3, 6, 9, 10}));
  EXPECT_EQ(curve_steps(5, 100), (std::vector<std::size_t>{1, 2, 3, 4, 5}));
}

TEST_F(TempDir, CompareWritesDocumentedFiles)
{
  RunConfig c = small_config(dir);
  c.reps = 1;
  const CompareResult r = cmd_compare(c);
  const auto curves = lines(slurp(dir / "regret_curves.csv"));
  ASSERT_FALSE(curves.empty());
  EXPECT_EQ(curves[0], "t,behavior,mean,se");
  std::set<std::string> behaviors;
  for (std::size_t i = 1; i < curves.size(); ++i) {
    const auto comma = curves[i].rfind(',');
    EXPECT_EQ(curves[i].substr(comma + 1), "0") << curves[i];
    const auto first = curves[i].find(',');
    behaviors.insert(curves[i].substr(first + 1, curves[i].find(',', first + 1) - first - 1));
  }
  EXPECT_EQ(behaviors, (std::set<std::string>{"oracle-learner", "always-manipulate"}));
  EXPECT_EQ(lines(slurp(dir / "manipulation.csv"))[0], "behavior,window_start,window_end,mean_rate");
  EXPECT_EQ(lines(slurp(dir / "summary.csv"))[0],
            "behavior,reps,horizon,exploration_length,final_mean,final_se,loglog_slope");
  const std::string svg = slurp(dir / "regret.svg");
  std::size_t polylines = 0;
  for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++polylines;
  EXPECT_EQ(polylines, behaviors.size());
  for (const auto& b : behaviors) EXPECT_NE(svg.find(b), std::string::npos);
  EXPECT_GT(r.benchmark.final_mean(), 0.0);
}

TEST_F(TempDir, CompareIsDeterministic)
{
  RunConfig c = small_config(dir / "a");
  c.jobs = 2;
  cmd_compare(c);
  c.output_dir = dir / "b";
  cmd_compare(c);
  for (const char* f : {"regret_curves.csv", "manipulation.csv", "summary.csv", "regret.svg"}) {
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
}

TEST_F(TempDir, SensitivitySingleValueMatchesCompare)
{
  RunConfig c = small_config(dir / "sens");
  const auto sweep = cmd_sensitivity(c, SweepParam::CDelta, {1.0});
  c.output_dir = dir / "cmp";
  const CompareResult direct = cmd_compare(c);
  ASSERT_EQ(sweep.size(), 1u);
  EXPECT_EQ(sweep[0].learner.curve.mean, direct.learner.curve.mean);
  EXPECT_EQ(sweep[0].benchmark.curve.mean, direct.benchmark.curve.mean);
  EXPECT_TRUE(std::filesystem::exists(dir / "sens" / "sensitivity_c_delta_1.svg"));
  EXPECT_EQ(lines(slurp(dir / "sens" / "sensitivity_summary.csv"))[0], "param,value,behavior,final_mean,final_se");
  EXPECT_THROW(cmd_sensitivity(c, SweepParam::Tau, {}), ConfigError);
  EXPECT_EQ(default_sweep_values(SweepParam::PriceCap), (std::vector<double>{3, 4, 5}));
  EXPECT_EQ(sweep_param_from_string("B"), SweepParam::PriceCap);
}

TEST_F(TempDir, CalibrateThenSimulateCalibratedScenario)
{
  const auto r = cmd_calibrate(std::filesystem::path(FAIRPRICE_DATA_DIR) / "synthetic_loans.csv",
                               ColumnMap::defaults(), dir);
  EXPECT_LT(r.model.theta0.alpha(), 0.0);
  EXPECT_LT(r.model.theta1.alpha(), 0.0);
  EXPECT_NE(slurp(dir / "calibration_report.txt").find("unadjusted"), std::string::npos);

  RunConfig c = scenario_defaults(Scenario::Calibrated);
  c.model_path = r.model_file;
  c.seller.horizon = 2000;
  c.reps = 1;
  c.buyer.mode = BuyerMode::AlwaysManipulate;
  c.output_dir = dir / "sim";
  const BehaviorResult sim = cmd_simulate(c);
  EXPECT_EQ(sim.curve.size(), 2000u);
  EXPECT_EQ(lines(slurp(dir / "sim" / "trajectory_rep0.csv")).size(), 2001u);
}

TEST_F(TempDir, CalibrateBadPath)
{
  try {
    cmd_calibrate(dir / "missing.csv", ColumnMap::defaults(), dir);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("missing.csv"), std::string::npos);
  }
}

TEST_F(TempDir, CheckInstances)
{
  InstanceCheckOptions o;
  o.probe_horizon = 3000;
  o.probe_reps = 2;
  const InstanceCheckResult r = cmd_check_instances(o, dir);
  EXPECT_TRUE(r.passed());
  EXPECT_GE(r.probe.slope, 0.9);
  EXPECT_TRUE(std::filesystem::exists(dir / "instances_report.txt"));
  EXPECT_EQ(lines(slurp(dir / "properties.csv"))[0], "check,evaluated,failures,worst_margin,passed");
  o.theorem3_alpha = -0.7;
  EXPECT_THROW(cmd_check_instances(o, std::nullopt), ConfigError);
}

TEST_F(TempDir, SimulateTheorem3Scenario)
{
  RunConfig c = scenario_defaults(Scenario::Theorem3);
  c.seller.horizon = 500;
  c.reps = 2;
  c.buyer.mode = BuyerMode::Truthful;
  c.output_dir = dir;
  const BehaviorResult r = cmd_simulate(c);
  EXPECT_NEAR(r.final_mean(), 0.0, 1e-9);
}
