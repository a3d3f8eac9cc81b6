#pragma once

// Experiment commands behind the command-line driver. Each command runs its
// replications first and writes files afterwards.

#include "fairprice/calibration.hpp"
#include "fairprice/harness.hpp"
#include "fairprice/instances.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fairprice {

enum class Scenario { SimDefault, Theorem1, Theorem3, Calibrated };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

struct RunConfig {
  Scenario scenario = Scenario::SimDefault;
  SellerConfig seller;
  SellerKind seller_kind = SellerKind::ExploreThenCommit;
  BuyerBehavior buyer;
  double manipulation_cost = 0.8;
  std::size_t reps = 20;
  std::uint64_t base_seed = 1;
  std::filesystem::path output_dir = "fairprice_out";
  std::size_t jobs = 1;
  std::size_t curve_points = 1000;  ///< rows per behavior in curve CSVs

  // sim-default
  std::size_t dim = 3;
  double q = 0.5;
  double sigma_eps = 1.0;
  // calibrated
  std::optional<std::filesystem::path> model_path;
  // theorem3
  double theorem3_alpha = kTheorem3Alpha0;
  /// Full `[environment]` override, if the config carries one.
  std::optional<Environment> environment;

  void validate() const;
};

/// Defaults of a scenario: fairness level, manipulation cost, price cap,
/// exploration multiplier and horizon.
RunConfig scenario_defaults(Scenario scenario);

/// Reads `[run]`, `[seller]`, `[buyer]`, `[scenario]` and an optional
/// `[environment]`. Scenario defaults apply first, then the file's keys.
RunConfig run_config_from(const KeyValueConfig& cfg);

/// The simulation-study market: alpha = -1 for both groups,
/// beta0 = (2, 1/2, 1, 1, 1/2, ...), beta1 = (1, 1/4, 1/2, 1/2) for d = 3 and
/// beta0 / 2 otherwise, x ~ U(-2, 2)^d.
Environment simulation_environment(std::size_t dim, double q, double sigma_eps);

Environment scenario_environment(const RunConfig& config);

EpisodeSpec episode_spec(const RunConfig& config, BuyerMode mode);

struct BehaviorResult {
  BuyerMode mode = BuyerMode::OracleLearner;
  RegretCurve curve;
  std::size_t exploration_length = 0;
  std::vector<double> window_rates;  ///< mean over reps per manipulation window; NaN if undefined
  std::vector<std::pair<std::size_t, std::size_t>> windows;
  double final_mean() const { return curve.mean.back(); }
  double final_se() const { return curve.se.back(); }
};

BehaviorResult run_behavior(const RunConfig& config, BuyerMode mode);

/// Steps written to curve CSVs: an even stride plus the last step.
std::vector<std::size_t> curve_steps(std::size_t horizon, std::size_t points);

struct CompareResult {
  BehaviorResult learner;
  BehaviorResult benchmark;
  double reduction() const { return 1.0 - learner.final_mean() / benchmark.final_mean(); }
};

/// Oracle learners against always-manipulate buyers with common random
/// numbers. Writes regret_curves.csv, manipulation.csv, summary.csv and regret.svg.
CompareResult cmd_compare(const RunConfig& config);

enum class SweepParam { PriceCap, CDelta, Tau };
std::string to_string(SweepParam p);
SweepParam sweep_param_from_string(const std::string& s);
std::vector<double> default_sweep_values(SweepParam p);

/// One comparison per value. Writes sensitivity_curves.csv,
/// sensitivity_summary.csv and sensitivity_<param>_<value>.svg.
std::vector<CompareResult> cmd_sensitivity(const RunConfig& config, SweepParam param, const std::vector<double>& values);

struct CalibrateResult {
  LoadResult loaded;
  PreparedSample prepared;
  CalibratedModel model;
  GapReport gap;
  std::filesystem::path model_file;
};

/// Load, clean, calibrate and test the raw gap. Writes calibrated_model.ini
/// and calibration_report.txt.
CalibrateResult cmd_calibrate(const std::filesystem::path& csv_path, const ColumnMap& columns,
                              const std::filesystem::path& output_dir, CalibrationUnits units = {},
                              double simulation_sigma_eps = 1.0);

struct InstanceCheckOptions {
  std::size_t probe_horizon = 10000;
  std::size_t probe_reps = 5;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  std::size_t grid = 50;
  std::optional<double> theorem3_alpha;  ///< extra alpha to validate
};

struct InstanceCheckResult {
  std::vector<std::pair<std::string, bool>> checks;
  PropertyReport properties;
  GrowthProbe probe;
  bool passed() const;
};

/// Closed-form identities, the property grid and the linear-growth probe.
/// Writes instances_report.txt and properties.csv when `output_dir` is set.
InstanceCheckResult cmd_check_instances(const InstanceCheckOptions& options,
                                        const std::optional<std::filesystem::path>& output_dir);

/// One behavior. Writes regret_curve.csv, manipulation.csv and
/// trajectory_rep0.csv (every step of the first replication).
BehaviorResult cmd_simulate(const RunConfig& config);

}  // namespace fairprice
