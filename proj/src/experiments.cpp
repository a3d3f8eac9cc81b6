#include "fairprice/experiments.hpp"

#include "fairprice/svg_chart.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace fairprice {

std::string to_string(Scenario s)
{
  switch (s) {
    case Scenario::SimDefault: return "sim-default";
    case Scenario::Theorem1: return "theorem1";
    case Scenario::Theorem3: return "theorem3";
    case Scenario::Calibrated: return "calibrated";
  }
  return "?";
}

Scenario scenario_from_string(const std::string& s)
{
  if (s == "sim-default") return Scenario::SimDefault;
  if (s == "theorem1") return Scenario::Theorem1;
  if (s == "theorem3") return Scenario::Theorem3;
  if (s == "calibrated") return Scenario::Calibrated;
  throw ConfigError("unknown scenario '" + s + "' (expected sim-default, theorem1, theorem3 or calibrated)");
}

void RunConfig::validate() const
{
  if (reps < 1) throw ConfigError("reps must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (curve_points < 2) throw ConfigError("curve_points must be >= 2");
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("scenario q must lie inside (0, 1)");
  if (!(sigma_eps >= 0.0)) throw ConfigError("sigma_eps must be >= 0");
  if (!(manipulation_cost >= 0.0)) throw ConfigError("manipulation_cost must be >= 0");
  if (buyer.retrain_every < 1) throw ConfigError("retrain_every must be >= 1");
  if (scenario == Scenario::Calibrated && !model_path && !environment) {
    throw ConfigError("calibrated scenario needs scenario.model (a calibrated_model.ini)");
  }
}

RunConfig scenario_defaults(Scenario scenario)
{
  RunConfig c;
  c.scenario = scenario;
  switch (scenario) {
    case Scenario::SimDefault: break;
    case Scenario::Theorem1:
      c.seller.delta = 0.25;
      c.manipulation_cost = 5.0 / 16.0;
      break;
    case Scenario::Theorem3:
      c.seller.delta = kTheorem3Delta;
      c.seller_kind = SellerKind::Clairvoyant;
      break;
    case Scenario::Calibrated:
      c.seller.delta = 0.1;
      c.manipulation_cost = 0.11;
      c.seller.price_cap = 1.0;
      c.seller.tau = 5.0;
      c.seller.horizon = 50000;
      break;
  }
  return c;
}

RunConfig run_config_from(const KeyValueConfig& cfg)
{
  RunConfig c = scenario_defaults(scenario_from_string(cfg.get_string("run.scenario").value_or("sim-default")));
  auto count = [&](const std::string& key, std::size_t& target) {
    if (auto v = cfg.get_int(key)) {
      if (*v < 0) throw ConfigError(key + " must be non-negative");
      target = static_cast<std::size_t>(*v);
    }
  };
  auto real = [&](const std::string& key, double& target) {
    if (auto v = cfg.get_double(key)) target = *v;
  };

  count("run.reps", c.reps);
  if (auto v = cfg.get_int("run.seed")) c.base_seed = static_cast<std::uint64_t>(*v);
  if (auto v = cfg.get_string("run.output_dir")) c.output_dir = *v;
  count("run.jobs", c.jobs);
  count("run.curve_points", c.curve_points);

  count("seller.horizon", c.seller.horizon);
  real("seller.price_cap", c.seller.price_cap);
  real("seller.tau", c.seller.tau);
  real("seller.c_delta", c.seller.c_delta);
  real("seller.delta", c.seller.delta);
  if (auto v = cfg.get_double("seller.q")) c.seller.q = *v;
  if (auto v = cfg.get_string("seller.kind")) {
    if (*v == "explore-then-commit") c.seller_kind = SellerKind::ExploreThenCommit;
    else if (*v == "clairvoyant") c.seller_kind = SellerKind::Clairvoyant;
    else throw ConfigError("unknown seller.kind '" + *v + "'");
  }

  if (auto v = cfg.get_string("buyer.mode")) c.buyer.mode = buyer_mode_from_string(*v);
  if (auto v = cfg.get_string("buyer.oracle")) c.buyer.oracle_kind = oracle_kind_from_string(*v);
  count("buyer.retrain_every", c.buyer.retrain_every);
  count("buyer.training_cap", c.buyer.training_cap);
  count("buyer.initial_epochs", c.buyer.oracle.initial_epochs);
  count("buyer.warm_epochs", c.buyer.oracle.warm_epochs);
  real("buyer.learning_rate", c.buyer.oracle.mlp.learning_rate);
  count("buyer.batch_size", c.buyer.oracle.mlp.batch_size);
  real("buyer.manipulation_cost", c.manipulation_cost);

  count("scenario.dim", c.dim);
  real("scenario.q", c.q);
  real("scenario.sigma_eps", c.sigma_eps);
  real("scenario.alpha", c.theorem3_alpha);
  if (auto v = cfg.get_string("scenario.model")) c.model_path = *v;
  if (cfg.has("environment.alpha0")) c.environment = environment_from_config(cfg);
  c.validate();
  return c;
}

Environment simulation_environment(std::size_t dim, double q, double sigma_eps)
{
  const auto d = static_cast<Eigen::Index>(dim);
  Vector beta0(d + 1);
  for (Eigen::Index i = 0; i <= d; ++i) {
    beta0[i] = i == 0 ? 2.0 : (i == 1 ? 0.5 : (i <= 3 ? 1.0 : 0.5));
  }
  const Vector beta1 = beta0 / 2.0;
  return Environment(DemandParams(-1.0, beta0), DemandParams(-1.0, beta1), q, sigma_eps, FeatureSampler{d, -2.0, 2.0});
}

Environment scenario_environment(const RunConfig& config)
{
  if (config.environment) return *config.environment;
  switch (config.scenario) {
    case Scenario::SimDefault: return simulation_environment(config.dim, config.q, config.sigma_eps);
    case Scenario::Theorem1: return theorem1_env(config.sigma_eps);
    case Scenario::Theorem3: return theorem3_env(config.theorem3_alpha);
    case Scenario::Calibrated: return environment_from_config(KeyValueConfig::load(*config.model_path));
  }
  throw ConfigError("unknown scenario");
}

EpisodeSpec episode_spec(const RunConfig& config, BuyerMode mode)
{
  EpisodeSpec spec{scenario_environment(config), config.seller, config.seller_kind, config.buyer,
                   config.manipulation_cost, false};
  spec.buyer.mode = mode;
  return spec;
}

std::vector<std::size_t> curve_steps(std::size_t horizon, std::size_t points)
{
  const std::size_t stride = std::max<std::size_t>(1, horizon / std::max<std::size_t>(1, points));
  std::vector<std::size_t> steps;
  for (std::size_t t = stride; t <= horizon; t += stride) steps.push_back(t);
  if (steps.empty() || steps.back() != horizon) steps.push_back(horizon);
  return steps;
}

namespace {

constexpr std::size_t kManipulationWindows = 10;

std::vector<std::pair<std::size_t, std::size_t>> manipulation_windows(std::size_t horizon)
{
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t n = std::min(kManipulationWindows, horizon);
  for (std::size_t w = 0; w < n; ++w) {
    out.emplace_back(w * horizon / n + 1, (w + 1) * horizon / n);
  }
  return out;
}

BehaviorResult summarize(BuyerMode mode, std::span<const Trajectory> trajectories, std::size_t horizon)
{
  BehaviorResult r;
  r.mode = mode;
  r.curve = aggregate(trajectories);
  r.exploration_length = trajectories.front().exploration_length;
  r.windows = manipulation_windows(horizon);
  for (const auto& [first, last] : r.windows) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& tr : trajectories) {
      if (auto rate = manipulation_rate(tr, first, last)) {
        sum += *rate;
        ++n;
      }
    }
    r.window_rates.push_back(n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN());
  }
  return r;
}

std::string rate_text(double v)
{
  return std::isnan(v) ? std::string("NA") : format_double(v);
}

void ensure_dir(const std::filesystem::path& dir)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw ConfigError("cannot create output directory " + dir.string());
  }
}

std::ofstream open_out(const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

void write_curves(std::ostream& out, const std::vector<const BehaviorResult*>& results, std::size_t horizon,
                  std::size_t points, const std::string& prefix)
{
  const auto steps = curve_steps(horizon, points);
  for (const auto* r : results) {
    for (std::size_t t : steps) {
      out << prefix << t << ',' << to_string(r->mode) << ',' << format_double(r->curve.at(t)) << ','
          << format_double(r->curve.se.at(t - 1)) << '\n';
    }
  }
}

void write_manipulation(std::ostream& out, const std::vector<const BehaviorResult*>& results)
{
  out << "behavior,window_start,window_end,mean_rate\n";
  for (const auto* r : results) {
    for (std::size_t w = 0; w < r->windows.size(); ++w) {
      out << to_string(r->mode) << ',' << r->windows[w].first << ',' << r->windows[w].second << ','
          << rate_text(r->window_rates[w]) << '\n';
    }
  }
}

std::string compare_chart(const CompareResult& result, std::size_t horizon, std::size_t points, const std::string& title)
{
  const auto steps = curve_steps(horizon, points);
  std::vector<ChartSeries> series;
  for (const auto* r : {&result.learner, &result.benchmark}) {
    ChartSeries s;
    s.label = to_string(r->mode);
    for (std::size_t t : steps) {
      s.x.push_back(static_cast<double>(t));
      s.y.push_back(r->curve.at(t));
      s.band.push_back(r->curve.se.at(t - 1));
    }
    series.push_back(std::move(s));
  }
  ChartOptions opts;
  opts.title = title;
  return render_line_chart(series, opts);
}

CompareResult run_compare(const RunConfig& config)
{
  config.validate();
  return CompareResult{run_behavior(config, BuyerMode::OracleLearner), run_behavior(config, BuyerMode::AlwaysManipulate)};
}

double slope_or_nan(const BehaviorResult& r)
{
  try {
    return loglog_slope(r.curve, std::max<std::size_t>(1, 2 * r.exploration_length)).slope;
  } catch (const std::invalid_argument&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

BehaviorResult run_behavior(const RunConfig& config, BuyerMode mode)
{
  const EpisodeSpec spec = episode_spec(config, mode);
  const auto trajectories = run_replications(spec, config.reps, config.base_seed, config.jobs);
  return summarize(mode, trajectories, config.seller.horizon);
}

CompareResult cmd_compare(const RunConfig& config)
{
  const CompareResult result = run_compare(config);
  ensure_dir(config.output_dir);
  const std::vector<const BehaviorResult*> both = {&result.learner, &result.benchmark};
  {
    auto out = open_out(config.output_dir / "regret_curves.csv");
    out << "t,behavior,mean,se\n";
    write_curves(out, both, config.seller.horizon, config.curve_points, "");
  }
  {
    auto out = open_out(config.output_dir / "manipulation.csv");
    write_manipulation(out, both);
  }
  {
    auto out = open_out(config.output_dir / "summary.csv");
    out << "behavior,reps,horizon,exploration_length,final_mean,final_se,loglog_slope\n";
    for (const auto* r : both) {
      out << to_string(r->mode) << ',' << config.reps << ',' << config.seller.horizon << ',' << r->exploration_length
          << ',' << format_double(r->final_mean()) << ',' << format_double(r->final_se()) << ','
          << rate_text(slope_or_nan(*r)) << '\n';
    }
  }
  {
    auto out = open_out(config.output_dir / "regret.svg");
    out << compare_chart(result, config.seller.horizon, config.curve_points, "Cumulative regret, " + to_string(config.scenario));
  }
  return result;
}

std::string to_string(SweepParam p)
{
  switch (p) {
    case SweepParam::PriceCap: return "B";
    case SweepParam::CDelta: return "c_delta";
    case SweepParam::Tau: return "tau";
  }
  return "?";
}

SweepParam sweep_param_from_string(const std::string& s)
{
  if (s == "B" || s == "price_cap") return SweepParam::PriceCap;
  if (s == "c_delta") return SweepParam::CDelta;
  if (s == "tau") return SweepParam::Tau;
  throw ConfigError("unknown sweep parameter '" + s + "' (expected B, c_delta or tau)");
}

std::vector<double> default_sweep_values(SweepParam p)
{
  switch (p) {
    case SweepParam::PriceCap: return {3.0, 4.0, 5.0};
    case SweepParam::CDelta: return {1.0, 2.0, 3.0};
    case SweepParam::Tau: return {8.0, 10.0, 12.0};
  }
  return {};
}

std::vector<CompareResult> cmd_sensitivity(const RunConfig& config, SweepParam param, const std::vector<double>& values)
{
  if (values.empty()) throw ConfigError("sensitivity sweep needs at least one value");
  std::vector<CompareResult> results;
  std::vector<RunConfig> configs;
  for (double v : values) {
    RunConfig c = config;
    switch (param) {
      case SweepParam::PriceCap: c.seller.price_cap = v; break;
      case SweepParam::CDelta: c.seller.c_delta = v; break;
      case SweepParam::Tau: c.seller.tau = v; break;
    }
    results.push_back(run_compare(c));
    configs.push_back(std::move(c));
  }

  ensure_dir(config.output_dir);
  const std::string name = to_string(param);
  {
    auto out = open_out(config.output_dir / "sensitivity_curves.csv");
    out << "param,value,t,behavior,mean,se\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
      write_curves(out, {&results[i].learner, &results[i].benchmark}, config.seller.horizon, config.curve_points,
                   name + "," + format_double(values[i]) + ",");
    }
  }
  {
    auto out = open_out(config.output_dir / "sensitivity_summary.csv");
    out << "param,value,behavior,final_mean,final_se\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
      for (const auto* r : {&results[i].learner, &results[i].benchmark}) {
        out << name << ',' << format_double(values[i]) << ',' << to_string(r->mode) << ','
            << format_double(r->final_mean()) << ',' << format_double(r->final_se()) << '\n';
      }
    }
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto out = open_out(config.output_dir / ("sensitivity_" + name + "_" + format_double(values[i]) + ".svg"));
    out << compare_chart(results[i], config.seller.horizon, config.curve_points, name + " = " + format_double(values[i]));
  }
  return results;
}

CalibrateResult cmd_calibrate(const std::filesystem::path& csv_path, const ColumnMap& columns,
                              const std::filesystem::path& output_dir, CalibrationUnits units,
                              double simulation_sigma_eps)
{
  CalibrateResult r;
  r.loaded = load_csv(csv_path, columns);
  r.prepared = preprocess(r.loaded.records);
  r.model = calibrate_demand(r.prepared.records, units);
  r.gap = raw_gap_report(r.prepared.records);

  ensure_dir(output_dir);
  r.model_file = output_dir / "calibrated_model.ini";
  model_to_config(r.model, r.gap, simulation_sigma_eps).save(r.model_file);

  auto out = open_out(output_dir / "calibration_report.txt");
  out << "source: " << csv_path.string() << '\n'
      << "rows read: " << r.loaded.rows << ", malformed rows skipped: " << r.loaded.skipped << '\n'
      << "dropped by age/dti filters: " << r.prepared.dropped_by_filter
      << ", dropped by 5%/95% trimming: " << r.prepared.dropped_by_trim << ", kept: " << r.prepared.records.size() << '\n'
      << "demand model features (all six, standardized): income, age, property_value, dti, cltv, loan_term\n"
      << "units: price = rate / " << format_double(units.price_divisor) << ", demand = amount / "
      << format_double(units.demand_divisor) << '\n'
      << "group 0: n=" << r.model.n0 << " alpha=" << format_double(r.model.theta0.alpha())
      << " (raw " << format_double(r.model.fit0.raw_alpha) << ") beta=" << format_vector(r.model.theta0.beta()) << '\n'
      << "group 1: n=" << r.model.n1 << " alpha=" << format_double(r.model.theta1.alpha())
      << " (raw " << format_double(r.model.fit1.raw_alpha) << ") beta=" << format_vector(r.model.theta1.beta()) << '\n'
      << "pooled residual sd: " << format_double(r.model.sigma_eps) << ", group-0 share q: " << format_double(r.model.q)
      << '\n'
      << "raw price gap (unadjusted, no covariate matching): mean(group 0) - mean(group 1) = "
      << format_double(r.gap.mean_gap) << ", Welch t = " << format_double(r.gap.t_stat)
      << ", df = " << format_double(r.gap.df) << ", one-sided p = " << format_double(r.gap.one_sided_p) << '\n';
  return r;
}

bool InstanceCheckResult::passed() const
{
  return properties.passed() &&
         std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second; });
}

InstanceCheckResult cmd_check_instances(const InstanceCheckOptions& options,
                                        const std::optional<std::filesystem::path>& output_dir)
{
  InstanceCheckResult r;
  if (options.theorem3_alpha) theorem3_env(*options.theorem3_alpha);

  const Theorem1Instance t1 = theorem1_instance();
  double worst = 0.0;
  for (double x : linspace(-0.5, 0.5, 100)) {
    const PricePair got = optimal_fair_prices(t1.env.theta0(), t1.env.theta1(), t1.env.q(), t1.fairness.delta,
                                              augment(Vector::Constant(1, x)));
    const PricePair want = theorem1_prices(x);
    worst = std::max({worst, std::abs(got.p0 - want.p0), std::abs(got.p1 - want.p1)});
  }
  r.checks.emplace_back("theorem1 fair prices (x/3+5/6, x/3+7/12), max error " + format_double(worst), worst <= 1e-12);

  const double unconstrained_gap_at_zero = 0.5;
  r.checks.emplace_back("theorem1 unconstrained gap at x=0 exceeds C0",
                        unconstrained_gap(t1.env.theta0(), t1.env.theta1(), augment(Vector::Zero(1))) ==
                                unconstrained_gap_at_zero &&
                            unconstrained_gap_at_zero > t1.fairness.manipulation_cost);

  r.checks.emplace_back("theorem3 p0*(-2/5) = 1", theorem3_optimal_price(-0.4, Group::Zero) == 1.0);
  r.checks.emplace_back("theorem3 p1*(-2/5) = 3/4", theorem3_optimal_price(-0.4, Group::One) == 0.75);

  bool rejected = false;
  try {
    theorem3_env(-0.6);
  } catch (const ConfigError&) {
    rejected = true;
  }
  r.checks.emplace_back("theorem3 rejects alpha outside [-1/2, -1/5]", rejected);

  const auto alphas = linspace(kTheorem3AlphaLow, kTheorem3AlphaHigh, options.grid);
  const auto prices = linspace(kTheorem3PriceLow, kTheorem3PriceHigh, options.grid);
  r.properties = verify_properties(alphas, prices);

  r.probe = theorem1_growth_probe(options.probe_horizon, options.probe_reps, options.seed, options.jobs);
  r.checks.emplace_back("theorem1 always-manipulate log-log slope " + format_double(r.probe.slope) + " >= 0.9",
                        r.probe.slope >= 0.9);

  if (output_dir) {
    ensure_dir(*output_dir);
    {
      auto out = open_out(*output_dir / "properties.csv");
      write_report_csv(out, r.properties);
    }
    auto out = open_out(*output_dir / "instances_report.txt");
    for (const auto& [name, ok] : r.checks) out << (ok ? "PASS " : "FAIL ") << name << '\n';
    write_report_text(out, r.properties);
    out << "theorem1 probe: T=" << r.probe.horizon << " reps=" << r.probe.reps
        << " per-step regret=" << format_double(r.probe.per_step_regret)
        << " final regret=" << format_double(r.probe.final_regret) << '\n';
  }
  return r;
}

BehaviorResult cmd_simulate(const RunConfig& config)
{
  config.validate();
  EpisodeSpec spec = episode_spec(config, config.buyer.mode);
  spec.record_steps = true;
  std::vector<Trajectory> trajectories;
  trajectories.push_back(run_episode(spec, config.base_seed));
  if (config.reps > 1) {
    spec.record_steps = false;
    auto rest = run_replications(spec, config.reps - 1, config.base_seed + 1, config.jobs);
    for (auto& tr : rest) trajectories.push_back(std::move(tr));
  }
  BehaviorResult result = summarize(config.buyer.mode, trajectories, config.seller.horizon);

  ensure_dir(config.output_dir);
  {
    auto out = open_out(config.output_dir / "regret_curve.csv");
    out << "t,behavior,mean,se\n";
    write_curves(out, {&result}, config.seller.horizon, config.curve_points, "");
  }
  {
    auto out = open_out(config.output_dir / "manipulation.csv");
    write_manipulation(out, {&result});
  }
  {
    auto out = open_out(config.output_dir / "trajectory_rep0.csv");
    write_trajectory_csv(out, trajectories.front());
  }
  return result;
}

}  // namespace fairprice
