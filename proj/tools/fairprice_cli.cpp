// fairprice: experiment driver.
//
//   fairprice compare         [--config F] [--seed N] [--reps N] [--horizon N] [--jobs N] [--out DIR]
//   fairprice sensitivity     --param B|c_delta|tau [--values 3,4,5] ...
//   fairprice calibrate       --csv FILE [--config F] [--out DIR]
//   fairprice check-instances [--probe-horizon N] [--reps N] [--seed N] [--jobs N] [--out DIR]
//   fairprice simulate        [--mode truthful|always-manipulate|oracle-learner] ...
//
// Exit status: 0 success, 1 a check failed, 2 bad configuration, 3 runtime error.

#include "fairprice/experiments.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

using namespace fairprice;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> jobs;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& f)
{
  cmd->add_option("--config", f.config, "INI configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "base seed; replication r uses seed + r");
  cmd->add_option("--reps", f.reps, "replications");
  cmd->add_option("--horizon", f.horizon, "horizon T");
  cmd->add_option("--jobs", f.jobs, "parallel replications");
  cmd->add_option("--out", f.out, "output directory (default: $FAIRPRICE_OUT)");
}

KeyValueConfig load_config(const CommonFlags& f)
{
  return f.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(f.config);
}

std::filesystem::path output_dir(const CommonFlags& f, const KeyValueConfig& cfg)
{
  if (!f.out.empty()) return f.out;
  if (auto v = cfg.get_string("run.output_dir")) return *v;
  if (const char* env = std::getenv("FAIRPRICE_OUT"); env && *env) return env;
  return "fairprice_out";
}

RunConfig run_config(const CommonFlags& f)
{
  const KeyValueConfig cfg = load_config(f);
  RunConfig c = run_config_from(cfg);
  if (f.seed) c.base_seed = *f.seed;
  if (f.reps) c.reps = *f.reps;
  if (f.horizon) c.seller.horizon = *f.horizon;
  if (f.jobs) c.jobs = *f.jobs;
  c.output_dir = output_dir(f, cfg);
  c.validate();
  return c;
}

void print_behavior(const BehaviorResult& r)
{
  std::cout << "  " << to_string(r.mode) << ": final regret " << format_double(r.final_mean()) << " (se "
            << format_double(r.final_se()) << "), T0 = " << r.exploration_length << ", late manipulation rate "
            << (r.window_rates.empty() ? std::string("NA") : format_double(r.window_rates.back())) << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Fair contextual pricing with strategic buyers: experiments"};
  app.require_subcommand(1);

  CommonFlags compare_flags;
  auto* compare = app.add_subcommand("compare", "oracle learners vs always-manipulate buyers");
  add_common(compare, compare_flags);

  CommonFlags sens_flags;
  std::string sens_param;
  std::vector<double> sens_values;
  auto* sens = app.add_subcommand("sensitivity", "repeat compare over B, c_delta or tau");
  add_common(sens, sens_flags);
  sens->add_option("--param", sens_param, "B, c_delta or tau")->required();
  sens->add_option("--values", sens_values, "values (default B: 3,4,5; c_delta: 1,2,3; tau: 8,10,12)")->delimiter(',');

  CommonFlags cal_flags;
  std::string cal_csv;
  double cal_sigma = 1.0;
  auto* cal = app.add_subcommand("calibrate", "fit the demand model to loan-level CSV data");
  add_common(cal, cal_flags);
  cal->add_option("--csv", cal_csv, "loan-level CSV with a header row")->required();
  cal->add_option("--sim-sigma", cal_sigma, "noise sd written for simulation");

  CommonFlags inst_flags;
  std::size_t probe_horizon = 10000;
  std::optional<double> inst_alpha;
  auto* inst = app.add_subcommand("check-instances", "verify the hard instances and their properties");
  add_common(inst, inst_flags);
  inst->add_option("--probe-horizon", probe_horizon, "horizon of the linear-growth probe");
  inst->add_option("--alpha", inst_alpha, "also validate this alpha for the Bernoulli instance");

  CommonFlags sim_flags;
  std::string sim_mode;
  auto* sim = app.add_subcommand("simulate", "run one buyer behavior");
  add_common(sim, sim_flags);
  sim->add_option("--mode", sim_mode, "truthful, always-manipulate or oracle-learner");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*compare) {
      const RunConfig c = run_config(compare_flags);
      const CompareResult r = cmd_compare(c);
      std::cout << "compare (" << to_string(c.scenario) << ", T=" << c.seller.horizon << ", reps=" << c.reps << ")\n";
      print_behavior(r.learner);
      print_behavior(r.benchmark);
      std::cout << "  regret reduction: " << format_double(100.0 * r.reduction()) << "%\n"
                << "  written to " << c.output_dir.string() << '\n';
    } else if (*sens) {
      const RunConfig c = run_config(sens_flags);
      const SweepParam p = sweep_param_from_string(sens_param);
      const auto values = sens_values.empty() ? default_sweep_values(p) : sens_values;
      const auto results = cmd_sensitivity(c, p, values);
      for (std::size_t i = 0; i < values.size(); ++i) {
        std::cout << to_string(p) << " = " << format_double(values[i]) << '\n';
        print_behavior(results[i].learner);
        print_behavior(results[i].benchmark);
      }
      std::cout << "written to " << c.output_dir.string() << '\n';
    } else if (*cal) {
      const KeyValueConfig cfg = load_config(cal_flags);
      CalibrationUnits units;
      units.price_divisor = cfg.get_double("calibration.price_divisor").value_or(units.price_divisor);
      units.demand_divisor = cfg.get_double("calibration.demand_divisor").value_or(units.demand_divisor);
      const auto r = cmd_calibrate(cal_csv, ColumnMap::from_config(cfg), output_dir(cal_flags, cfg), units, cal_sigma);
      std::cout << "calibrated " << r.prepared.records.size() << " of " << r.loaded.rows << " rows ("
                << r.loaded.skipped << " malformed)\n"
                << "  alpha0 = " << format_double(r.model.theta0.alpha()) << ", alpha1 = "
                << format_double(r.model.theta1.alpha()) << ", q = " << format_double(r.model.q) << '\n'
                << "  raw gap " << format_double(r.gap.mean_gap) << ", one-sided p = "
                << format_double(r.gap.one_sided_p) << " (unadjusted)\n"
                << "  model: " << r.model_file.string() << '\n';
    } else if (*inst) {
      const KeyValueConfig cfg = load_config(inst_flags);
      InstanceCheckOptions opts;
      opts.probe_horizon = inst_flags.horizon.value_or(probe_horizon);
      opts.probe_reps = inst_flags.reps.value_or(opts.probe_reps);
      opts.seed = inst_flags.seed.value_or(opts.seed);
      opts.jobs = inst_flags.jobs.value_or(opts.jobs);
      opts.theorem3_alpha = inst_alpha;
      const auto r = cmd_check_instances(opts, output_dir(inst_flags, cfg));
      for (const auto& [name, ok] : r.checks) std::cout << (ok ? "PASS " : "FAIL ") << name << '\n';
      write_report_text(std::cout, r.properties);
      return r.passed() ? 0 : 1;
    } else if (*sim) {
      RunConfig c = run_config(sim_flags);
      if (!sim_mode.empty()) c.buyer.mode = buyer_mode_from_string(sim_mode);
      const BehaviorResult r = cmd_simulate(c);
      std::cout << "simulate (" << to_string(c.scenario) << ", T=" << c.seller.horizon << ", reps=" << c.reps << ")\n";
      print_behavior(r);
      std::cout << "  written to " << c.output_dir.string() << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "fairprice: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "fairprice: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
