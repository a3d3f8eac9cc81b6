#include "fairprice/instances.hpp"

#include "fairprice/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace fairprice {

Theorem1Instance theorem1_instance(double sigma_eps)
{
  Vector beta(2);
  beta << 2.0, 1.0;
  Environment env(DemandParams(-1.0, beta), DemandParams(-2.0, beta), 0.5, sigma_eps, FeatureSampler{1, -0.5, 0.5});
  return {env, FairnessSetting{0.25, 5.0 / 16.0}};
}

Environment theorem1_env(double sigma_eps)
{
  return theorem1_instance(sigma_eps).env;
}

PricePair theorem1_prices(double x)
{
  return {x / 3.0 + 5.0 / 6.0, x / 3.0 + 7.0 / 12.0, true};
}

namespace {

void check_theorem3_alpha(double alpha)
{
  if (!(alpha >= kTheorem3AlphaLow && alpha <= kTheorem3AlphaHigh)) {
    throw ConfigError("alpha " + format_double(alpha) + " outside [-1/2, -1/5]");
  }
}

double revenue3(double alpha, Group g, double p)
{
  return p * theorem3_mean(alpha, g, p);
}

}  // namespace

Environment theorem3_env(double alpha)
{
  check_theorem3_alpha(alpha);
  Vector beta0(1);
  beta0 << 0.5 - alpha;
  Vector beta1(1);
  beta1 << 0.5 - 1.5 * alpha;
  return Environment(DemandParams(alpha, beta0), DemandParams(2.0 * alpha, beta1), 0.5, 0.0, FeatureSampler{0},
                     DemandKind::Bernoulli, GroupRule::Alternating);
}

double theorem3_mean(double alpha, Group group, double price)
{
  const double g = index_of(group);
  return 0.5 + alpha * ((g + 1.0) * price - 1.0 - g / 2.0);
}

double theorem3_optimal_price(double alpha, Group group)
{
  check_theorem3_alpha(alpha);
  return 7.0 / 12.0 - 1.0 / (6.0 * alpha) - index_of(group) / 4.0;
}

double theorem3_regret_gap(double alpha, double p0)
{
  const double p1 = p0 - kTheorem3Delta;
  return revenue3(alpha, Group::Zero, theorem3_optimal_price(alpha, Group::Zero)) - revenue3(alpha, Group::Zero, p0) +
         revenue3(alpha, Group::One, theorem3_optimal_price(alpha, Group::One)) - revenue3(alpha, Group::One, p1);
}

bool PropertyReport::passed() const
{
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.passed(); });
}

std::vector<double> linspace(double low, double high, std::size_t n)
{
  std::vector<double> out(n);
  if (n == 1) out[0] = low;
  for (std::size_t i = 0; i < n && n > 1; ++i) {
    out[i] = low + (high - low) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  if (n > 1) out.back() = high;
  return out;
}

namespace {

class CheckAccumulator {
 public:
  explicit CheckAccumulator(std::string name, double tolerance) : tolerance_(tolerance)
  {
    check_.name = std::move(name);
    check_.worst_margin = std::numeric_limits<double>::infinity();
  }

  /// Records margin = lhs - rhs of an inequality lhs >= rhs.
  void add(double margin)
  {
    ++check_.evaluated;
    margin += 0.0;
    check_.worst_margin = std::min(check_.worst_margin, margin);
    if (!(margin >= -tolerance_)) ++check_.failures;
  }

  PropertyCheck done() &&
  {
    if (check_.evaluated == 0) check_.worst_margin = 0.0;
    return std::move(check_);
  }

 private:
  double tolerance_;
  PropertyCheck check_;
};

}  // namespace

PropertyReport verify_properties(const std::vector<double>& alpha_grid, const std::vector<double>& price_grid,
                                 double tolerance)
{
  for (double a : alpha_grid) check_theorem3_alpha(a);
  for (double p : price_grid) {
    if (!(p >= kTheorem3PriceLow && p <= kTheorem3PriceHigh)) {
      throw ConfigError("price " + format_double(p) + " outside [1/2, 9/8]");
    }
  }
  const double a0 = kTheorem3Alpha0;
  const double delta = kTheorem3Delta;
  const AugmentedFeature none = augment(Vector(0));
  PropertyReport report;

  // Closed-form optimum against the generic solver on the linear form of the demand.
  CheckAccumulator closed_form("optimal_price_closed_form", tolerance);
  for (double a : alpha_grid) {
    const Environment env = theorem3_env(a);
    const PricePair solved = optimal_fair_prices(env.theta0(), env.theta1(), env.q(), delta, none);
    for (Group g : {Group::Zero, Group::One}) {
      closed_form.add(-std::abs(solved.price_for(g) - theorem3_optimal_price(a, g)));
    }
  }
  report.checks.push_back(std::move(closed_form).done());

  CheckAccumulator reference("optimal_price_at_alpha0", 0.0);
  reference.add(-std::abs(theorem3_optimal_price(a0, Group::Zero) - 1.0));
  reference.add(-std::abs(theorem3_optimal_price(a0, Group::One) - 0.75));
  report.checks.push_back(std::move(reference).done());

  CheckAccumulator uninformative("demand_half_at_alpha0_prices", tolerance);
  for (double a : alpha_grid) {
    for (Group g : {Group::Zero, Group::One}) {
      uninformative.add(-std::abs(theorem3_mean(a, g, theorem3_optimal_price(a0, g)) - 0.5));
    }
  }
  report.checks.push_back(std::move(uninformative).done());

  CheckAccumulator quadratic0("regret_quadratic_bound_group0", tolerance);
  CheckAccumulator quadratic1("regret_quadratic_bound_group1", tolerance);
  for (double a : alpha_grid) {
    const double s0 = theorem3_optimal_price(a, Group::Zero);
    const double s1 = theorem3_optimal_price(a, Group::One);
    for (double p0 : price_grid) {
      const double p1 = p0 - delta;
      if (p1 < kTheorem3PriceLow) continue;
      const double gap = theorem3_regret_gap(a, p0);
      quadratic0.add(gap - 0.6 * (s0 - p0) * (s0 - p0));
      quadratic1.add(gap - 0.6 * (s1 - p1) * (s1 - p1));
    }
  }
  report.checks.push_back(std::move(quadratic0).done());
  report.checks.push_back(std::move(quadratic1).done());

  CheckAccumulator separation("optimal_price_separation", tolerance);
  for (double a : alpha_grid) {
    if (std::abs(a - a0) <= 1e-15) continue;
    for (Group g : {Group::Zero, Group::One}) {
      separation.add(std::abs(theorem3_optimal_price(a, g) - theorem3_optimal_price(a0, g)) -
                     (5.0 / 6.0) * std::abs(a - a0));
    }
  }
  report.checks.push_back(std::move(separation).done());

  CheckAccumulator lipschitz("demand_lipschitz", tolerance);
  CheckAccumulator range("demand_range", tolerance);
  for (double a : alpha_grid) {
    for (double p : price_grid) {
      for (Group g : {Group::Zero, Group::One}) {
        const double lhs = std::abs(theorem3_mean(a, g, p) - theorem3_mean(a0, g, p));
        lipschitz.add(2.0 * std::abs(theorem3_optimal_price(a0, g) - p) * std::abs(a - a0) - lhs);
        const double d = theorem3_mean(a, g, p);
        range.add(std::min(d - 0.125, 0.75 - d));
      }
    }
  }
  report.checks.push_back(std::move(lipschitz).done());
  report.checks.push_back(std::move(range).done());
  return report;
}

void write_report_text(std::ostream& out, const PropertyReport& report)
{
  for (const auto& c : report.checks) {
    out << (c.passed() ? "PASS " : "FAIL ") << c.name << "  evaluated=" << c.evaluated << " failures=" << c.failures
        << " worst_margin=" << format_double(c.worst_margin) << '\n';
  }
  out << (report.passed() ? "all properties hold" : "some properties failed") << '\n';
}

void write_report_csv(std::ostream& out, const PropertyReport& report)
{
  out << "check,evaluated,failures,worst_margin,passed\n";
  for (const auto& c : report.checks) {
    out << c.name << ',' << c.evaluated << ',' << c.failures << ',' << format_double(c.worst_margin) << ','
        << (c.passed() ? 1 : 0) << '\n';
  }
}

GrowthProbe theorem1_growth_probe(std::size_t horizon, std::size_t reps, std::uint64_t seed, std::size_t jobs,
                                  SellerKind seller)
{
  const Theorem1Instance inst = theorem1_instance();
  SellerConfig config;
  config.horizon = horizon;
  config.delta = inst.fairness.delta;
  config.price_cap = 3.0;
  BuyerBehavior buyer;
  buyer.mode = BuyerMode::AlwaysManipulate;
  EpisodeSpec spec{inst.env, config, seller, buyer, inst.fairness.manipulation_cost, false};

  const auto trajectories = run_replications(spec, reps, seed, jobs);
  const RegretCurve curve = aggregate(trajectories);
  const std::size_t t0 = trajectories.front().exploration_length;

  GrowthProbe probe;
  probe.horizon = horizon;
  probe.reps = reps;
  probe.t_min = std::max<std::size_t>(2 * t0, 1);
  probe.slope = loglog_slope(curve, probe.t_min).slope;
  probe.final_regret = curve.mean.back();
  const double before = t0 > 0 ? curve.at(t0) : 0.0;
  probe.per_step_regret = (curve.mean.back() - before) / static_cast<double>(horizon - t0);
  return probe;
}

}  // namespace fairprice
