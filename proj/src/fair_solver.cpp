#include "fairprice/fair_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace fairprice {

PricingParams pricing_params(const DemandParams& theta0, const DemandParams& theta1, double q, double delta)
{
  const double pooled_alpha = q * theta0.alpha() + (1.0 - q) * theta1.alpha();
  if (pooled_alpha == 0.0) throw ConfigError("pooled price sensitivity is zero");
  PricingParams params;
  params.gamma1 = -(q * theta0.beta() + (1.0 - q) * theta1.beta()) / (2.0 * pooled_alpha);
  params.gamma2 = (1.0 - q) * theta1.alpha() * delta / pooled_alpha;
  return params;
}

double unconstrained_price(const DemandParams& theta, const AugmentedFeature& x)
{
  return -theta.beta().dot(x.values()) / (2.0 * theta.alpha());
}

double unconstrained_gap(const DemandParams& theta0, const DemandParams& theta1, const AugmentedFeature& x)
{
  return unconstrained_price(theta0, x) - unconstrained_price(theta1, x);
}

namespace {

PricePair constrained_prices(const DemandParams& theta0, const DemandParams& theta1, double q, double delta,
                             const AugmentedFeature& x)
{
  const auto params = pricing_params(theta0, theta1, q, delta);
  const double base = params.gamma1.dot(x.values()) + params.gamma2;
  return {base, base - delta, true};
}

}  // namespace

PricePair optimal_fair_prices(const DemandParams& theta0, const DemandParams& theta1, double q, double delta,
                              const AugmentedFeature& x)
{
  if (unconstrained_gap(theta0, theta1, x) <= delta) {
    return {unconstrained_price(theta0, x), unconstrained_price(theta1, x), false};
  }
  return constrained_prices(theta0, theta1, q, delta, x);
}

double weighted_revenue(const DemandParams& theta0, const DemandParams& theta1, double q, double p0, double p1,
                        const AugmentedFeature& x)
{
  return q * expected_revenue(theta0, p0, x) + (1.0 - q) * expected_revenue(theta1, p1, x);
}

PricePair grid_oracle_prices(const DemandParams& theta0, const DemandParams& theta1, double q, double delta,
                             const AugmentedFeature& x, GridOptions options)
{
  if (!(options.step > 0.0) || !(options.upper >= 0.0)) throw std::invalid_argument("grid step must be positive");
  const auto n = static_cast<std::size_t>(std::floor(options.upper / options.step + 1e-9)) + 1;

  std::vector<double> r1(n);
  for (std::size_t j = 0; j < n; ++j) r1[j] = (1.0 - q) * expected_revenue(theta1, j * options.step, x);

  // best_from[j]: argmax of r1 over indices >= j.
  std::vector<std::size_t> best_from(n);
  best_from[n - 1] = n - 1;
  for (std::size_t j = n - 1; j-- > 0;) {
    best_from[j] = r1[j] >= r1[best_from[j + 1]] ? j : best_from[j + 1];
  }

  double best_value = -std::numeric_limits<double>::infinity();
  std::size_t best_i = n;
  std::size_t best_j = n;
  for (std::size_t i = 0; i < n; ++i) {
    const double p0 = i * options.step;
    // Smallest feasible p1 index: j * step >= p0 - delta.
    const double lower = (p0 - delta) / options.step;
    std::size_t j_min = 0;
    if (lower > 0.0) j_min = static_cast<std::size_t>(std::ceil(lower - 1e-9));
    if (j_min >= n) continue;
    const std::size_t j = best_from[j_min];
    const double value = q * expected_revenue(theta0, p0, x) + r1[j];
    if (value > best_value) {
      best_value = value;
      best_i = i;
      best_j = j;
    }
  }
  if (best_i == n) throw std::runtime_error("grid oracle: no feasible grid point");
  const double p0 = best_i * options.step;
  const double p1 = best_j * options.step;
  return {p0, p1, std::abs(p0 - p1 - delta) <= options.step};
}

double safety_threshold(double delta, double c_delta, std::size_t exploration_length)
{
  if (exploration_length < 2) throw std::invalid_argument("exploration length must be >= 2");
  const double t0 = static_cast<double>(exploration_length);
  return delta - c_delta * std::sqrt(std::log(t0) / t0);
}

PricePair policy_prices_estimated(const DemandParams& theta0_hat, const DemandParams& theta1_hat,
                                  const PluginPricing& rule, const AugmentedFeature& x)
{
  const double threshold = safety_threshold(rule.delta, rule.c_delta, rule.exploration_length);
  PricePair pair;
  if (unconstrained_gap(theta0_hat, theta1_hat, x) <= threshold) {
    pair = {unconstrained_price(theta0_hat, x), unconstrained_price(theta1_hat, x), false};
  } else {
    pair = constrained_prices(theta0_hat, theta1_hat, rule.q, rule.delta, x);
  }
  pair.p0 = std::clamp(pair.p0, 0.0, rule.price_cap);
  pair.p1 = std::clamp(pair.p1, 0.0, rule.price_cap);
  pair.constrained = pair.constrained && std::abs(pair.gap() - rule.delta) <= 1e-9;
  return pair;
}

}  // namespace fairprice
