#include "fairprice/policies.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fairprice {

std::size_t SellerConfig::exploration_length(Eigen::Index dim) const
{
  const auto nominal = static_cast<std::size_t>(std::llround(tau * std::sqrt(static_cast<double>(horizon))));
  const auto floor = static_cast<std::size_t>(2 * (dim + 2));
  return std::max(nominal, floor);
}

void SellerConfig::validate(Eigen::Index dim) const
{
  if (horizon < 4) throw ConfigError("horizon T must be >= 4");
  if (!(price_cap > 0.0)) throw ConfigError("price cap B must be positive");
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  if (!(c_delta >= 0.0)) throw ConfigError("c_delta must be non-negative");
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  if (q && !(*q > 0.0 && *q < 1.0)) throw ConfigError("seller q must lie inside (0, 1)");
  const auto t0 = exploration_length(dim);
  if (t0 < 2 || t0 >= horizon) {
    throw ConfigError("exploration length " + std::to_string(t0) + " must satisfy 2 <= T0 < T=" +
                      std::to_string(horizon));
  }
}

PolicyState::PolicyState(SellerConfig config, Eigen::Index dim, double q)
    : config_(std::move(config)), q_(config_.q.value_or(q)), dim_(dim), exploration_length_(0)
{
  config_.validate(dim);
  exploration_length_ = config_.exploration_length(dim);
  collected_.reserve(exploration_length_);
}

PluginPricing PolicyState::plugin_rule() const
{
  return PluginPricing{q_, config_.delta, config_.c_delta, exploration_length_, config_.price_cap};
}

PricePair PolicyState::offer(const Vector& x, Rng& price_rng)
{
  if (x.size() != dim_) throw std::invalid_argument("feature dimension mismatch");
  const std::size_t step = t_ + 1;
  if (step > config_.horizon) throw std::logic_error("policy asked to price beyond the horizon");
  if (step <= exploration_length_) {
    std::uniform_real_distribution<double> unif(0.0, config_.price_cap);
    const double p = unif(price_rng);
    t_ = step;
    return {p, p, false};
  }
  if (phase_ != Phase::Exploitation) throw std::logic_error("exploitation pricing requested before end_exploration()");
  t_ = step;
  return policy_prices_estimated(estimate0_->theta, estimate1_->theta, plugin_rule(), augment(x));
}

double PolicyState::next_price(const Vector& x, Group reported_group, Rng& price_rng)
{
  return offer(x, price_rng).price_for(reported_group);
}

void PolicyState::record_sale(SaleRecord record)
{
  if (phase_ != Phase::Exploration) throw std::logic_error("sales are only collected during exploration");
  collected_.push_back(std::move(record));
}

void PolicyState::end_exploration()
{
  if (phase_ != Phase::Exploration) throw std::logic_error("exploration already ended");
  if (t_ != exploration_length_) {
    throw std::logic_error("end_exploration() at t=" + std::to_string(t_) + ", expected T0=" +
                           std::to_string(exploration_length_));
  }
  estimate0_ = fit_ols(collected_, Group::Zero);
  estimate1_ = fit_ols(collected_, Group::One);
  phase_ = Phase::Exploitation;
}

const EstimatedTheta& PolicyState::estimate(Group g) const
{
  const auto& e = g == Group::Zero ? estimate0_ : estimate1_;
  if (!e) throw std::logic_error("no estimates before the end of exploration");
  return *e;
}

PricePair clairvoyant_prices(const Environment& env, double delta, const AugmentedFeature& x)
{
  return optimal_fair_prices(env.theta0(), env.theta1(), env.q(), delta, x);
}

double clairvoyant_price(const Environment& env, double delta, const Vector& x, Group true_group)
{
  return clairvoyant_prices(env, delta, augment(x)).price_for(true_group);
}

}  // namespace fairprice
