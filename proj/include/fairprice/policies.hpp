#pragma once

// Seller policies: explore-then-commit fair pricing and the clairvoyant benchmark.

#include "fairprice/estimation.hpp"
#include "fairprice/fair_solver.hpp"

#include <optional>
#include <vector>

namespace fairprice {

struct SellerConfig {
  std::size_t horizon = 10000;  ///< T
  double price_cap = 3.0;       ///< B
  double tau = 10.0;            ///< exploration multiplier
  double c_delta = 1.0;         ///< safety margin coefficient
  double delta = 0.799;         ///< fairness level
  std::optional<double> q;      ///< group-0 share used for pricing; defaults to the environment's

  /// round(tau * sqrt(T)), at least 2 (d + 2).
  std::size_t exploration_length(Eigen::Index dim) const;
  void validate(Eigen::Index dim) const;
};

enum class Phase { Exploration, Exploitation };

/// Explore-then-commit seller. Steps are 1-based; offer() prices step t()+1.
class PolicyState {
 public:
  PolicyState(SellerConfig config, Eigen::Index dim, double q);

  Phase phase() const { return phase_; }
  std::size_t t() const { return t_; }
  std::size_t exploration_length() const { return exploration_length_; }
  const SellerConfig& config() const { return config_; }

  /// Prices the next step for both groups. Exploration draws one Uniform(0, B)
  /// price shared by both groups; exploitation uses the plug-in rule and no randomness.
  PricePair offer(const Vector& x, Rng& price_rng);
  double next_price(const Vector& x, Group reported_group, Rng& price_rng);

  /// Seller-side record of an exploration sale (true group known).
  void record_sale(SaleRecord record);
  /// Fits both groups; requires t() == exploration_length().
  void end_exploration();

  const EstimatedTheta& estimate(Group g) const;
  const std::vector<SaleRecord>& collected() const { return collected_; }
  PluginPricing plugin_rule() const;

 private:
  SellerConfig config_;
  double q_;
  Eigen::Index dim_;
  std::size_t exploration_length_;
  Phase phase_ = Phase::Exploration;
  std::size_t t_ = 0;
  std::vector<SaleRecord> collected_;
  std::optional<EstimatedTheta> estimate0_;
  std::optional<EstimatedTheta> estimate1_;
};

PricePair clairvoyant_prices(const Environment& env, double delta, const AugmentedFeature& x);
double clairvoyant_price(const Environment& env, double delta, const Vector& x, Group true_group);

}  // namespace fairprice
