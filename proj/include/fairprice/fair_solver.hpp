#pragma once

// Revenue maximization for two groups subject to p0 - p1 <= delta.
//
//   max_{p0,p1}  q R0(p0, x) + (1 - q) R1(p1, x)   s.t.  p0 - p1 <= delta
//
// When the unconstrained optima already satisfy the constraint they are
// returned unchanged; otherwise the constraint is tight and both prices are
// shifted around the pooled optimum gamma1' x~ + gamma2.

#include "fairprice/core_model.hpp"

namespace fairprice {

struct PricingParams {
  Vector gamma1;
  double gamma2 = 0.0;
};

struct PricePair {
  double p0 = 0.0;
  double p1 = 0.0;
  bool constrained = false;

  double price_for(Group g) const { return g == Group::Zero ? p0 : p1; }
  double gap() const { return p0 - p1; }
};

PricingParams pricing_params(const DemandParams& theta0, const DemandParams& theta1, double q, double delta);

/// -beta' x~ / (2 alpha): the revenue maximizer of one group on its own.
double unconstrained_price(const DemandParams& theta, const AugmentedFeature& x);

/// p0# - p1#, the gap between the two unconstrained optima.
double unconstrained_gap(const DemandParams& theta0, const DemandParams& theta1, const AugmentedFeature& x);

/// Clairvoyant fairness-constrained optimum.
PricePair optimal_fair_prices(const DemandParams& theta0, const DemandParams& theta1, double q, double delta,
                              const AugmentedFeature& x);

/// q R0(p0) + (1 - q) R1(p1).
double weighted_revenue(const DemandParams& theta0, const DemandParams& theta1, double q, double p0, double p1,
                        const AugmentedFeature& x);

struct GridOptions {
  double step = 1e-3;
  double upper = 5.0;
};

/// Exhaustive search over the grid {0, step, ..., upper}^2 restricted to p0 - p1 <= delta.
PricePair grid_oracle_prices(const DemandParams& theta0, const DemandParams& theta1, double q, double delta,
                             const AugmentedFeature& x, GridOptions options = {});

/// delta - c_delta * sqrt(log T0 / T0).
double safety_threshold(double delta, double c_delta, std::size_t exploration_length);

struct PluginPricing {
  double q = 0.5;
  double delta = 0.0;
  double c_delta = 1.0;
  std::size_t exploration_length = 2;
  double price_cap = 1.0;
};

/// Plug-in pricing with a safety margin on the constraint switch. Estimates
/// are expected to already satisfy the alpha guard. Prices are clamped to [0, B].
PricePair policy_prices_estimated(const DemandParams& theta0_hat, const DemandParams& theta1_hat,
                                  const PluginPricing& rule, const AugmentedFeature& x);

}  // namespace fairprice
