#include "fairprice/fair_solver.hpp"
#include "fairprice/instances.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace fairprice;

namespace {

struct Sim {
  DemandParams t0, t1;
};

Sim section5()
{
  Vector b0(4), b1(4);
  b0 << 2.0, 0.5, 1.0, 1.0;
  b1 << 1.0, 0.25, 0.5, 0.5;
  return {DemandParams(-1.0, b0), DemandParams(-1.0, b1)};
}

}  // namespace

TEST(PricingParams, Section5)
{
  const Sim s = section5();
  const PricingParams pp = pricing_params(s.t0, s.t1, 0.5, 0.3);
  EXPECT_NEAR(pp.gamma1.dot(augment(Vector::Zero(3)).values()), 0.75, 1e-15);
  EXPECT_NEAR(pp.gamma2, 0.15, 1e-15);
  EXPECT_EQ(pricing_params(s.t0, s.t1, 0.5, 0.0).gamma2, 0.0);
}

TEST(PricingParams, Theorem1Instance)
{
  const Environment env = theorem1_env();
  const PricingParams pp = pricing_params(env.theta0(), env.theta1(), 0.5, 0.25);
  for (double x : {-0.5, 0.0, 0.3}) {
    EXPECT_NEAR(pp.gamma1.dot(augment(Vector::Constant(1, x)).values()), (2.0 + x) / 3.0, 1e-15);
  }
  EXPECT_NEAR(pp.gamma2, 1.0 / 6.0, 1e-15);
}

TEST(OptimalFairPrices, Examples)
{
  const Sim s = section5();
  const auto zero = augment(Vector::Zero(3));
  const PricePair loose = optimal_fair_prices(s.t0, s.t1, 0.5, 0.799, zero);
  EXPECT_FALSE(loose.constrained);
  EXPECT_DOUBLE_EQ(loose.p0, 1.0);
  EXPECT_DOUBLE_EQ(loose.p1, 0.5);

  const PricePair tight = optimal_fair_prices(s.t0, s.t1, 0.5, 0.3, zero);
  EXPECT_TRUE(tight.constrained);
  EXPECT_NEAR(tight.p0, 0.9, 1e-15);
  EXPECT_NEAR(tight.p1, 0.6, 1e-15);
  EXPECT_NEAR(tight.gap(), 0.3, 1e-9);
}

TEST(OptimalFairPrices, Theorem1ClosedForm)
{
  const Theorem1Instance inst = theorem1_instance();
  for (int i = 0; i < 100; ++i) {
    const double x = -0.5 + i / 99.0;
    const PricePair p = optimal_fair_prices(inst.env.theta0(), inst.env.theta1(), 0.5, 0.25,
                                            augment(Vector::Constant(1, x)));
    EXPECT_NEAR(p.p0, x / 3.0 + 5.0 / 6.0, 1e-12);
    EXPECT_NEAR(p.p1, x / 3.0 + 7.0 / 12.0, 1e-12);
    EXPECT_NEAR(unconstrained_price(inst.env.theta0(), augment(Vector::Constant(1, x))), (2.0 + x) / 2.0, 1e-15);
    EXPECT_NEAR(unconstrained_price(inst.env.theta1(), augment(Vector::Constant(1, x))), (2.0 + x) / 4.0, 1e-15);
  }
}

TEST(OptimalFairPrices, ContinuousAtSwitch)
{
  const Sim s = section5();
  const auto x = augment(Vector::Zero(3));
  const double gap = unconstrained_gap(s.t0, s.t1, x);
  EXPECT_DOUBLE_EQ(gap, 0.5);
  const PricePair at = optimal_fair_prices(s.t0, s.t1, 0.5, gap, x);
  const PricePair just_below = optimal_fair_prices(s.t0, s.t1, 0.5, std::nextafter(gap, 0.0), x);
  EXPECT_FALSE(at.constrained);
  EXPECT_TRUE(just_below.constrained);
  EXPECT_NEAR(at.p0, just_below.p0, 1e-9);
  EXPECT_NEAR(at.p1, just_below.p1, 1e-9);
}

TEST(GridOracle, Examples)
{
  const Sim s = section5();
  const auto zero = augment(Vector::Zero(3));
  const PricePair g = grid_oracle_prices(s.t0, s.t1, 0.5, 0.799, zero);
  EXPECT_NEAR(g.p0, 1.0, 1e-3);
  EXPECT_NEAR(g.p1, 0.5, 1e-3);

  const PricePair wide = grid_oracle_prices(s.t0, s.t1, 0.5, 10.0, zero);
  EXPECT_NEAR(wide.p0, unconstrained_price(s.t0, zero), 1e-3);
  EXPECT_NEAR(wide.p1, unconstrained_price(s.t1, zero), 1e-3);

  // Single price: maximize 0.5 p (2 - p) + 0.5 p (1 - p) = p (1.5 - p) / 1, peak at 0.75.
  const PricePair pooled = grid_oracle_prices(s.t0, s.t1, 0.5, 0.0, zero);
  EXPECT_NEAR(pooled.p0, pooled.p1, 1e-12);
  EXPECT_NEAR(pooled.p0, 0.75, 1e-3);
}

TEST(GridOracle, AgreesWithClosedFormOnRandomInstances)
{
  Rng rng(11);
  std::uniform_real_distribution<double> alpha(-3.0, -0.1), beta(-3.0, 3.0), share(0.1, 0.9), level(0.0, 1.0),
      feature(-2.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    Vector b0(3), b1(3), x(2);
    for (int i = 0; i < 3; ++i) b0[i] = beta(rng), b1[i] = beta(rng);
    for (int i = 0; i < 2; ++i) x[i] = feature(rng);
    const DemandParams t0(alpha(rng), b0), t1(alpha(rng), b1);
    const double q = share(rng), delta = level(rng);
    const auto ax = augment(x);
    const PricePair exact = optimal_fair_prices(t0, t1, q, delta, ax);
    const PricePair grid = grid_oracle_prices(t0, t1, q, delta, ax);
    const double oracle = weighted_revenue(t0, t1, q, grid.p0, grid.p1, ax);
    EXPECT_GE(weighted_revenue(t0, t1, q, exact.p0, exact.p1, ax), oracle - 1e-5 * (1.0 + std::abs(oracle)));
    EXPECT_LE(exact.gap(), delta + 1e-9);
    EXPECT_LE(grid.gap(), delta + 1e-9);
  }
}

TEST(SafetyThreshold, Value)
{
  EXPECT_NEAR(safety_threshold(0.799, 1.0, 100), 0.799 - std::sqrt(std::log(100.0) / 100.0), 1e-15);
  EXPECT_NEAR(safety_threshold(0.799, 1.0, 100), 0.5843, 2e-4);
  EXPECT_THROW(safety_threshold(0.5, 1.0, 1), std::invalid_argument);
}

TEST(PolicyPricesEstimated, PerfectEstimatesMatchClairvoyant)
{
  const Sim s = section5();
  PluginPricing rule{0.5, 0.799, 1.0, 100000000, 3.0};
  Rng rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double tau = safety_threshold(rule.delta, rule.c_delta, rule.exploration_length);
  for (int i = 0; i < 200; ++i) {
    Vector x(3);
    for (int j = 0; j < 3; ++j) x[j] = u(rng);
    const auto ax = augment(x);
    if (unconstrained_gap(s.t0, s.t1, ax) > tau) continue;
    const PricePair est = policy_prices_estimated(s.t0, s.t1, rule, ax);
    const PricePair opt = optimal_fair_prices(s.t0, s.t1, 0.5, 0.799, ax);
    EXPECT_NEAR(est.p0, std::clamp(opt.p0, 0.0, 3.0), 1e-12);
    EXPECT_NEAR(est.p1, std::clamp(opt.p1, 0.0, 3.0), 1e-12);
  }
}

TEST(PolicyPricesEstimated, ZeroMarginIsPluginOptimum)
{
  const Sim s = section5();
  PluginPricing rule{0.5, 0.3, 0.0, 50, 3.0};
  const auto zero = augment(Vector::Zero(3));
  const PricePair p = policy_prices_estimated(s.t0, s.t1, rule, zero);
  EXPECT_NEAR(p.p0, 0.9, 1e-15);
  EXPECT_NEAR(p.p1, 0.6, 1e-15);
}

TEST(PolicyPricesEstimated, ClampsToPriceBox)
{
  const Sim s = section5();
  PluginPricing rule{0.5, 0.799, 1.0, 1000, 0.7};
  const PricePair p = policy_prices_estimated(s.t0, s.t1, rule, augment(Vector::Zero(3)));
  EXPECT_LE(p.p0, 0.7);
  EXPECT_GE(p.p1, 0.0);
  Vector far(3);
  far << -2.0, -2.0, -2.0;
  const PricePair low = policy_prices_estimated(s.t0, s.t1, rule, augment(far));
  EXPECT_GE(low.p0, 0.0);
  EXPECT_GE(low.p1, 0.0);
}
