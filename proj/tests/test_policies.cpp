#include "fairprice/instances.hpp"
#include "fairprice/policies.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace fairprice;

namespace {

Environment section5(double sigma = 1.0)
{
  Vector b0(4), b1(4);
  b0 << 2.0, 0.5, 1.0, 1.0;
  b1 << 1.0, 0.25, 0.5, 0.5;
  return Environment(DemandParams(-1.0, b0), DemandParams(-1.0, b1), 0.5, sigma, FeatureSampler{3});
}

// Runs exploration with truthful sales and returns the policy ready for exploitation.
PolicyState explored(const Environment& env, SellerConfig config, std::uint64_t seed)
{
  PolicyState policy(config, env.dim(), env.q());
  Rng feat(seed), grp(seed + 1), noise(seed + 2), price(seed + 3);
  while (policy.t() < policy.exploration_length()) {
    const Vector x = env.sample_features(feat);
    const Group g = env.sample_group(policy.t() + 1, grp);
    const double p = policy.next_price(x, g, price);
    policy.record_sale({x, g, p, realize_demand(env, g, p, augment(x), noise)});
  }
  policy.end_exploration();
  return policy;
}

}  // namespace

TEST(SellerConfig, ExplorationLength)
{
  SellerConfig c;
  c.horizon = 10000;
  c.tau = 10.0;
  EXPECT_EQ(c.exploration_length(3), 1000u);
  c.horizon = 100;
  c.tau = 0.1;
  EXPECT_EQ(c.exploration_length(3), 10u);
  c.tau = 20.0;
  EXPECT_THROW(c.validate(3), ConfigError);
  c = SellerConfig{};
  c.horizon = 3;
  EXPECT_THROW(c.validate(3), ConfigError);
  c = SellerConfig{};
  c.delta = 0.0;
  EXPECT_THROW(c.validate(3), ConfigError);
}

TEST(PolicyState, ExplorationPricesAreUniformAndGroupBlind)
{
  SellerConfig c;
  c.horizon = 4000;
  c.tau = 10.0;
  PolicyState a(c, 3, 0.5), b(c, 3, 0.5);
  Rng ra(1), rb(1);
  Rng xs(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double sum = 0.0;
  for (std::size_t t = 1; t <= a.exploration_length(); ++t) {
    Vector x(3);
    x << u(xs), u(xs), u(xs);
    const double pa = a.next_price(x, t % 2 ? Group::Zero : Group::One, ra);
    const double pb = b.next_price(x, t % 3 ? Group::One : Group::Zero, rb);
    ASSERT_EQ(pa, pb);
    ASSERT_GT(pa, 0.0);
    ASSERT_LT(pa, c.price_cap);
    sum += pa;
  }
  EXPECT_NEAR(sum / static_cast<double>(a.exploration_length()), c.price_cap / 2.0,
              4.0 * c.price_cap / std::sqrt(12.0 * static_cast<double>(a.exploration_length())));
}

TEST(PolicyState, ExploitationBeforeEndIsAnError)
{
  SellerConfig c;
  c.horizon = 100;
  c.tau = 1.0;
  PolicyState p(c, 3, 0.5);
  Rng rng(1);
  for (std::size_t t = 0; t < p.exploration_length(); ++t) p.offer(Vector::Zero(3), rng);
  EXPECT_THROW(p.offer(Vector::Zero(3), rng), std::logic_error);
  EXPECT_THROW(p.estimate(Group::Zero), std::logic_error);
}

TEST(PolicyState, PhaseBoundaryStopsUsingRng)
{
  const Environment env = section5(0.0);
  SellerConfig c;
  c.horizon = 400;
  c.tau = 2.0;
  PolicyState policy = explored(env, c, 10);
  EXPECT_EQ(policy.phase(), Phase::Exploitation);
  EXPECT_EQ(policy.collected().size(), policy.exploration_length());
  Rng rng(99);
  const Rng before = rng;
  for (int i = 0; i < 50; ++i) policy.offer(Vector::Zero(3), rng);
  EXPECT_TRUE(rng == before);
}

TEST(PolicyState, NoiselessExplorationGivesClairvoyantPrices)
{
  const Environment env = section5(0.0);
  SellerConfig c;
  c.horizon = 10000;
  c.delta = 0.799;
  PolicyState policy = explored(env, c, 20);
  Rng rng(3);
  Vector x = Vector::Zero(3);
  const double tau = safety_threshold(c.delta, c.c_delta, policy.exploration_length());
  ASSERT_LE(unconstrained_gap(env.theta0(), env.theta1(), augment(x)), tau);
  EXPECT_NEAR(policy.next_price(x, Group::One, rng), 0.5, 1e-9);
  EXPECT_NEAR(clairvoyant_price(env, c.delta, x, Group::One), 0.5, 1e-15);
  EXPECT_NEAR(policy.estimate(Group::Zero).theta.alpha(), -1.0, 1e-9);
}

TEST(PolicyState, OfferedGapNeverExceedsDelta)
{
  const Environment env = section5();
  SellerConfig c;
  c.horizon = 10000;
  c.delta = 0.3;
  PolicyState policy = explored(env, c, 30);
  Rng rng(4), xs(5);
  for (int i = 0; i < 500; ++i) {
    const Vector x = env.sample_features(xs);
    const PricePair p = policy.offer(x, rng);
    const double gap = p.gap();
    EXPECT_LE(gap, c.delta + 1e-9);
    if (p.constrained && p.p0 > 0.0 && p.p0 < c.price_cap && p.p1 > 0.0 && p.p1 < c.price_cap) {
      EXPECT_NEAR(gap, c.delta, 1e-9);
    }
  }
}

TEST(PolicyState, TooFewSamplesPerGroupNamesTheGroup)
{
  Vector b(2);
  b << 1.0, 0.5;
  const Environment env(DemandParams(-1.0, b), DemandParams(-1.0, b), 0.999, 1.0, FeatureSampler{1});
  SellerConfig c;
  c.horizon = 100;
  c.tau = 0.6;
  try {
    explored(env, c, 1);
    FAIL() << "expected a fit failure";
  } catch (const SingularFitError& e) {
    EXPECT_NE(std::string(e.what()).find("group 1"), std::string::npos) << e.what();
  }
}

TEST(Clairvoyant, HardInstances)
{
  EXPECT_NEAR(clairvoyant_price(theorem1_env(), 0.25, Vector::Zero(1), Group::Zero), 5.0 / 6.0, 1e-15);
  EXPECT_NEAR(clairvoyant_price(theorem3_env(-0.4), 0.25, Vector(0), Group::Zero), 1.0, 1e-15);
  EXPECT_NEAR(clairvoyant_price(theorem3_env(-0.4), 0.25, Vector(0), Group::One), 0.75, 1e-15);
}
