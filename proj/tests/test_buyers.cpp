#include "fairprice/buyers.hpp"
#include "fairprice/fair_solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <type_traits>

using namespace fairprice;

namespace {

std::vector<PublicRecord> offset_history(std::size_t n, double offset, std::uint64_t seed)
{
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<PublicRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    Vector x(2);
    x << u(rng), u(rng);
    const double base = 1.0 + 0.3 * x[0] - 0.2 * x[1];
    out.push_back({x, Group::One, base});
    out.push_back({x, Group::Zero, base + offset});
  }
  return out;
}

// Exploitation price law of the simulation study: true parameters, delta = 0.5.
double section5_price(const Vector& x, Group g)
{
  Vector b0(4), b1(4);
  b0 << 2.0, 0.5, 1.0, 1.0;
  b1 << 1.0, 0.25, 0.5, 0.5;
  const PricePair p = optimal_fair_prices(DemandParams(-1.0, b0), DemandParams(-1.0, b1), 0.5, 0.5, augment(x));
  return std::clamp(p.price_for(g), 0.0, 3.0);
}

}  // namespace

static_assert(!std::is_constructible_v<PublicRecord, Vector, Group, double, double>,
              "released records carry no demand");

TEST(ReportGroup, Examples)
{
  EXPECT_EQ(report_group(Group::Zero, 0.85, 0.8), Group::One);
  EXPECT_EQ(report_group(Group::Zero, 0.8, 0.8), Group::Zero);
  EXPECT_EQ(report_group(Group::One, 99.0, 0.8), Group::One);
  EXPECT_EQ(report_group(Group::One, -5.0, 0.8), Group::One);
}

TEST(ReportGroup, Monotone)
{
  for (double a = -1.0; a <= 2.0; a += 0.05) {
    for (double b = a; b <= 2.0; b += 0.05) {
      if (report_group(Group::Zero, a, 0.8) == Group::One) EXPECT_EQ(report_group(Group::Zero, b, 0.8), Group::One);
    }
  }
}

TEST(LinearOracle, ConstantOffsetIsExact)
{
  const auto history = offset_history(200, 0.3, 1);
  const PriceOracle o = train_oracle(OracleKind::Linear, history);
  Vector x(2);
  x << 0.4, -1.1;
  EXPECT_NEAR(learned_gap(o, x), 0.3, 1e-6);
  EXPECT_NEAR(predict_price(o, x, Group::One), 1.0 + 0.3 * 0.4 + 0.2 * 1.1, 1e-8);
  EXPECT_EQ(o.trained_on(), history.size());
}

TEST(LinearOracle, UniformPhaseHasNoGap)
{
  Rng rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0), price(0.0, 3.0);
  std::bernoulli_distribution group(0.5);
  std::vector<PublicRecord> history;
  for (int i = 0; i < 500; ++i) {
    Vector x(3);
    x << u(rng), u(rng), u(rng);
    history.push_back({x, group(rng) ? Group::One : Group::Zero, price(rng)});
  }
  const PriceOracle o = train_oracle(OracleKind::Linear, history);
  EXPECT_LT(std::abs(learned_gap(o, Vector::Zero(3))), 0.1);
}

TEST(LinearOracle, MissingGroupFallsBackToPooledFit)
{
  auto history = offset_history(50, 0.0, 2);
  std::erase_if(history, [](const PublicRecord& r) { return r.reported_group == Group::Zero; });
  const PriceOracle o = train_oracle(OracleKind::Linear, history);
  EXPECT_NEAR(learned_gap(o, Vector::Zero(2)), 0.0, 1e-12);
}

TEST(Oracles, EmptyHistoryAndUntrained)
{
  EXPECT_THROW(train_oracle(OracleKind::Tree, {}), std::invalid_argument);
  const PriceOracle o;
  EXPECT_FALSE(o.trained());
  EXPECT_THROW(predict_price(o, Vector::Zero(2), Group::Zero), std::logic_error);
}

TEST(TreeOracle, SingleRecordPredictsItEverywhere)
{
  std::vector<PublicRecord> history = {{Vector::Constant(2, 0.5), Group::Zero, 1.7}};
  const PriceOracle o = train_oracle(OracleKind::Tree, history);
  EXPECT_EQ(predict_price(o, Vector::Constant(2, -3.0), Group::One), 1.7);
  EXPECT_EQ(predict_price(o, Vector::Constant(2, 9.0), Group::Zero), 1.7);
}

TEST(TreeOracle, ConstantPrices)
{
  auto history = offset_history(100, 0.0, 3);
  for (auto& r : history) r.price = 0.9;
  const PriceOracle o = train_oracle(OracleKind::Tree, history);
  EXPECT_NEAR(predict_price(o, Vector::Zero(2), Group::Zero), 0.9, 1e-12);
  EXPECT_NEAR(predict_price(o, Vector::Constant(2, 5.0), Group::One), 0.9, 1e-12);
  EXPECT_EQ(learned_gap(o, Vector::Constant(2, 1.0)), 0.0);
}

TEST(RegressionTree, RespectsDepthAndLeafSize)
{
  Rng rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix features(400, 2);
  Vector targets(400);
  for (int i = 0; i < 400; ++i) {
    features(i, 0) = u(rng);
    features(i, 1) = u(rng);
    targets[i] = std::sin(3.0 * features(i, 0)) + features(i, 1);
  }
  RegressionTree tree;
  tree.fit(features, targets, TreeOptions{3, 5});
  EXPECT_LE(tree.depth(), 3);
  EXPECT_LE(tree.leaf_count(), 8u);
  RegressionTree step;
  Matrix f(10, 1);
  Vector y(10);
  for (int i = 0; i < 10; ++i) f(i, 0) = i, y[i] = i < 5 ? 0.0 : 1.0;
  step.fit(f, y, TreeOptions{5, 5});
  EXPECT_EQ(step.predict(Vector::Constant(1, 2.0)), 0.0);
  EXPECT_EQ(step.predict(Vector::Constant(1, 7.0)), 1.0);
  EXPECT_EQ(step.leaf_count(), 2u);
}

TEST(Mlp, ShapeAndLossDecreases)
{
  Rng rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Matrix features(500, 4);
  Vector targets(500);
  for (int i = 0; i < 500; ++i) {
    for (int j = 0; j < 3; ++j) features(i, j) = u(rng);
    features(i, 3) = i % 2;
    targets[i] = section5_price(features.row(i).head(3).transpose(), group_from_int(i % 2));
  }
  Rng init(6);
  Mlp net(4, MlpOptions{}, init);
  const Mlp::TrainReport report = net.train(features, targets, 200, init);
  EXPECT_LE(report.final_loss, report.initial_loss);
  EXPECT_LT(report.final_loss, 0.1 * report.initial_loss);
}

TEST(MlpOracle, LearnsExploitationPriceLaw)
{
  Rng rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::bernoulli_distribution group(0.5);
  std::vector<PublicRecord> history;
  for (int i = 0; i < 2000; ++i) {
    Vector x(3);
    x << u(rng), u(rng), u(rng);
    const Group g = group(rng) ? Group::One : Group::Zero;
    history.push_back({x, g, section5_price(x, g)});
  }
  OracleOptions options;
  options.initial_epochs = 2000;
  const PriceOracle o = train_oracle(OracleKind::Mlp, history, options);

  double abs_error = 0.0, gap_error = 0.0;
  int central = 0;
  const int n = 500;
  for (int i = 0; i < n; ++i) {
    Vector x(3);
    x << u(rng), u(rng), u(rng);
    const Group g = group(rng) ? Group::One : Group::Zero;
    abs_error += std::abs(predict_price(o, x, g) - section5_price(x, g));
    if (x.cwiseAbs().maxCoeff() < 1.0) {
      gap_error = std::max(gap_error, std::abs(learned_gap(o, x) -
                                               (section5_price(x, Group::Zero) - section5_price(x, Group::One))));
      ++central;
    }
  }
  EXPECT_LT(abs_error / n, 0.1);
  ASSERT_GT(central, 0);
  EXPECT_LT(gap_error, 0.1);
}

TEST(StrategicBuyers, ModesDuringExploitation)
{
  const Vector x = Vector::Zero(2);
  StrategicBuyers truthful(BuyerBehavior{BuyerMode::Truthful}, 0.8, 1);
  StrategicBuyers always(BuyerBehavior{BuyerMode::AlwaysManipulate}, 0.8, 1);
  EXPECT_EQ(truthful.decide(x, Group::Zero, true).reported, Group::Zero);
  EXPECT_EQ(always.decide(x, Group::Zero, true).reported, Group::One);
  EXPECT_EQ(always.decide(x, Group::One, true).reported, Group::One);
  EXPECT_EQ(always.decide(x, Group::Zero, false).reported, Group::Zero);
}

TEST(StrategicBuyers, LearnerNeverManipulatesDuringExploration)
{
  BuyerBehavior b{BuyerMode::OracleLearner, OracleKind::Linear, 1};
  StrategicBuyers buyers(b, 0.1, 1);
  for (const auto& r : offset_history(50, 0.5, 8)) buyers.release(r);
  buyers.prepare_exploitation_step();
  const Vector x = Vector::Zero(2);
  EXPECT_EQ(buyers.decide(x, Group::Zero, false).reported, Group::Zero);
  const ReportDecision d = buyers.decide(x, Group::Zero, true);
  ASSERT_TRUE(d.delta_hat.has_value());
  EXPECT_NEAR(*d.delta_hat, 0.5, 1e-6);
  EXPECT_EQ(d.reported, Group::One);
}

TEST(StrategicBuyers, RetrainCadence)
{
  BuyerBehavior b{BuyerMode::OracleLearner, OracleKind::Linear, 10};
  StrategicBuyers buyers(b, 0.8, 1);
  for (const auto& r : offset_history(20, 0.0, 9)) buyers.release(r);
  for (int step = 0; step < 30; ++step) buyers.prepare_exploitation_step();
  EXPECT_EQ(buyers.retrain_count(), 3u);
}
