#include "fairprice/config.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace fairprice;

TEST(KeyValueConfig, ParsesSectionsAndTypes)
{
  std::istringstream in("[seller]\nhorizon = 5000\ndelta = 0.25\n[environment]\nbeta0 = 2, 0.5, 1\nname = abc\n");
  const KeyValueConfig cfg = KeyValueConfig::parse(in);
  EXPECT_EQ(cfg.get_int("seller.horizon"), 5000);
  EXPECT_EQ(cfg.get_double("seller.delta"), 0.25);
  EXPECT_EQ(cfg.get_string("environment.name"), "abc");
  const Vector b = *cfg.get_vector("environment.beta0");
  ASSERT_EQ(b.size(), 3);
  EXPECT_EQ(b[1], 0.5);
  EXPECT_FALSE(cfg.has("seller.tau"));
  EXPECT_FALSE(cfg.get_double("seller.tau").has_value());
}

TEST(KeyValueConfig, BadNumbersAreConfigErrors)
{
  std::istringstream in("[seller]\nhorizon = many\n");
  const KeyValueConfig cfg = KeyValueConfig::parse(in);
  EXPECT_THROW(cfg.get_int("seller.horizon"), ConfigError);
  EXPECT_THROW(cfg.require_double("seller.delta"), ConfigError);
}

TEST(KeyValueConfig, WriteParseRoundTrip)
{
  KeyValueConfig cfg;
  cfg.set("a.x", 0.1);
  cfg.set("a.n", 7LL);
  Vector v(2);
  v << -1.25, 1e-17;
  cfg.set("b.v", v);
  std::stringstream s;
  cfg.write(s);
  const KeyValueConfig back = KeyValueConfig::parse(s);
  EXPECT_EQ(back.get_double("a.x"), 0.1);
  EXPECT_EQ(back.get_int("a.n"), 7);
  EXPECT_EQ(*back.get_vector("b.v"), v);
}

TEST(FormatDouble, ShortestRoundTrip)
{
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
  for (double v : {1.0 / 3.0, 5e-300, -123456.789, 0.799}) EXPECT_EQ(std::stod(format_double(v)), v);
}
