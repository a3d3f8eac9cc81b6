#include "fairprice/svg_chart.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <gtest/gtest.h>

#include <functional>
#include <sstream>

using namespace fairprice;

namespace {

boost::property_tree::ptree parse(const std::string& svg)
{
  std::istringstream in(svg);
  boost::property_tree::ptree tree;
  boost::property_tree::read_xml(in, tree);
  return tree;
}

std::size_t count_elements(const boost::property_tree::ptree& node, const std::string& name)
{
  std::size_t n = 0;
  for (const auto& [key, child] : node) {
    if (key == name) ++n;
    n += count_elements(child, name);
  }
  return n;
}

std::vector<ChartSeries> two_series()
{
  ChartSeries a{"oracle-learner", {1, 2, 3, 4}, {1, 1.5, 1.8, 2}, {0.1, 0.1, 0.2, 0.2}, ""};
  ChartSeries b{"always <manipulate>", {1, 2, 3, 4}, {1, 2, 3, 4}, {}, "#aa0000"};
  return {a, b};
}

}  // namespace

TEST(SvgChart, IsValidXmlWithOneLinePerSeries)
{
  const std::string svg = render_line_chart(two_series(), ChartOptions{640, 400, "Regret & more", "t", "regret"});
  const auto tree = parse(svg);
  ASSERT_EQ(tree.count("svg"), 1u);
  EXPECT_EQ(count_elements(tree, "polyline"), 2u);
  EXPECT_EQ(tree.get<std::string>("svg.<xmlattr>.width"), "640");
  EXPECT_NE(svg.find("always &lt;manipulate&gt;"), std::string::npos);
  EXPECT_NE(svg.find("Regret &amp; more"), std::string::npos);
}

TEST(SvgChart, BandsOnlyWhereGiven)
{
  const std::string svg = render_line_chart(two_series());
  const auto tree = parse(svg);
  std::size_t bands = 0;
  std::function<void(const boost::property_tree::ptree&)> walk = [&](const boost::property_tree::ptree& node) {
    for (const auto& [key, child] : node) {
      if (key == "path" && child.get<std::string>("<xmlattr>.class", "") == "band") ++bands;
      walk(child);
    }
  };
  walk(tree);
  EXPECT_EQ(bands, 1u);
}

TEST(SvgChart, Deterministic)
{
  EXPECT_EQ(render_line_chart(two_series()), render_line_chart(two_series()));
}

TEST(SvgChart, DegenerateInputs)
{
  EXPECT_NO_THROW(parse(render_line_chart({})));
  ChartSeries flat{"flat", {5}, {0}, {}, ""};
  EXPECT_NO_THROW(parse(render_line_chart({flat})));
}

TEST(NiceTicks, RoundValuesInsideRange)
{
  const auto ticks = nice_ticks(0.0, 97.0, 5);
  ASSERT_EQ(ticks.size(), 5u);
  EXPECT_EQ(ticks.front(), 0.0);
  EXPECT_EQ(ticks.back(), 80.0);
  const double step = ticks[1] - ticks[0];
  EXPECT_DOUBLE_EQ(step, 20.0);
}

TEST(XmlEscape, SpecialCharacters)
{
  EXPECT_EQ(xml_escape("a<b>&\"c'"), "a&lt;b&gt;&amp;&quot;c&apos;");
}
