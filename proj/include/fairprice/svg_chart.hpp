#pragma once

// Minimal line charts with shaded error bands, written as standalone SVG.
// Output depends only on the inputs, byte for byte.

#include <string>
#include <vector>

namespace fairprice {

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> band;  ///< half-width around y; empty for no band
  std::string color;         ///< empty picks from the default palette
};

struct ChartOptions {
  int width = 800;
  int height = 500;
  std::string title;
  std::string x_label = "t";
  std::string y_label = "cumulative regret";
};

std::string render_line_chart(const std::vector<ChartSeries>& series, const ChartOptions& options = {});

/// Evenly spaced round tick values inside [low, high], roughly `count` of them.
std::vector<double> nice_ticks(double low, double high, int count = 5);

std::string xml_escape(const std::string& text);

}  // namespace fairprice
