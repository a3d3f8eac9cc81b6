#include "fairprice/svg_chart.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fairprice {

namespace {

constexpr std::array<const char*, 6> kPalette = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v)
{
  char buf[32];
  if (v != 0.0 && (std::abs(v) >= 1e6 || std::abs(v) < 1e-3)) {
    std::snprintf(buf, sizeof buf, "%.2g", v);
  } else {
    std::snprintf(buf, sizeof buf, "%g", v);
  }
  return buf;
}

}  // namespace

std::string xml_escape(const std::string& text)
{
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<double> nice_ticks(double low, double high, int count)
{
  if (!(high > low)) high = low + 1.0;
  const double raw = (high - low) / std::max(1, count);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  const double step = (frac <= 1.0 ? 1.0 : frac <= 2.0 ? 2.0 : frac <= 5.0 ? 5.0 : 10.0) * mag;
  std::vector<double> ticks;
  for (double v = std::ceil(low / step - 1e-9) * step; v <= high + step * 1e-9; v += step) {
    ticks.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
  }
  return ticks;
}

std::string render_line_chart(const std::vector<ChartSeries>& series, const ChartOptions& options)
{
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = 0.0;
  double ymax = -std::numeric_limits<double>::infinity();
  for (const auto& s : series) {
    if (s.x.size() != s.y.size() || (!s.band.empty() && s.band.size() != s.y.size())) {
      throw std::invalid_argument("chart series '" + s.label + "' has mismatched lengths");
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double b = s.band.empty() ? 0.0 : s.band[i];
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i] - b);
      ymax = std::max(ymax, s.y[i] + b);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0.0;
    xmax = 1.0;
  }
  if (!std::isfinite(ymax)) ymax = 1.0;
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  const auto yticks = nice_ticks(ymin, ymax);
  const auto xticks = nice_ticks(xmin, xmax);
  ymin = std::min(ymin, yticks.front());
  ymax = std::max(ymax, yticks.back());

  const double left = 80, right = 20, top = 40, bottom = 60;
  const double pw = options.width - left - right;
  const double ph = options.height - top - bottom;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
      << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    svg << "<text x=\"" << num(options.width / 2.0) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << xml_escape(options.title) << "</text>\n";
  }

  svg << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double v : yticks) svg << "<line x1=\"" << num(left) << "\" y1=\"" << num(sy(v)) << "\" x2=\"" << num(left + pw) << "\" y2=\"" << num(sy(v)) << "\"/>\n";
  svg << "</g>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    if (s.band.empty() || s.x.empty()) continue;
    const std::string color = s.color.empty() ? kPalette[k % kPalette.size()] : s.color;
    svg << "<path class=\"band\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" d=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      svg << (i == 0 ? 'M' : 'L') << num(sx(s.x[i])) << ',' << num(sy(s.y[i] + s.band[i])) << ' ';
    }
    for (std::size_t i = s.x.size(); i-- > 0;) svg << 'L' << num(sx(s.x[i])) << ',' << num(sy(s.y[i] - s.band[i])) << ' ';
    svg << "Z\"/>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const std::string color = s.color.empty() ? kPalette[k % kPalette.size()] : s.color;
    svg << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      svg << (i == 0 ? "" : " ") << num(sx(s.x[i])) << ',' << num(sy(s.y[i]));
    }
    svg << "\"/>\n";
  }

  svg << "<g stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(left + pw) << "\" y2=\"" << num(top + ph) << "\"/>\n"
      << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\"" << num(top + ph) << "\"/>\n";
  for (double v : xticks) svg << "<line x1=\"" << num(sx(v)) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(sx(v)) << "\" y2=\"" << num(top + ph + 5) << "\"/>\n";
  for (double v : yticks) svg << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(sy(v)) << "\" x2=\"" << num(left) << "\" y2=\"" << num(sy(v)) << "\"/>\n";
  svg << "</g>\n";
  for (double v : xticks) {
    svg << "<text x=\"" << num(sx(v)) << "\" y=\"" << num(top + ph + 20) << "\" text-anchor=\"middle\">" << tick_label(v) << "</text>\n";
  }
  for (double v : yticks) {
    svg << "<text x=\"" << num(left - 8) << "\" y=\"" << num(sy(v) + 4) << "\" text-anchor=\"end\">" << tick_label(v) << "</text>\n";
  }
  svg << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(options.height - 15.0) << "\" text-anchor=\"middle\">"
      << xml_escape(options.x_label) << "</text>\n"
      << "<text transform=\"translate(18," << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << xml_escape(options.y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const std::string color = series[k].color.empty() ? kPalette[k % kPalette.size()] : series[k].color;
    const double y = top + 10 + 18.0 * static_cast<double>(k);
    svg << "<line x1=\"" << num(left + 15) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left + 40) << "\" y2=\"" << num(y)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << num(left + 46) << "\" y=\"" << num(y + 4) << "\">" << xml_escape(series[k].label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace fairprice
