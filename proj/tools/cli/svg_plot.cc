#include "svg_plot.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace bap::cli {
namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 180;
constexpr double kTop = 40;
constexpr double kBottom = 50;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                         "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

std::string RenderSvg(const LineChart& chart) {
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0;
  double y1 = 0.0;
  for (const PlotSeries& s : chart.series) {
    for (double v : s.x) {
      x0 = std::min(x0, v);
      x1 = std::max(x1, v);
    }
    for (double v : s.y) y1 = std::max(y1, v);
  }
  if (!std::isfinite(x0)) {
    x0 = 0;
    x1 = 1;
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 <= 0) y1 = 1;
  y1 *= 1.08;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + ph - y / y1 * ph; };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      kWidth, kHeight);
  svg += fmt::format(
      "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}"
      "</text>\n",
      kLeft + pw / 2, Escape(chart.title));
  // Axes.
  svg += fmt::format(
      "<path d=\"M{0} {1} V{2} H{3}\" stroke=\"black\" fill=\"none\"/>\n",
      kLeft, kTop, kTop + ph, kLeft + pw);
  for (int k = 0; k <= 5; ++k) {
    const double v = y1 * k / 5;
    svg += fmt::format(
        "<line x1=\"{0}\" x2=\"{1}\" y1=\"{2:.1f}\" y2=\"{2:.1f}\" "
        "stroke=\"#ddd\"/><text x=\"{3}\" y=\"{4:.1f}\" "
        "text-anchor=\"end\">{5:.3f}</text>\n",
        kLeft, kLeft + pw, py(v), kLeft - 6, py(v) + 4, v);
  }
  const int span = static_cast<int>(std::round(x1 - x0));
  const int step = std::max(1, span / 15);
  for (int k = 0; k <= span; k += step) {
    const double x = x0 + k;
    const std::string label =
        chart.lead_day_axis ? fmt::format("LD{}", static_cast<int>(-x))
                            : fmt::format("{:g}", x);
    svg += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
        px(x), kTop + ph + 18, label);
  }
  svg += fmt::format(
      "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
      kLeft + pw / 2, kHeight - 10, Escape(chart.x_label));
  svg += fmt::format(
      "<text transform=\"translate(16 {:.1f}) rotate(-90)\" "
      "text-anchor=\"middle\">{}</text>\n",
      kTop + ph / 2, Escape(chart.y_label));

  for (std::size_t s = 0; s < chart.series.size(); ++s) {
    const PlotSeries& series = chart.series[s];
    const char* color = kColors[s % std::size(kColors)];
    std::string points;
    const std::size_t n = std::min(series.x.size(), series.y.size());
    for (std::size_t k = 0; k < n; ++k) {
      points += fmt::format("{}{:.1f},{:.1f}", k ? " " : "", px(series.x[k]),
                            py(series.y[k]));
    }
    svg += fmt::format(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" "
        "stroke-width=\"2\"{}/>\n",
        points, color, series.dashed ? " stroke-dasharray=\"6 4\"" : "");
    const double ly = kTop + 14 + 20 * static_cast<double>(s);
    svg += fmt::format(
        "<line x1=\"{0}\" x2=\"{1}\" y1=\"{2}\" y2=\"{2}\" stroke=\"{3}\" "
        "stroke-width=\"2\"{4}/><text x=\"{5}\" y=\"{6}\">{7}</text>\n",
        kLeft + pw + 12, kLeft + pw + 36, ly, color,
        series.dashed ? " stroke-dasharray=\"6 4\"" : "", kLeft + pw + 42,
        ly + 4, Escape(series.label));
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace bap::cli
