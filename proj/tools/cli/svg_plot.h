#ifndef BAP_TOOLS_SVG_PLOT_H_
#define BAP_TOOLS_SVG_PLOT_H_

#include <string>
#include <vector>

namespace bap::cli {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  // Lead days run from LD18 down to LD3, so x values are shown as LD(-x).
  bool lead_day_axis = true;
};

// Self-contained SVG document.
std::string RenderSvg(const LineChart& chart);

}  // namespace bap::cli

#endif  // BAP_TOOLS_SVG_PLOT_H_
