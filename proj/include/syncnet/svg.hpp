#pragma once

// Minimal standalone SVG line plots for experiment outputs.

#include <string>
#include <vector>

namespace syncnet {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  int width = 640;
  int height = 420;
};

/// SVG document text. Non-finite points are skipped.
std::string line_plot_svg(const std::vector<PlotSeries>& series, const PlotOptions& options);
void write_line_plot(const std::string& path, const std::vector<PlotSeries>& series, const PlotOptions& options);

}  // namespace syncnet
