#pragma once

// Minimal SVG 1.1 line charts with error bars. Output bytes depend only on
// the inputs.

#include <filesystem>
#include <string>
#include <vector>

namespace dcx {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> se;  // optional, empty or one per point
};

struct PlotStyle {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  int width = 640;
  int height = 420;
  /// Error bars span +- error_z * se.
  double error_z = 1.0;
};

/// Renders the series as one polyline each, with axes, ticks, a legend and
/// error bars. PreconditionError for an empty series list, a series without
/// points or mismatched lengths.
std::string render_plot(const std::vector<PlotSeries>& series, const PlotStyle& style);
void emit_plot(const std::vector<PlotSeries>& series, const PlotStyle& style, const std::filesystem::path& path);

}  // namespace dcx
