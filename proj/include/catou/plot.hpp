#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace catou::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool line = true;  // false draws markers only
};

struct PlotOptions {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool loglog = false;
  // least-squares slope of log y on log x for this series, printed in the plot
  std::optional<std::size_t> fit_slope_of;
  int width = 640;
  int height = 420;
};

// Fitted log-log slope, as annotated by render_svg.
double loglog_slope(const Series& s);

// Self-contained SVG document. Throws std::invalid_argument for an empty
// series list, an empty or ragged series, non-finite values, or non-positive
// values on a log axis.
std::string render_svg(std::span<const Series> series, const PlotOptions& opt);
void emit_plot(std::span<const Series> series, const std::filesystem::path& path, const PlotOptions& opt);

}  // namespace catou::plot
