#pragma once

// Minimal SVG line/scatter/raster plots. Every plot is written next to the
// CSV holding the same data.

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace bautin::cli {

enum class PlotKind { TimeSeries, Phase, Curve, Zones };

struct Series {
  std::vector<std::pair<double, double>> xy;
  std::string color = "#1f77b4";
  std::string label;
};

struct Marker {
  double x = 0.0;
  double y = 0.0;
  std::string label;
};

/// Raster cell of a zone map; `category` indexes the palette.
struct Cell {
  double x = 0.0;
  double y = 0.0;
  int category = 0;
};

struct PlotSpec {
  PlotKind kind = PlotKind::Curve;
  std::string title;
  std::string x_label;
  std::string y_label;
  std::optional<std::pair<double, double>> x_range;  ///< auto when empty
  std::optional<std::pair<double, double>> y_range;
  int width = 640;
  int height = 420;
};

struct Plot {
  PlotSpec spec;
  std::vector<Series> series;
  std::vector<Marker> markers;
  std::vector<Cell> cells;
  double cell_w = 0.0;  ///< raster cell size in data units
  double cell_h = 0.0;
  std::vector<std::pair<std::string, std::string>> legend;  ///< (color, text)
};

void write_svg(std::ostream& out, const Plot& plot);

}  // namespace bautin::cli
