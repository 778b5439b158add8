#pragma once
// PNG rendering of result grids and scan tables.
//
// Rendering is an optional feature: png_support() reports whether the library
// was built against libpng, and the write_* functions throw std::runtime_error
// when it was not.  The layout helpers are always available so callers (and
// tests) can reason about the geometry without decoding image bytes.  Every
// PNG also embeds its data ranges as tEXt metadata (keys sqzlab:x_min,
// sqzlab:x_max, sqzlab:y_min, sqzlab:y_max).

#include <string>

#include "sqz/experiments.hpp"

namespace sqz {

// Pixel geometry and the data ranges covered by the image.  For heatmaps the
// data area spans exactly the grid axis ranges (x→horizontal, p→vertical).
struct PlotLayout {
  double x_min = 0, x_max = 0;
  double y_min = 0, y_max = 0;
  int width = 0, height = 0;  // pixels
};

PlotLayout wigner_plot_layout(const WignerGrid& grid);
PlotLayout chi_plot_layout(const CharacteristicGrid& grid);
// First column is the x axis, every further column is one curve.
PlotLayout table_plot_layout(const ResultTable& table);

bool png_support();

// Diverging heatmap of W(x, p), white at zero.
void write_wigner_png(const WignerGrid& grid, const std::string& path);
// Sequential heatmap of |χ(β)|.
void write_chi_png(const CharacteristicGrid& grid, const std::string& path);
// Line plot of a scan table.
void write_table_png(const ResultTable& table, const std::string& path);

}  // namespace sqz
