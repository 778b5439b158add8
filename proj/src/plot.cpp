#include "sqz/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqz/dataset.hpp"

#ifdef SQZLAB_HAVE_PNG
#include <png.h>
#endif

namespace sqz {

namespace {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

Rgb lerp(Rgb a, Rgb b, double t) {
  t = std::clamp(t, 0.0, 1.0);
  const auto mix = [&](std::uint8_t x, std::uint8_t y) {
    return static_cast<std::uint8_t>(std::lround(x + t * (y - x)));
  };
  return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

// Diverging map for signed data: blue → white → red over t ∈ [-1, 1].
Rgb diverging(double t) {
  const Rgb blue{33, 102, 172}, white{247, 247, 247}, red{178, 24, 43};
  if (t < 0) return lerp(white, blue, -t);
  return lerp(white, red, t);
}

// Sequential map for magnitudes over t ∈ [0, 1].
Rgb sequential(double t) {
  const Rgb anchors[4] = {
      {13, 8, 135}, {126, 3, 168}, {225, 100, 98}, {240, 249, 33}};
  t = std::clamp(t, 0.0, 1.0) * 3.0;
  const int k = std::min(2, static_cast<int>(t));
  return lerp(anchors[k], anchors[k + 1], t - k);
}

class Canvas {
 public:
  Canvas(int width, int height, Rgb fill = {255, 255, 255})
      : width_(width), height_(height), pixels_(
            static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }

  void set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
    pixels_[static_cast<std::size_t>(y) * width_ + x] = c;
  }

  void fill_rect(int x0, int y0, int x1, int y1, Rgb c) {
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) set(x, y, c);
  }

  void line(int x0, int y0, int x1, int y1, Rgb c) {
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
      set(x0, y0, c);
      set(x0 + 1, y0, c);  // 2 px stroke
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) { err += dy; x0 += sx; }
      if (e2 <= dx) { err += dx; y0 += sy; }
    }
  }

  const std::vector<Rgb>& pixels() const { return pixels_; }

 private:
  int width_, height_;
  std::vector<Rgb> pixels_;
};

#ifdef SQZLAB_HAVE_PNG

void append_bytes(png_structp png, png_bytep data, png_size_t size) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), size);
}

void flush_noop(png_structp) {}

// Encodes the canvas with fixed settings so renders are byte-deterministic,
// then writes through the atomic temp-and-rename path.
void save_png(const Canvas& canvas, const PlotLayout& layout,
              const std::string& path) {
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  std::string buffer;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("libpng failed while encoding " + path);
  }
  png_set_write_fn(png, &buffer, append_bytes, flush_noop);
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, canvas.width(), canvas.height(), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);

  const std::pair<const char*, double> ranges[4] = {
      {"sqzlab:x_min", layout.x_min},
      {"sqzlab:x_max", layout.x_max},
      {"sqzlab:y_min", layout.y_min},
      {"sqzlab:y_max", layout.y_max}};
  std::vector<std::string> keys, values;
  std::vector<png_text> texts(4);
  for (int i = 0; i < 4; ++i) {
    keys.push_back(ranges[i].first);
    values.push_back(format_double(ranges[i].second));
  }
  for (int i = 0; i < 4; ++i) {
    texts[i] = png_text{};
    texts[i].compression = PNG_TEXT_COMPRESSION_NONE;
    texts[i].key = keys[i].data();
    texts[i].text = values[i].data();
    texts[i].text_length = values[i].size();
  }
  png_set_text(png, info, texts.data(), 4);
  png_write_info(png, info);

  std::vector<png_bytep> rows(canvas.height());
  auto* base = reinterpret_cast<const std::uint8_t*>(canvas.pixels().data());
  for (int y = 0; y < canvas.height(); ++y)
    rows[y] = const_cast<png_bytep>(
        base + static_cast<std::size_t>(y) * canvas.width() * 3);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);

  write_text_atomic(path, buffer);
}

#else

void save_png(const Canvas&, const PlotLayout&, const std::string&) {
  throw std::runtime_error(
      "this build has no PNG support (configure with SQZLAB_WITH_PNG=ON and "
      "libpng installed)");
}

#endif

// Integer upscale so small grids still render at a readable size.
int heatmap_scale(Eigen::Index rows, Eigen::Index cols) {
  const Eigen::Index largest = std::max<Eigen::Index>(1, std::max(rows, cols));
  return static_cast<int>(std::max<Eigen::Index>(1, 440 / largest));
}

// Renders values(i, k) with axis a → horizontal (left → right) and axis b →
// vertical (bottom → top).
template <typename Value>
Canvas heatmap(Eigen::Index rows, Eigen::Index cols, Value&& color_at) {
  const int s = heatmap_scale(rows, cols);
  Canvas canvas(static_cast<int>(rows) * s, static_cast<int>(cols) * s);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) {
      const Rgb c = color_at(i, k);
      const int x0 = static_cast<int>(i) * s;
      const int y0 = static_cast<int>(cols - 1 - k) * s;
      canvas.fill_rect(x0, y0, x0 + s, y0 + s, c);
    }
  return canvas;
}

void require_grid(Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (rows < 2 || cols < 2)
    throw std::invalid_argument(std::string(what) +
                                ": grid must be at least 2x2");
}

}  // namespace

PlotLayout wigner_plot_layout(const WignerGrid& grid) {
  require_grid(grid.x.size(), grid.p.size(), "wigner plot");
  const int s = heatmap_scale(grid.x.size(), grid.p.size());
  return {grid.x.minCoeff(), grid.x.maxCoeff(),
          grid.p.minCoeff(), grid.p.maxCoeff(),
          static_cast<int>(grid.x.size()) * s,
          static_cast<int>(grid.p.size()) * s};
}

PlotLayout chi_plot_layout(const CharacteristicGrid& grid) {
  require_grid(grid.beta_re.size(), grid.beta_im.size(), "chi plot");
  const int s = heatmap_scale(grid.beta_re.size(), grid.beta_im.size());
  return {grid.beta_re.minCoeff(), grid.beta_re.maxCoeff(),
          grid.beta_im.minCoeff(), grid.beta_im.maxCoeff(),
          static_cast<int>(grid.beta_re.size()) * s,
          static_cast<int>(grid.beta_im.size()) * s};
}

PlotLayout table_plot_layout(const ResultTable& table) {
  table.validate();
  if (table.columns.size() < 2 || table.rows() < 2)
    throw std::invalid_argument(
        "table plot: need an x column, one curve, and at least two rows");
  PlotLayout layout;
  layout.width = 640;
  layout.height = 480;
  const double inf = std::numeric_limits<double>::infinity();
  double xmin = inf, xmax = -inf, ymin = inf, ymax = -inf;
  bool first = true;
  for (const ResultColumn& c : table.columns) {
    for (double v : c.values) {
      if (!std::isfinite(v)) continue;
      if (first) {
        xmin = std::min(xmin, v);
        xmax = std::max(xmax, v);
      } else {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
      }
    }
    first = false;
  }
  if (!std::isfinite(xmin)) { xmin = 0; xmax = 1; }
  if (!std::isfinite(ymin)) { ymin = 0; ymax = 1; }
  layout.x_min = xmin;
  layout.x_max = xmax;
  if (ymin == ymax) { ymin -= 0.5; ymax += 0.5; }
  if (layout.x_min == layout.x_max) {
    layout.x_min -= 0.5;
    layout.x_max += 0.5;
  }
  layout.y_min = ymin;
  layout.y_max = ymax;
  return layout;
}

bool png_support() {
#ifdef SQZLAB_HAVE_PNG
  return true;
#else
  return false;
#endif
}

void write_wigner_png(const WignerGrid& grid, const std::string& path) {
  const PlotLayout layout = wigner_plot_layout(grid);
  const double vmax = std::max(
      {std::abs(grid.values.minCoeff()), std::abs(grid.values.maxCoeff()),
       1e-30});
  Canvas canvas =
      heatmap(grid.x.size(), grid.p.size(), [&](Eigen::Index i, Eigen::Index k) {
        return diverging(grid.values(i, k) / vmax);
      });
  save_png(canvas, layout, path);
}

void write_chi_png(const CharacteristicGrid& grid, const std::string& path) {
  const PlotLayout layout = chi_plot_layout(grid);
  const double vmax = std::max(grid.values.cwiseAbs().maxCoeff(), 1e-30);
  Canvas canvas = heatmap(grid.beta_re.size(), grid.beta_im.size(),
                          [&](Eigen::Index i, Eigen::Index k) {
                            return sequential(std::abs(grid.values(i, k)) /
                                              vmax);
                          });
  save_png(canvas, layout, path);
}

void write_table_png(const ResultTable& table, const std::string& path) {
  const PlotLayout layout = table_plot_layout(table);
  Canvas canvas(layout.width, layout.height);
  const int left = 12, right = 12, top = 12, bottom = 12;
  const int iw = layout.width - left - right;
  const int ih = layout.height - top - bottom;
  const auto px = [&](double x) {
    return left + static_cast<int>(std::lround(
                      (x - layout.x_min) / (layout.x_max - layout.x_min) * iw));
  };
  const auto py = [&](double y) {
    return top + ih -
           static_cast<int>(std::lround(
               (y - layout.y_min) / (layout.y_max - layout.y_min) * ih));
  };

  const Rgb frame{180, 180, 180};
  canvas.line(left, top, left, top + ih, frame);
  canvas.line(left, top + ih, left + iw, top + ih, frame);
  if (layout.y_min < 0 && layout.y_max > 0)  // zero line
    canvas.line(left, py(0.0), left + iw, py(0.0), Rgb{220, 220, 220});

  const Rgb palette[6] = {{31, 119, 180}, {255, 127, 14}, {44, 160, 44},
                          {214, 39, 40},  {148, 103, 189}, {140, 86, 75}};
  const ResultColumn& xcol = table.columns.front();
  int curve = 0;
  for (std::size_t ci = 1; ci < table.columns.size(); ++ci) {
    const ResultColumn& ycol = table.columns[ci];
    const Rgb color = palette[curve % 6];
    ++curve;
    bool have_prev = false;
    int prev_x = 0, prev_y = 0;
    for (std::size_t i = 0; i < xcol.values.size(); ++i) {
      if (!std::isfinite(xcol.values[i]) || !std::isfinite(ycol.values[i])) {
        have_prev = false;
        continue;
      }
      const int x = px(xcol.values[i]), y = py(ycol.values[i]);
      if (have_prev) canvas.line(prev_x, prev_y, x, y, color);
      canvas.fill_rect(x - 1, y - 1, x + 2, y + 2, color);
      prev_x = x;
      prev_y = y;
      have_prev = true;
    }
  }
  save_png(canvas, layout, path);
}

}  // namespace sqz
