#include "invertkit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "invertkit/eval.hpp"
#include "invertkit/expr.hpp"

namespace invertkit {

namespace {

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void append_rect(std::string& out, double x, double y, double w, double h,
                 const char* fill, const char* stroke) {
  out += "<rect x=\"" + fmt2(x) + "\" y=\"" + fmt2(y) + "\" width=\"" +
         fmt2(w) + "\" height=\"" + fmt2(h) + "\" fill=\"" + fill +
         "\" stroke=\"" + stroke + "\"/>\n";
}

const char* class_color(std::size_t cls) {
  switch (cls) {
    case 0: return "green";
    case 1: return "red";
    default: return "yellow";
  }
}

std::string render_2d(const Paving& paving) {
  const double margin = 40.0;
  const double span = 720.0;
  const Interval& ax = paving.domain.axis(0);
  const Interval& ay = paving.domain.axis(1);
  const double wx = ax.width() > 0.0 ? ax.width() : 1.0;
  const double wy = ay.width() > 0.0 ? ay.width() : 1.0;
  const auto map_x = [&](double v) { return margin + (v - ax.lo()) / wx * span; };
  const auto map_y = [&](double v) {
    return margin + span - (v - ay.lo()) / wy * span;
  };

  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
      "viewBox=\"0 0 800 800\">\n";
  append_rect(out, 0, 0, 800, 800, "white", "none");
  const std::vector<Box>* lists[] = {&paving.accepted, &paving.rejected,
                                     &paving.boundary};
  for (std::size_t cls = 0; cls < 3; ++cls) {
    for (const Box& b : *lists[cls]) {
      const double x0 = map_x(b.axis(0).lo());
      const double x1 = map_x(b.axis(0).hi());
      const double y0 = map_y(b.axis(1).hi());
      const double y1 = map_y(b.axis(1).lo());
      append_rect(out, x0, y0, x1 - x0, y1 - y0, class_color(cls), "none");
    }
  }
  append_rect(out, margin, margin, span, span, "none", "black");
  out += "</svg>\n";
  return out;
}

std::string render_1d(const Paving& paving) {
  const double margin = 40.0;
  const double plot_w = 720.0;
  const double plot_h = 440.0;
  const double strip_y = 520.0;
  const double strip_h = 60.0;
  const Interval& ax = paving.domain.axis(0);
  const double wx = ax.width() > 0.0 ? ax.width() : 1.0;
  const auto map_x = [&](double v) {
    return margin + (v - ax.lo()) / wx * plot_w;
  };

  // Sample the first model component for the curve; gaps where the model
  // is invalid or non-finite split the polyline.
  constexpr int kSamples = 400;
  std::vector<std::pair<double, double>> samples;
  if (!paving.model.empty()) {
    const ExprPtr component = parse_sexpr(paving.model.front(), 1);
    for (int i = 0; i < kSamples; ++i) {
      const double x =
          ax.lo() + ax.width() * (static_cast<double>(i) / (kSamples - 1));
      const double point[] = {x};
      const auto v = eval_scalar(*component, point);
      if (v && std::isfinite(*v)) {
        samples.emplace_back(x, *v);
      } else {
        samples.emplace_back(x, std::nan(""));
      }
    }
  }

  const Interval& band = paving.performance.axis(0);
  double y_lo = band.lo();
  double y_hi = band.hi();
  for (const auto& [x, v] : samples) {
    if (!std::isfinite(v)) continue;
    y_lo = std::min(y_lo, v);
    y_hi = std::max(y_hi, v);
  }
  if (!(y_hi > y_lo)) {
    y_lo -= 1.0;
    y_hi += 1.0;
  }
  const double wy = y_hi - y_lo;
  const auto map_y = [&](double v) {
    return margin + plot_h - (v - y_lo) / wy * plot_h;
  };

  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
      "viewBox=\"0 0 800 600\">\n";
  append_rect(out, 0, 0, 800, 600, "white", "none");
  append_rect(out, margin, map_y(band.hi()), plot_w,
              map_y(band.lo()) - map_y(band.hi()), "lightblue", "none");

  std::string points;
  const auto flush_polyline = [&]() {
    if (points.empty()) return;
    out += "<polyline points=\"" + points +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    points.clear();
  };
  for (const auto& [x, v] : samples) {
    if (!std::isfinite(v)) {
      flush_polyline();
      continue;
    }
    if (!points.empty()) points += ' ';
    points += fmt2(map_x(x)) + "," + fmt2(map_y(v));
  }
  flush_polyline();

  const std::vector<Box>* lists[] = {&paving.accepted, &paving.rejected,
                                     &paving.boundary};
  for (std::size_t cls = 0; cls < 3; ++cls) {
    for (const Box& b : *lists[cls]) {
      const double x0 = map_x(b.axis(0).lo());
      const double x1 = map_x(b.axis(0).hi());
      append_rect(out, x0, strip_y, x1 - x0, strip_h, class_color(cls), "none");
    }
  }
  append_rect(out, margin, margin, plot_w, plot_h, "none", "black");
  out += "</svg>\n";
  return out;
}

}  // namespace

std::string render_paving_svg(const Paving& paving) {
  const std::size_t dim = paving.domain.dim();
  if (dim == 1) return render_1d(paving);
  if (dim == 2) return render_2d(paving);
  throw std::invalid_argument("only 1D and 2D pavings can be rendered");
}

void save_paving_svg(const Paving& paving, const std::string& path) {
  // Render first so a render failure leaves no file behind.
  const std::string svg = render_paving_svg(paving);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << svg;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace invertkit
