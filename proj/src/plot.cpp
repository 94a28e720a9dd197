#include "aaseq/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "aaseq/error.hpp"

namespace aaseq {

namespace {

constexpr double kMarginLeft = 80;
constexpr double kMarginRight = 30;
constexpr double kMarginTop = 40;
constexpr double kMarginBottom = 60;
constexpr int kTicks = 5;

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* color(SeriesRole role) {
  return role == SeriesRole::WithAnderson ? "green" : "red";
}

}  // namespace

std::string render_loss_svg(const PlotSpec& spec) {
  if (spec.series.empty()) {
    throw Error(ErrorKind::InvalidParameter, "render_loss_svg", "no series to plot");
  }
  double x_max = 1;
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -std::numeric_limits<double>::infinity();
  for (const PlotSeries& s : spec.series) {
    if (s.records.empty()) {
      throw Error(ErrorKind::InvalidParameter, "render_loss_svg",
                  "series '" + s.label + "' is empty");
    }
    for (const TraceRecord& r : s.records) {
      x_max = std::max(x_max, static_cast<double>(r.iteration));
      if (!std::isfinite(r.mean_loss)) continue;
      y_min = std::min(y_min, r.mean_loss);
      y_max = std::max(y_max, r.mean_loss);
    }
  }
  if (!std::isfinite(y_min)) {
    y_min = 0;
    y_max = 1;
  }
  if (y_max - y_min < 1e-12) {
    y_min -= 0.5;
    y_max += 0.5;
  }
  const double x_min = 1;
  if (x_max <= x_min) x_max = x_min + 1;

  const double plot_w = spec.width - kMarginLeft - kMarginRight;
  const double plot_h = spec.height - kMarginTop - kMarginBottom;
  auto px = [&](double x) { return kMarginLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return kMarginTop + (y_max - y) / (y_max - y_min) * plot_h; };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(spec.width) + "\" height=\"" + std::to_string(spec.height) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
         std::to_string(spec.height) + "\" fill=\"white\"/>\n";
  if (!spec.title.empty()) {
    svg += "<text x=\"" + fixed(spec.width / 2.0) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
           escape(spec.title) + "</text>\n";
  }

  // Axes.
  const std::string x0 = fixed(kMarginLeft), x1 = fixed(kMarginLeft + plot_w);
  const std::string y0 = fixed(kMarginTop + plot_h), y1 = fixed(kMarginTop);
  svg += "<g stroke=\"black\" stroke-width=\"1\">\n";
  svg += "<line x1=\"" + x0 + "\" y1=\"" + y0 + "\" x2=\"" + x1 + "\" y2=\"" + y0 + "\"/>\n";
  svg += "<line x1=\"" + x0 + "\" y1=\"" + y0 + "\" x2=\"" + x0 + "\" y2=\"" + y1 + "\"/>\n";
  svg += "</g>\n";

  svg += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= kTicks; ++i) {
    const double xv = x_min + (x_max - x_min) * i / kTicks;
    const double yv = y_min + (y_max - y_min) * i / kTicks;
    svg += "<text x=\"" + fixed(px(xv)) + "\" y=\"" + fixed(kMarginTop + plot_h + 16) +
           "\" text-anchor=\"middle\">" + fixed(xv, 0) + "</text>\n";
    svg += "<text x=\"" + fixed(kMarginLeft - 6) + "\" y=\"" + fixed(py(yv) + 4) +
           "\" text-anchor=\"end\">" + fixed(yv, 3) + "</text>\n";
  }
  svg += "</g>\n";
  svg += "<text x=\"" + fixed(kMarginLeft + plot_w / 2) + "\" y=\"" + fixed(spec.height - 16.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
         escape(spec.x_label) + "</text>\n";
  svg += "<text x=\"18\" y=\"" + fixed(kMarginTop + plot_h / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 18 " +
         fixed(kMarginTop + plot_h / 2) + ")\">" + escape(spec.y_label) + "</text>\n";

  for (const PlotSeries& s : spec.series) {
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color(s.role)) +
           "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const TraceRecord& r : s.records) {
      if (!std::isfinite(r.mean_loss)) continue;
      if (!first) svg += ' ';
      first = false;
      svg += fixed(px(r.iteration)) + "," + fixed(py(r.mean_loss));
    }
    svg += "\"/>\n";
  }

  svg += "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  double ly = kMarginTop + 12;
  for (const PlotSeries& s : spec.series) {
    const double lx = kMarginLeft + plot_w - 170;
    svg += "<line x1=\"" + fixed(lx) + "\" y1=\"" + fixed(ly) + "\" x2=\"" + fixed(lx + 24) +
           "\" y2=\"" + fixed(ly) + "\" stroke=\"" + color(s.role) + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fixed(lx + 30) + "\" y=\"" + fixed(ly + 4) + "\">" + escape(s.label) +
           "</text>\n";
    ly += 18;
  }
  svg += "</g>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace aaseq
