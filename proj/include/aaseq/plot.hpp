#pragma once

#include <string>
#include <vector>

#include "aaseq/trainer.hpp"

namespace aaseq {

enum class SeriesRole {
  WithAnderson,     // drawn green
  WithoutAnderson,  // drawn red
};

struct PlotSeries {
  std::string label;
  std::vector<TraceRecord> records;
  SeriesRole role = SeriesRole::WithAnderson;
};

struct PlotSpec {
  std::vector<PlotSeries> series;
  std::string x_label = "iterations";
  std::string y_label = "cross entropy loss";
  std::string title;
  int width = 800;
  int height = 500;
};

/// Static SVG 1.1 line chart of mean loss against iteration, one polyline
/// per series plus a legend. Output bytes depend only on `spec`.
/// Throws InvalidParameter when there is no series or a series is empty.
std::string render_loss_svg(const PlotSpec& spec);

}  // namespace aaseq
