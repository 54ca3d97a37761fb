#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace escalife::svg {

struct Series {
  std::string label;
  std::string color = "#1f77b4";
  std::vector<std::pair<double, double>> points;
  bool line = true;
  bool markers = false;
  bool dashed = false;
  /// Optional CSS class per point marker (same length as `points`).
  std::vector<std::string> point_class;
};

struct HLine {
  double y = 0.0;
  std::string label;
  std::string color = "#d62728";
};

struct Annotation {
  double x = 0.0;
  double y = 0.0;
  std::string text;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  /// X values are days since 1970-01-01 and ticks print as dates.
  bool x_is_date = false;
  int width = 720;
  int height = 300;
  std::vector<Series> series;
  /// Always drawn, whatever the data range.
  std::vector<HLine> hlines;
  std::vector<Annotation> annotations;
};

std::string escape(std::string_view text);

/// Compact deterministic number formatting for axis ticks and labels.
std::string number(double v);

std::string render(const Chart& chart);

}  // namespace escalife::svg
