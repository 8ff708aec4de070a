#pragma once

#include <string>
#include <vector>

namespace kdvw {

struct Series {
  std::vector<double> x, y;
  std::string label;
  std::string color = "#1f77b4";
  double width = 1.0;
  bool markers = false;  // points instead of a polyline
};

struct VRule {
  double x = 0.0;
  std::string label;
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  std::vector<Series> series;
  std::vector<VRule> rules;
  std::vector<std::string> notes;  // printed in the upper left corner
  int width = 800;
  int height = 500;
};

// Non-finite points break polylines and are skipped as markers.
std::string render_svg(const PlotSpec& spec);

}  // namespace kdvw
