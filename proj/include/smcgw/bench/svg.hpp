#pragma once

// Minimal static SVG line charts for the bench reports. No dependencies;
// axes, ticks, point markers, one polyline per series.

#include <string>
#include <utility>
#include <vector>

namespace smcgw::bench {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y)
};

void write_svg_chart(const std::string& path, const std::string& title, const std::string& x_label,
                     const std::string& y_label, const std::vector<Series>& series);

}  // namespace smcgw::bench
