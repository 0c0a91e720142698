#include "smcgw/bench/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace smcgw::bench {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 420;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 30;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 55;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  std::ostringstream os;
  if (std::abs(v) >= 1000 || v == std::floor(v)) {
    os << static_cast<long long>(std::llround(v));
  } else {
    os.precision(v < 10 ? 2 : 1);
    os << std::fixed << v;
  }
  return os.str();
}

}  // namespace

void write_svg_chart(const std::string& path, const std::string& title, const std::string& x_label,
                     const std::string& y_label, const std::vector<Series>& series) {
  double xmin = std::numeric_limits<double>::max(), xmax = std::numeric_limits<double>::lowest();
  double ymin = 0, ymax = std::numeric_limits<double>::lowest();
  for (const auto& s : series) {
    for (auto [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymax = std::max(ymax, y);
    }
  }
  if (series.empty() || xmin > xmax) {
    xmin = 0;
    xmax = 1;
    ymax = 1;
  }
  if (xmin == xmax) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  ymax *= 1.08;  // headroom

  double plot_w = kWidth - kMarginLeft - kMarginRight;
  double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto X = [&](double x) { return kMarginLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto Y = [&](double y) { return kMarginTop + plot_h - (y - ymin) / (ymax - ymin) * plot_h; };

  std::ofstream out(path, std::ios::trunc);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">" << title
      << "</text>\n";

  // Grid and ticks.
  for (int i = 0; i <= 5; ++i) {
    double xv = xmin + (xmax - xmin) * i / 5.0;
    double yv = ymin + (ymax - ymin) * i / 5.0;
    out << "<line x1=\"" << X(xv) << "\" y1=\"" << kMarginTop << "\" x2=\"" << X(xv) << "\" y2=\""
        << kMarginTop + plot_h << "\" stroke=\"#eeeeee\"/>\n";
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << Y(yv) << "\" x2=\"" << kMarginLeft + plot_w
        << "\" y2=\"" << Y(yv) << "\" stroke=\"#eeeeee\"/>\n";
    out << "<text x=\"" << X(xv) << "\" y=\"" << kMarginTop + plot_h + 18
        << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
    out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << Y(yv) + 4 << "\" text-anchor=\"end\">"
        << fmt(yv) << "</text>\n";
  }
  out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  out << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << kMarginTop + plot_h / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << kMarginTop + plot_h / 2 << ")\">"
      << y_label << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % 6];
    std::vector<std::pair<double, double>> pts = series[s].points;
    std::sort(pts.begin(), pts.end());
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
    for (auto [x, y] : pts) out << X(x) << "," << Y(y) << " ";
    out << "\"/>\n";
    for (auto [x, y] : pts) {
      out << "<circle cx=\"" << X(x) << "\" cy=\"" << Y(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    out << "<text x=\"" << kMarginLeft + plot_w - 6 << "\" y=\"" << kMarginTop + 16 + 16 * s
        << "\" text-anchor=\"end\" fill=\"" << color << "\">" << series[s].label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace smcgw::bench
