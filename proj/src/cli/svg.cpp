#include "cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace gibbs::cli {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 200.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double decade) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "1e%d", static_cast<int>(decade));
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

bool write_loglog_chart(const std::string& path, const std::string& title, const std::string& x_label,
                        const std::vector<double>& x, const std::vector<Series>& series) {
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = x_lo;
  double y_hi = -x_lo;
  std::size_t plotted = 0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < x.size() && i < s.y.size(); ++i) {
      if (!(x[i] > 0.0) || !s.y[i] || !(*s.y[i] > 0.0)) continue;
      x_lo = std::min(x_lo, std::log10(x[i]));
      x_hi = std::max(x_hi, std::log10(x[i]));
      y_lo = std::min(y_lo, std::log10(*s.y[i]));
      y_hi = std::max(y_hi, std::log10(*s.y[i]));
      ++plotted;
    }
  }
  if (plotted == 0) return false;
  x_lo = std::floor(x_lo);
  x_hi = std::max(std::ceil(x_hi), x_lo + 1.0);
  y_lo = std::floor(y_lo);
  y_hi = std::max(std::ceil(y_hi), y_lo + 1.0);

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (std::log10(v) - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double v) { return kTop + (y_hi - std::log10(v)) / (y_hi - y_lo) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(title) << "</text>\n";

  for (double d = x_lo; d <= x_hi; d += 1.0) {
    const double gx = kLeft + (d - x_lo) / (x_hi - x_lo) * pw;
    svg << "<line x1=\"" << fmt(gx) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(gx) << "\" y2=\""
        << fmt(kTop + ph) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << fmt(gx) << "\" y=\"" << fmt(kTop + ph + 18) << "\" text-anchor=\"middle\">"
        << tick_label(d) << "</text>\n";
  }
  for (double d = y_lo; d <= y_hi; d += 1.0) {
    const double gy = kTop + (y_hi - d) / (y_hi - y_lo) * ph;
    svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(gy) << "\" x2=\"" << fmt(kLeft + pw) << "\" y2=\""
        << fmt(gy) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(gy + 4) << "\" text-anchor=\"end\">" << tick_label(d)
        << "</text>\n";
  }
  svg << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw) << "\" height=\""
      << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 16) << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n";

  std::size_t legend_row = 0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % std::size(kPalette)];
    std::ostringstream points;
    std::size_t count = 0;
    for (std::size_t i = 0; i < x.size() && i < series[k].y.size(); ++i) {
      const auto& y = series[k].y[i];
      if (!(x[i] > 0.0) || !y || !(*y > 0.0)) continue;
      points << (count ? " " : "") << fmt(px(x[i])) << "," << fmt(py(*y));
      ++count;
    }
    if (count == 0) continue;
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"" << points.str()
        << "\"/>\n";
    const double ly = kTop + 10 + 20.0 * static_cast<double>(legend_row++);
    const double lx = kLeft + pw + 16;
    svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(lx + 24) << "\" y2=\"" << fmt(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << fmt(lx + 30) << "\" y=\"" << fmt(ly + 4) << "\">" << escape(series[k].name) << "</text>\n";
  }
  svg << "</svg>\n";

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << svg.str();
    if (!out) {
      std::remove(tmp.c_str());
      return false;
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    return false;
  }
  return true;
}

}  // namespace gibbs::cli
