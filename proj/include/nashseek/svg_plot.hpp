#pragma once
// Minimal self-contained SVG line plots: log-log or linear axes, optional
// shaded dispersion bands, fixed palette, legend. Output depends only on the
// inputs, so plots regenerate identically.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nashseek {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> band_lo;  // empty or same length as x
  std::vector<double> band_hi;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "iteration n";
  std::string y_label = "mean squared error";
  bool log_x = true;
  bool log_y = true;
  int width = 880;
  int height = 560;
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return std::string(buf);
}

constexpr const char* kPalette[] = {"#1f6fb2", "#d1495b", "#3f8f4a",
                                    "#8860b0", "#b8860b", "#3aa6a6"};
constexpr int kPaletteSize = 6;

struct AxisScale {
  double lo = 0.0, hi = 1.0;
  bool log = false;

  double to_unit(double v) const {
    const double t = log ? std::log10(v) : v;
    return (t - lo) / (hi - lo);
  }
};

inline AxisScale make_scale(double lo, double hi, bool log) {
  AxisScale s;
  s.log = log;
  if (log) {
    lo = std::log10(lo);
    hi = std::log10(hi);
  }
  if (!(hi > lo)) hi = lo + 1.0;
  const double pad = log ? 0.0 : 0.05 * (hi - lo);
  s.lo = lo - pad;
  s.hi = hi + pad;
  return s;
}

inline std::vector<double> axis_ticks(const AxisScale& s) {
  std::vector<double> ticks;
  if (s.log) {
    int first = static_cast<int>(std::ceil(s.lo - 1e-9));
    int last = static_cast<int>(std::floor(s.hi + 1e-9));
    int step = 1 + (last - first) / 10;
    for (int e = first; e <= last; e += step)
      ticks.push_back(std::pow(10.0, e));
    return ticks;
  }
  const double range = s.hi - s.lo;
  double step = std::pow(10.0, std::floor(std::log10(range / 4.0)));
  if (range / step > 8.0) step *= 2.0;
  if (range / step > 8.0) step *= 2.5;
  for (double v = std::ceil(s.lo / step) * step; v <= s.hi + 1e-12 * range;
       v += step)
    ticks.push_back(v);
  return ticks;
}

inline std::string tick_label(double v, bool log) {
  char buf[32];
  if (log) {
    const int e = static_cast<int>(std::lround(std::log10(v)));
    if (e >= -3 && e <= 3)
      std::snprintf(buf, sizeof buf, "%g", v);
    else
      std::snprintf(buf, sizeof buf, "1e%d", e);
  } else {
    std::snprintf(buf, sizeof buf, "%g", v);
  }
  return std::string(buf);
}

inline std::string xml_escape(const std::string& s) {
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

}  // namespace detail

inline std::string render_svg(const std::vector<PlotSeries>& series,
                              const PlotOptions& opt = {}) {
  using namespace detail;
  if (series.empty()) throw std::invalid_argument("render_svg: no series");
  double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
  bool seen = false;
  auto admit = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    if (opt.log_x && !(x > 0.0)) return;
    if (opt.log_y && !(y > 0.0)) return;
    if (!seen) {
      x_min = x_max = x;
      y_min = y_max = y;
      seen = true;
    } else {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  };
  for (const auto& s : series) {
    if (s.x.size() != s.y.size())
      throw std::invalid_argument("render_svg: x/y length mismatch");
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      admit(s.x[k], s.y[k]);
      if (!s.band_lo.empty()) {
        admit(s.x[k], s.band_lo[k]);
        admit(s.x[k], s.band_hi[k]);
      }
    }
  }
  if (!seen) throw std::invalid_argument("render_svg: no plottable points");

  const AxisScale xs = make_scale(x_min, x_max, opt.log_x);
  const AxisScale ys = make_scale(y_min, y_max, opt.log_y);
  const double ml = 72, mr = 24, mt = opt.title.empty() ? 20 : 44, mb = 52;
  const double pw = opt.width - ml - mr, ph = opt.height - mt - mb;
  auto px = [&](double v) { return ml + xs.to_unit(v) * pw; };
  auto py = [&](double v) { return mt + (1.0 - ys.to_unit(v)) * ph; };
  auto plottable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!opt.log_x || x > 0.0) &&
           (!opt.log_y || y > 0.0);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width
      << "\" height=\"" << opt.height << "\" viewBox=\"0 0 " << opt.width << ' '
      << opt.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty())
    svg << "<text x=\"" << opt.width / 2 << "\" y=\"26\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">"
        << xml_escape(opt.title) << "</text>\n";

  // gridlines and tick labels
  for (double t : axis_ticks(xs)) {
    const double gx = px(t);
    svg << "<line x1=\"" << svg_num(gx) << "\" y1=\"" << svg_num(mt)
        << "\" x2=\"" << svg_num(gx) << "\" y2=\"" << svg_num(mt + ph)
        << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << svg_num(gx) << "\" y=\"" << svg_num(mt + ph + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << tick_label(t, opt.log_x) << "</text>\n";
  }
  for (double t : axis_ticks(ys)) {
    const double gy = py(t);
    svg << "<line x1=\"" << svg_num(ml) << "\" y1=\"" << svg_num(gy)
        << "\" x2=\"" << svg_num(ml + pw) << "\" y2=\"" << svg_num(gy)
        << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << svg_num(ml - 6) << "\" y=\"" << svg_num(gy + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << tick_label(t, opt.log_y) << "</text>\n";
  }
  svg << "<rect x=\"" << svg_num(ml) << "\" y=\"" << svg_num(mt) << "\" width=\""
      << svg_num(pw) << "\" height=\"" << svg_num(ph)
      << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  svg << "<text x=\"" << svg_num(ml + pw / 2) << "\" y=\""
      << svg_num(mt + ph + 40)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << xml_escape(opt.x_label) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << svg_num(mt + ph / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 "
      << svg_num(mt + ph / 2) << ")\">" << xml_escape(opt.y_label)
      << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % kPaletteSize];
    if (!s.band_lo.empty()) {
      if (s.band_lo.size() != s.x.size() || s.band_hi.size() != s.x.size())
        throw std::invalid_argument("render_svg: band length mismatch");
      std::ostringstream poly;
      bool any = false;
      for (std::size_t k = 0; k < s.x.size(); ++k)
        if (plottable(s.x[k], s.band_hi[k])) {
          poly << svg_num(px(s.x[k])) << ',' << svg_num(py(s.band_hi[k])) << ' ';
          any = true;
        }
      for (std::size_t k = s.x.size(); k-- > 0;)
        if (plottable(s.x[k], s.band_lo[k]))
          poly << svg_num(px(s.x[k])) << ',' << svg_num(py(s.band_lo[k])) << ' ';
      if (any)
        svg << "<polygon points=\"" << poly.str() << "\" fill=\"" << color
            << "\" opacity=\"0.15\"/>\n";
    }
    std::ostringstream pts;
    for (std::size_t k = 0; k < s.x.size(); ++k)
      if (plottable(s.x[k], s.y[k]))
        pts << svg_num(px(s.x[k])) << ',' << svg_num(py(s.y[k])) << ' ';
    svg << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\""
        << color << "\" stroke-width=\"1.6\"/>\n";
  }

  // legend
  double ly = mt + 14;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % kPaletteSize];
    svg << "<line x1=\"" << svg_num(ml + 12) << "\" y1=\"" << svg_num(ly - 4)
        << "\" x2=\"" << svg_num(ml + 36) << "\" y2=\"" << svg_num(ly - 4)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << svg_num(ml + 42) << "\" y=\"" << svg_num(ly)
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << xml_escape(series[si].label) << "</text>\n";
    ly += 17;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace nashseek
