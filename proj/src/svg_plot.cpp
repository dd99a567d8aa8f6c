#include "dcxlab/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "dcxlab/error.hpp"

namespace dcx {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

struct Range {
  double lo = INFINITY, hi = -INFINITY;
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

}  // namespace

std::string render_plot(const std::vector<PlotSeries>& series, const PlotStyle& style) {
  if (series.empty()) throw PreconditionError("emit_plot: no series to plot");
  Range xr, yr;
  for (const auto& s : series) {
    if (s.x.empty()) throw PreconditionError("emit_plot: series '" + s.name + "' has no points");
    if (s.x.size() != s.y.size() || (!s.se.empty() && s.se.size() != s.x.size()))
      throw PreconditionError("emit_plot: series '" + s.name + "' has mismatched lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xr.add(s.x[i]);
      const double e = s.se.empty() ? 0.0 : style.error_z * s.se[i];
      yr.add(s.y[i] - e);
      yr.add(s.y[i] + e);
    }
  }
  xr.settle();
  yr.settle();

  const double left = 64, right = 160, top = 36, bottom = 52;
  const double w = style.width, h = style.height;
  const double pw = w - left - right, ph = h - top - bottom;
  auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * ph; };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(style.width) +
         "\" height=\"" + std::to_string(style.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" fill=\"white\"/>\n";
  if (!style.title.empty())
    out += "<text x=\"" + num(left + pw / 2) + "\" y=\"20\" text-anchor=\"middle\">" + escape(style.title) + "</text>\n";

  // Axes and ticks.
  out += "<g stroke=\"black\" fill=\"none\">\n";
  out += "<line x1=\"" + num(left) + "\" y1=\"" + num(top + ph) + "\" x2=\"" + num(left + pw) + "\" y2=\"" + num(top + ph) + "\"/>\n";
  out += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) + "\" y2=\"" + num(top + ph) + "\"/>\n";
  out += "</g>\n<g font-size=\"10\">\n";
  constexpr int kTicks = 5;
  for (int t = 0; t <= kTicks; ++t) {
    const double xv = xr.lo + (xr.hi - xr.lo) * t / kTicks;
    const double yv = yr.lo + (yr.hi - yr.lo) * t / kTicks;
    out += "<line x1=\"" + num(px(xv)) + "\" y1=\"" + num(top + ph) + "\" x2=\"" + num(px(xv)) + "\" y2=\"" +
           num(top + ph + 4) + "\" stroke=\"black\"/>";
    out += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(top + ph + 16) + "\" text-anchor=\"middle\">" + tick_label(xv) + "</text>\n";
    out += "<line x1=\"" + num(left - 4) + "\" y1=\"" + num(py(yv)) + "\" x2=\"" + num(left) + "\" y2=\"" + num(py(yv)) +
           "\" stroke=\"black\"/>";
    out += "<text x=\"" + num(left - 6) + "\" y=\"" + num(py(yv) + 3) + "\" text-anchor=\"end\">" + tick_label(yv) + "</text>\n";
  }
  out += "</g>\n";
  out += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(h - 12) + "\" text-anchor=\"middle\">" + escape(style.x_label) + "</text>\n";
  out += "<text x=\"16\" y=\"" + num(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         num(top + ph / 2) + ")\">" + escape(style.y_label) + "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const std::string colour = kPalette[k % std::size(kPalette)];
    if (!s.se.empty()) {
      out += "<g stroke=\"" + colour + "\" stroke-width=\"1\">\n";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || !(s.se[i] > 0.0)) continue;
        const double e = style.error_z * s.se[i];
        out += "<line x1=\"" + num(px(s.x[i])) + "\" y1=\"" + num(py(s.y[i] - e)) + "\" x2=\"" + num(px(s.x[i])) +
               "\" y2=\"" + num(py(s.y[i] + e)) + "\"/>\n";
      }
      out += "</g>\n";
    }
    out += "<polyline fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out += (first ? "" : " ") + num(px(s.x[i])) + "," + num(py(s.y[i]));
      first = false;
    }
    out += "\"/>\n";
    const double ly = top + 14.0 + 18.0 * static_cast<double>(k);
    out += "<line x1=\"" + num(left + pw + 12) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(left + pw + 32) + "\" y2=\"" +
           num(ly - 4) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>";
    out += "<text class=\"legend\" x=\"" + num(left + pw + 36) + "\" y=\"" + num(ly) + "\">" + escape(s.name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

void emit_plot(const std::vector<PlotSeries>& series, const PlotStyle& style, const std::filesystem::path& path) {
  const std::string svg = render_plot(series, style);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << svg;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace dcx
