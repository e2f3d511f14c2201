#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace levydc::svg {

struct Series {
  std::string label;
  std::vector<double> x;  ///< log2 n
  std::vector<double> y;  ///< error, plotted on a log10 axis
  bool dashed = false;
};

inline std::string fmt(double v, int prec = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

inline std::string escape(const std::string& s) {
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

/// Line chart with log2 n on x and log10 error on y; nonpositive errors are skipped.
inline std::string line_chart(const std::string& title, const std::vector<Series>& series) {
  const double W = 640, H = 420, L = 70, R = 170, T = 40, B = 50;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.y[i] > 0.0)) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, std::log10(s.y[i]));
      ymax = std::max(ymax, std::log10(s.y[i]));
    }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = -1, ymax = 0;
  if (xmax == xmin) xmax = xmin + 1;
  ymin = std::floor(ymin);
  ymax = std::ceil(ymax);
  if (ymax == ymin) ymax = ymin + 1;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                 "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};
  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W, 0) + "\" height=\"" + fmt(H, 0) +
       "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + fmt(W / 2 - R / 2, 0) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) +
       "</text>\n";
  o += "<line x1=\"" + fmt(L) + "\" y1=\"" + fmt(H - B) + "\" x2=\"" + fmt(W - R) + "\" y2=\"" + fmt(H - B) +
       "\" stroke=\"black\"/>\n";
  o += "<line x1=\"" + fmt(L) + "\" y1=\"" + fmt(T) + "\" x2=\"" + fmt(L) + "\" y2=\"" + fmt(H - B) +
       "\" stroke=\"black\"/>\n";
  for (double x = std::ceil(xmin); x <= xmax + 1e-9; x += 1.0) {
    o += "<line x1=\"" + fmt(px(x)) + "\" y1=\"" + fmt(H - B) + "\" x2=\"" + fmt(px(x)) + "\" y2=\"" +
         fmt(H - B + 5) + "\" stroke=\"black\"/>\n";
    o += "<text x=\"" + fmt(px(x)) + "\" y=\"" + fmt(H - B + 18) + "\" text-anchor=\"middle\">" + fmt(x, 0) +
         "</text>\n";
  }
  for (double y = ymin; y <= ymax + 1e-9; y += 1.0) {
    o += "<line x1=\"" + fmt(L - 5) + "\" y1=\"" + fmt(py(y)) + "\" x2=\"" + fmt(L) + "\" y2=\"" + fmt(py(y)) +
         "\" stroke=\"black\"/>\n";
    o += "<text x=\"" + fmt(L - 8) + "\" y=\"" + fmt(py(y) + 4) + "\" text-anchor=\"end\">1e" + fmt(y, 0) +
         "</text>\n";
  }
  o += "<text x=\"" + fmt((L + W - R) / 2) + "\" y=\"" + fmt(H - 12) + "\" text-anchor=\"middle\">log2 n</text>\n";
  o += "<text x=\"16\" y=\"" + fmt((T + H - B) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       fmt((T + H - B) / 2) + ")\">strong error</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = colors[k % 10];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (s.y[i] > 0.0) pts += fmt(px(s.x[i])) + "," + fmt(py(std::log10(s.y[i]))) + " ";
    o += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\"" +
         (s.dashed ? " stroke-dasharray=\"5,3\"" : "") + " points=\"" + pts + "\"/>\n";
    const double ly = T + 16.0 * static_cast<double>(k);
    o += "<line x1=\"" + fmt(W - R + 12) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(W - R + 36) + "\" y2=\"" +
         fmt(ly) + "\" stroke=\"" + color + "\" stroke-width=\"1.5\"" +
         (s.dashed ? " stroke-dasharray=\"5,3\"" : "") + "/>\n";
    o += "<text x=\"" + fmt(W - R + 42) + "\" y=\"" + fmt(ly + 4) + "\">" + escape(s.label) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

}  // namespace levydc::svg
