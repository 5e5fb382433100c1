#include "lpoa/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace lpoa {
namespace {

constexpr double kLeft = 80, kRight = 170, kTop = 50, kBottom = 60;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
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

std::string decade_label(int e) {
  if (e == 0) return "1";
  if (e == 1) return "10";
  return "10^" + std::to_string(e);
}

}  // namespace

std::string render_loglog_svg(const std::vector<PlotSeries>& series, const std::string& title) {
  double xmax = 1.0, ymin = std::numeric_limits<double>::infinity(), ymax = 0.0;
  for (const auto& s : series) {
    for (size_t k = 1; k < s.envelope.size(); ++k) {
      if (!(s.envelope[k] > 0.0)) continue;
      xmax = std::max(xmax, static_cast<double>(k));
      ymin = std::min(ymin, s.envelope[k]);
      ymax = std::max(ymax, s.envelope[k]);
    }
  }
  if (!std::isfinite(ymin)) ymin = 0.1, ymax = 1.0;
  const int ex_lo = 0, ex_hi = std::max(1, static_cast<int>(std::ceil(std::log10(xmax))));
  const int ey_lo = static_cast<int>(std::floor(std::log10(ymin)));
  const int ey_hi = std::max(ey_lo + 1, static_cast<int>(std::ceil(std::log10(ymax))));

  const double pw = kPlotWidth - kLeft - kRight, ph = kPlotHeight - kTop - kBottom;
  auto px = [&](double k) { return kLeft + pw * (std::log10(k) - ex_lo) / (ex_hi - ex_lo); };
  auto py = [&](double d) {
    return kTop + ph * (1.0 - (std::log10(d) - ey_lo) / (ey_hi - ey_lo));
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kPlotWidth << "\" height=\""
    << kPlotHeight << "\" viewBox=\"0 0 " << kPlotWidth << ' ' << kPlotHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kPlotWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(title) << "</text>\n";

  // Decade grid and ticks.
  for (int e = ex_lo; e <= ex_hi; ++e) {
    const double x = px(std::pow(10.0, e));
    o << "<line x1=\"" << fmt(x) << "\" y1=\"" << kTop << "\" x2=\"" << fmt(x) << "\" y2=\""
      << kTop + ph << "\" stroke=\"#dddddd\"/>\n";
    o << "<text x=\"" << fmt(x) << "\" y=\"" << kTop + ph + 18
      << "\" text-anchor=\"middle\">" << decade_label(e) << "</text>\n";
  }
  for (int e = ey_lo; e <= ey_hi; ++e) {
    const double y = py(std::pow(10.0, e));
    o << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(y) << "\" x2=\"" << kLeft + pw << "\" y2=\""
      << fmt(y) << "\" stroke=\"#dddddd\"/>\n";
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">"
      << decade_label(e) << "</text>\n";
  }
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << kPlotHeight - 15
    << "\" text-anchor=\"middle\">iteration k</text>\n";
  o << "<text transform=\"translate(22," << fmt(kTop + ph / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">Hausdorff error</text>\n";

  for (size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
    std::string pts;
    for (size_t k = 1; k < s.envelope.size(); ++k) {
      if (!(s.envelope[k] > 0.0)) continue;
      pts += fmt(px(static_cast<double>(k))) + "," + fmt(py(s.envelope[k])) + " ";
    }
    if (!pts.empty()) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
        << pts << "\"/>\n";
    }
    if (s.fit && s.fit->points_used >= 2 && s.fit->k_min > 0) {
      const double k0 = s.fit->k_min, k1 = s.fit->k_max;
      auto model = [&](double k) { return s.fit->lambda_hat * std::pow(k, s.fit->slope); };
      o << "<line x1=\"" << fmt(px(k0)) << "\" y1=\"" << fmt(py(model(k0))) << "\" x2=\""
        << fmt(px(k1)) << "\" y2=\"" << fmt(py(model(k1))) << "\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>\n";
    }
    const double ly = kTop + 14 + 18.0 * static_cast<double>(i);
    o << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << fmt(ly) << "\" x2=\"" << kLeft + pw + 36
      << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << kLeft + pw + 42 << "\" y=\"" << fmt(ly + 4) << "\">" << escape(s.label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace lpoa
