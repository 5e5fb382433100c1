#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lpoa/analysis.hpp"

namespace lpoa {

/// One curve: the monotone envelope against the iteration index (points with
/// k = 0 are not drawn on the log axis) and, optionally, the fitted power law
/// over its window.
struct PlotSeries {
  std::string label;
  std::vector<double> envelope;
  std::optional<RateFit> fit;
};

inline constexpr int kPlotWidth = 800;
inline constexpr int kPlotHeight = 600;

/// Self-contained log-log SVG with decade ticks. Envelopes are solid, fits dashed.
std::string render_loglog_svg(const std::vector<PlotSeries>& series, const std::string& title);

}  // namespace lpoa
