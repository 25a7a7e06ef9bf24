#include "lookahead/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace lookahead {

namespace {

constexpr double kWidth = 860.0, kHeight = 520.0;
constexpr double kLeft = 70.0, kRight = 30.0, kTop = 30.0, kBottom = 50.0;

const char* kPalette[10] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v, const char* spec = "%.2f") {
  char buf[40];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

// round ticks: step = nice multiple of a power of ten giving ~5 divisions
std::vector<double> tick_values(double lo, double hi) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (mag * m >= raw) { step = mag * m; break; }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 0.5 * step; t += step)
    ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return ticks;
}

}  // namespace

std::string emit_plot(const std::vector<RegretRow>& rows, bool sqrt_ref) {
  // per-seed series of (episode, cumulative realized regret), seeds in first-seen order
  std::vector<std::uint64_t> seed_order;
  std::map<std::uint64_t, std::vector<std::pair<double, double>>> series;
  double x_max = 1.0, y_max = 0.0;
  for (const RegretRow& r : rows) {
    if (!series.count(r.seed)) seed_order.push_back(r.seed);
    series[r.seed].emplace_back(static_cast<double>(r.episode), r.regret_realized_cum);
    x_max = std::max(x_max, static_cast<double>(r.episode));
    y_max = std::max(y_max, r.regret_realized_cum);
  }
  if (y_max <= 0.0) y_max = 1.0;
  const double x_min = 0.0, y_min = 0.0;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - y_min) / (y_max - y_min) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";

  // axes
  svg << "<g stroke=\"black\" stroke-width=\"1\">\n";
  svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + ph) << "\" x2=\""
      << num(kLeft + pw) << "\" y2=\"" << num(kTop + ph) << "\"/>\n";
  svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft)
      << "\" y2=\"" << num(kTop + ph) << "\"/>\n";
  svg << "</g>\n";

  svg << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n";
  for (double t : tick_values(x_min, x_max)) {
    const double x = px(t);
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(x)
        << "\" y2=\"" << num(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + ph + 18)
        << "\" text-anchor=\"middle\">" << num(t, "%.4g") << "</text>\n";
  }
  for (double t : tick_values(y_min, y_max)) {
    const double y = py(t);
    svg << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft)
        << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\">" << num(t, "%.4g") << "</text>\n";
  }
  svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 12)
      << "\" text-anchor=\"middle\">episode</text>\n";
  svg << "<text x=\"16\" y=\"" << num(kTop + ph / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << num(kTop + ph / 2)
      << ")\">cumulative regret</text>\n";
  svg << "</g>\n";

  auto polyline = [&](const std::vector<std::pair<double, double>>& pts) {
    std::ostringstream s;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) s << ' ';
      s << num(px(pts[i].first)) << ',' << num(py(pts[i].second));
    }
    return s.str();
  };

  for (std::size_t i = 0; i < seed_order.size(); ++i) {
    const auto& pts = series[seed_order[i]];
    svg << "<polyline fill=\"none\" stroke=\"" << kPalette[i % 10]
        << "\" stroke-opacity=\"0.45\" stroke-width=\"1\" points=\"" << polyline(pts)
        << "\"/>\n";
  }

  if (!seed_order.empty()) {
    // pointwise mean over seeds (episode grids coincide by construction)
    std::map<double, std::pair<double, int>> acc;
    for (const auto& [seed, pts] : series)
      for (const auto& [x, y] : pts) {
        acc[x].first += y;
        acc[x].second += 1;
      }
    std::vector<std::pair<double, double>> mean;
    for (const auto& [x, sum] : acc)
      mean.emplace_back(x, sum.first / static_cast<double>(sum.second));
    svg << "<polyline id=\"mean\" fill=\"none\" stroke=\"black\" stroke-width=\"2\" points=\""
        << polyline(mean) << "\"/>\n";

    if (sqrt_ref && !mean.empty()) {
      const double final_mean = mean.back().second;
      std::vector<std::pair<double, double>> ref;
      for (const auto& [x, unused] : mean)
        ref.emplace_back(x, final_mean * std::sqrt(x / x_max));
      std::ostringstream d;
      for (std::size_t i = 0; i < ref.size(); ++i)
        d << (i ? " L " : "M ") << num(px(ref[i].first)) << ' ' << num(py(ref[i].second));
      svg << "<path id=\"sqrt-ref\" fill=\"none\" stroke=\"#555555\" stroke-width=\"1.5\" "
             "stroke-dasharray=\"6 4\" d=\""
          << d.str() << "\"/>\n";
    }
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace lookahead
