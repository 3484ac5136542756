#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rankstrat/eda.hpp"
#include "rankstrat/errors.hpp"
#include "svg.hpp"

namespace rankstrat {

namespace {

// Linear blue-white-red ramp over [-1, 1].
std::string diverging_color(double v) {
  v = std::clamp(v, -1.0, 1.0);
  const double t = std::abs(v);
  const int end_r = v < 0 ? 59 : 180, end_g = v < 0 ? 76 : 4, end_b = v < 0 ? 192 : 38;
  auto mix = [t](int end) { return static_cast<int>(std::lround(255.0 + (end - 255.0) * t)); };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", mix(end_r), mix(end_g), mix(end_b));
  return buf;
}

}  // namespace

std::string render_heatmap(const CorrelationMatrix& matrix) {
  const std::size_t k = matrix.labels.size();
  if (k == 0) throw EmptyInput("correlation matrix is empty");
  const double cell = 64, left = 80, top = 50;
  const double width = left + cell * static_cast<double>(k) + 100;
  const double height = top + cell * static_cast<double>(k) + 60;
  svg::Document doc(width, height);
  doc.text(width / 2, 28, "Spearman correlation", 16);
  for (std::size_t i = 0; i < k; ++i) {
    const double y = top + cell * static_cast<double>(i);
    doc.text(left - 8, y + cell / 2 + 4, matrix.labels[i], 12, "end");
    doc.text(left + cell * static_cast<double>(i) + cell / 2, top + cell * static_cast<double>(k) + 18,
             matrix.labels[i], 12);
    for (std::size_t j = 0; j < k; ++j) {
      const double x = left + cell * static_cast<double>(j);
      const double v = matrix.values[i][j];
      doc.rect(x, y, cell, cell, diverging_color(v), "#ffffff");
      doc.text(x + cell / 2, y + cell / 2 + 4, svg::num(v), 12, "middle",
               std::abs(v) > 0.6 ? "#ffffff" : "#222222");
    }
  }
  // Color legend.
  const double lx = left + cell * static_cast<double>(k) + 30;
  const double lh = cell * static_cast<double>(k);
  for (int s = 0; s < 20; ++s) {
    const double v = 1.0 - 2.0 * (s + 0.5) / 20.0;
    doc.rect(lx, top + lh * s / 20.0, 18, lh / 20.0, diverging_color(v));
  }
  doc.text(lx + 24, top + 10, "1.00", 10, "start");
  doc.text(lx + 24, top + lh / 2 + 4, "0.00", 10, "start");
  doc.text(lx + 24, top + lh, "-1.00", 10, "start");
  return doc.finish();
}

std::string render_boxplots(std::span<const LabeledBoxStats> stats) {
  if (stats.empty()) throw EmptyInput("no box plot statistics to render");
  const double panel = 110, left = 60, top = 50, plot_h = 360;
  const double width = left + panel * static_cast<double>(stats.size()) + 20;
  const double height = top + plot_h + 60;
  double lo = 0.0, hi = 100.0;
  for (const auto& s : stats) {
    lo = std::min(lo, s.stats.min);
    hi = std::max(hi, s.stats.max);
  }
  auto y_of = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };

  svg::Document doc(width, height);
  doc.text(width / 2, 28, "Parameter distributions", 16);
  for (int tick = 0; tick <= 10; ++tick) {
    const double v = lo + (hi - lo) * tick / 10.0;
    doc.line(left, y_of(v), width - 20, y_of(v), "#eeeeee");
    doc.text(left - 6, y_of(v) + 4, svg::num(v, 0), 10, "end");
  }
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const auto& s = stats[i].stats;
    const double cx = left + panel * (static_cast<double>(i) + 0.5);
    const double half = panel * 0.25;
    doc.line(cx, y_of(s.whisker_high), cx, y_of(s.q3), "#333333");
    doc.line(cx, y_of(s.q1), cx, y_of(s.whisker_low), "#333333");
    doc.line(cx - half / 2, y_of(s.whisker_high), cx + half / 2, y_of(s.whisker_high), "#333333");
    doc.line(cx - half / 2, y_of(s.whisker_low), cx + half / 2, y_of(s.whisker_low), "#333333");
    doc.rect(cx - half, y_of(s.q3), 2 * half, std::max(0.5, y_of(s.q1) - y_of(s.q3)),
             svg::class_color(static_cast<int>(i) + 1), "#333333");
    doc.line(cx - half, y_of(s.median), cx + half, y_of(s.median), "#000000", 2.0);
    doc.text(cx + half + 4, y_of(s.median) + 4, svg::num(s.median), 10, "start");
    for (double o : s.outliers) doc.circle(cx, y_of(o), 3, "none", "#333333");
    doc.text(cx, top + plot_h + 20, stats[i].label, 12);
  }
  return doc.finish();
}

std::string render_bands(const RankBandSpread& spread) {
  if (spread.bands.empty()) throw EmptyInput("no rank bands to render");
  const double bar = 56, left = 60, top = 50, plot_h = 320;
  const double width = left + bar * static_cast<double>(spread.bands.size()) + 20;
  const double height = top + plot_h + 60;
  double lo = spread.bands.front().min, hi = spread.bands.front().max;
  for (const auto& b : spread.bands) {
    lo = std::min(lo, b.min);
    hi = std::max(hi, b.max);
  }
  const double pad = std::max(1.0, (hi - lo) * 0.05);
  lo -= pad;
  hi += pad;
  auto y_of = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };

  svg::Document doc(width, height);
  doc.text(width / 2, 28, "Score spread across rank bands", 16);
  for (std::size_t i = 0; i < spread.bands.size(); ++i) {
    const auto& b = spread.bands[i];
    const double x = left + bar * static_cast<double>(i);
    doc.rect(x + 6, y_of(b.max), bar - 12, std::max(1.0, y_of(b.min) - y_of(b.max)), "#63b7e6",
             "#2a6f99");
    doc.text(x + bar / 2, y_of(b.max) - 16, svg::num(b.max), 9);
    doc.text(x + bar / 2, y_of(b.max) - 6, "+" + svg::num(b.span), 9, "middle", "#2a6f99");
    doc.text(x + bar / 2, y_of(b.min) + 12, svg::num(b.min), 9);
    doc.text(x + bar / 2, top + plot_h + 20,
             std::to_string(b.ranks.first) + "-" + std::to_string(b.ranks.last), 10);
  }
  return doc.finish();
}

}  // namespace rankstrat
