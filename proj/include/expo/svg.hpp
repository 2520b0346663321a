#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "expo/decompose.hpp"
#include "expo/oaxaca.hpp"

namespace expo {
namespace svg {

// Charts are emitted directly as SVG text: fixed canvas, axes computed from
// the data extent, and every mark carrying its value as a data-* attribute
// so tests can assert numbers without rendering.

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Ticks {
  double lo = 0.0, hi = 1.0, step = 0.2;
};

inline Ticks nice_ticks(double lo, double hi, int target = 6) {
  if (!(hi > lo)) hi = lo + 1.0;
  double span = hi - lo;
  double raw = span / std::max(1, target);
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double norm = raw / mag;
  double step = (norm <= 1.0 ? 1.0 : norm <= 2.0 ? 2.0 : norm <= 5.0 ? 5.0 : 10.0) * mag;
  Ticks t;
  t.step = step;
  t.lo = std::floor(lo / step) * step;
  t.hi = std::ceil(hi / step) * step;
  return t;
}

inline void rect(std::string& out, double x, double y, double w, double h,
                 const char* fill, const std::string& attrs) {
  out += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(w) +
         "\" height=\"" + fmt(h) + "\" fill=\"" + fill + "\" " + attrs + "/>\n";
}

inline void text(std::string& out, double x, double y, const std::string& s,
                 const char* anchor = "middle", int size = 11) {
  out += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" text-anchor=\"" + anchor +
         "\" font-family=\"sans-serif\" font-size=\"" + std::to_string(size) + "\">" + s +
         "</text>\n";
}

inline void line(std::string& out, double x1, double y1, double x2, double y2,
                 const char* stroke, double width = 1.0) {
  out += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) + "\" y2=\"" +
         fmt(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt(width) + "\"/>\n";
}

/// Grouped bars for composition / within / interaction per period plus a
/// line for the total change.
inline std::string decomposition_chart(const std::vector<DecompResult>& results,
                                       const std::string& title) {
  const double width = 960, height = 480;
  const double ml = 70, mr = 30, mt = 50, mb = 70;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double lo = 0.0, hi = 0.0;
  for (const auto& r : results) {
    for (double v : {r.total, r.composition, r.within, r.interaction}) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  auto ticks = nice_ticks(lo, hi);
  auto yof = [&](double v) { return mt + ph * (ticks.hi - v) / (ticks.hi - ticks.lo); };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" +
         fmt(height) + "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(height) + "\">\n";
  rect(out, 0, 0, width, height, "#ffffff", "");
  text(out, width / 2, 25, title, "middle", 15);

  for (double v = ticks.lo; v <= ticks.hi + ticks.step / 2; v += ticks.step) {
    line(out, ml, yof(v), width - mr, yof(v), "#dddddd");
    text(out, ml - 8, yof(v) + 4, fmt(v), "end", 10);
  }

  static const char* kColors[3] = {"#4e79a7", "#f28e2b", "#76b7b2"};
  static const char* kNames[3] = {"composition", "within", "interaction"};
  size_t n = results.size();
  double slot = n > 0 ? pw / n : pw;
  double bw = std::min(18.0, slot / 4.5);

  for (size_t i = 0; i < n; ++i) {
    const auto& r = results[i];
    double cx = ml + slot * (i + 0.5);
    double vals[3] = {r.composition, r.within, r.interaction};
    for (int k = 0; k < 3; ++k) {
      double v = vals[k];
      double x = cx + (k - 1.5) * bw;
      double y0 = yof(std::max(0.0, v)), y1 = yof(std::min(0.0, v));
      rect(out, x, y0, bw - 1, std::max(0.5, y1 - y0), kColors[k],
           "data-period=\"" + period_label(r.period) + "\" data-component=\"" + kNames[k] +
               "\" data-value=\"" + fmt(v) + "\"");
    }
    text(out, cx, height - mb + 16, period_label(r.period), "middle", 9);
  }

  line(out, ml, yof(0), width - mr, yof(0), "#888888");

  out += "<polyline fill=\"none\" stroke=\"#222222\" stroke-width=\"2\" points=\"";
  for (size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += fmt(ml + slot * (i + 0.5)) + "," + fmt(yof(results[i].total));
  }
  out += "\"/>\n";
  for (size_t i = 0; i < n; ++i)
    out += "<circle cx=\"" + fmt(ml + slot * (i + 0.5)) + "\" cy=\"" +
           fmt(yof(results[i].total)) + "\" r=\"3\" fill=\"#222222\" data-period=\"" +
           period_label(results[i].period) + "\" data-component=\"total\" data-value=\"" +
           fmt(results[i].total) + "\"/>\n";

  double lx = ml;
  for (int k = 0; k < 3; ++k) {
    rect(out, lx, height - 28, 12, 12, kColors[k], "");
    text(out, lx + 17, height - 18, kNames[k], "start", 11);
    lx += 130;
  }
  line(out, lx, height - 22, lx + 24, height - 22, "#222222", 2);
  text(out, lx + 30, height - 18, "total", "start", 11);

  out += "</svg>\n";
  return out;
}

/// Horizontal bars of explained contributions per covariate block, largest
/// magnitude on top.
inline std::string ob_blocks_chart(const ObResult& r, const std::string& title) {
  std::vector<int> order(kObBlockCount);
  for (int i = 0; i < kObBlockCount; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double xa = std::abs(r.block_contributions[a]), xb = std::abs(r.block_contributions[b]);
    if (xa != xb) return xa > xb;
    return a < b;
  });

  const double width = 720, height = 360;
  const double ml = 150, mr = 40, mt = 50, mb = 40;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double lo = 0.0, hi = 0.0;
  for (double v : r.block_contributions) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  auto ticks = nice_ticks(lo, hi, 5);
  auto xof = [&](double v) { return ml + pw * (v - ticks.lo) / (ticks.hi - ticks.lo); };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" +
         fmt(height) + "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(height) + "\">\n";
  rect(out, 0, 0, width, height, "#ffffff", "");
  text(out, width / 2, 25, title, "middle", 14);

  for (double v = ticks.lo; v <= ticks.hi + ticks.step / 2; v += ticks.step) {
    line(out, xof(v), mt, xof(v), height - mb, "#dddddd");
    text(out, xof(v), height - mb + 16, fmt(v), "middle", 10);
  }

  double bh = ph / kObBlockCount;
  for (int i = 0; i < kObBlockCount; ++i) {
    int b = order[i];
    double v = r.block_contributions[b];
    double x0 = xof(std::min(0.0, v)), x1 = xof(std::max(0.0, v));
    double y = mt + bh * i + bh * 0.15;
    rect(out, x0, y, std::max(0.5, x1 - x0), bh * 0.7, v < 0 ? "#e15759" : "#4e79a7",
         "data-block=\"" + std::string(kObBlockNames[b]) + "\" data-value=\"" + fmt(v) + "\"");
    text(out, ml - 8, y + bh * 0.5, kObBlockNames[b], "end", 11);
  }
  line(out, xof(0), mt, xof(0), height - mb, "#888888");
  out += "</svg>\n";
  return out;
}

}  // namespace svg
}  // namespace expo
