// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

// Minimal standalone SVG charts for the summary tables.

#include <algorithm>
#include <cstdio>
#include <map>
#include <string>

#include "zoomkit/jobs.hpp"

namespace zoomkit {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 360.0;
constexpr double kLeft = 56.0;
constexpr double kRight = 150.0;
constexpr double kTop = 24.0;
constexpr double kBottom = 40.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
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

const char* color(std::size_t i) {
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  return kPalette[i % 6];
}

std::string header() {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"11\">\n"
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string text(double x, double y, const std::string& s, const char* anchor = "start") {
  return "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" text-anchor=\"" + anchor + "\">" + escape(s) +
         "</text>\n";
}

std::string line(double x0, double y0, double x1, double y1, const char* stroke = "black") {
  return "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(x1) + "\" y2=\"" + fmt(y1) +
         "\" stroke=\"" + stroke + "\"/>\n";
}

struct Frame {
  double y_lo = 0.0;
  double y_hi = 1.0;
  double plot_w() const { return kWidth - kLeft - kRight; }
  double plot_h() const { return kHeight - kTop - kBottom; }
  double y(double v) const { return kTop + plot_h() * (1.0 - (v - y_lo) / (y_hi - y_lo)); }
};

std::string axes(const Frame& f, const std::string& y_label) {
  std::string out = line(kLeft, kTop, kLeft, kTop + f.plot_h());
  out += line(kLeft, kTop + f.plot_h(), kLeft + f.plot_w(), kTop + f.plot_h());
  for (int i = 0; i <= 4; ++i) {
    const double v = f.y_lo + (f.y_hi - f.y_lo) * i / 4.0;
    out += line(kLeft - 4, f.y(v), kLeft, f.y(v));
    out += text(kLeft - 6, f.y(v) + 4, fmt(v), "end");
  }
  out += text(12, kTop - 8, y_label);
  return out;
}

}  // namespace

std::string ratio_curve_svg(std::span<const RatioStat> table) {
  std::map<RatioSplit, std::vector<const RatioStat*>> series;
  std::int64_t max_index = 0;
  Frame f{0.0, 1.0};
  for (const auto& s : table) {
    series[s.split].push_back(&s);
    max_index = std::max(max_index, s.layer_index);
    f.y_lo = std::min(f.y_lo, s.mean - s.ci95_half_width);
    f.y_hi = std::max(f.y_hi, s.mean + s.ci95_half_width);
  }
  auto x = [&](std::int64_t l) {
    return kLeft + f.plot_w() * (max_index == 0 ? 0.5 : static_cast<double>(l) / static_cast<double>(max_index));
  };
  std::string out = header() + axes(f, "attention ratio");
  out += text(kLeft + f.plot_w() / 2, kHeight - 8, "layer index", "middle");
  out += line(kLeft, f.y(1.0), kLeft + f.plot_w(), f.y(1.0), "#999999");
  std::size_t ci = 0;
  for (const auto& [split, points] : series) {
    const char* c = color(ci);
    std::string band_top;
    std::string band_bottom;
    std::string path;
    for (const RatioStat* p : points) {
      band_top += fmt(x(p->layer_index)) + "," + fmt(f.y(p->mean + p->ci95_half_width)) + " ";
      path += fmt(x(p->layer_index)) + "," + fmt(f.y(p->mean)) + " ";
    }
    for (auto it = points.rbegin(); it != points.rend(); ++it) {
      band_bottom += fmt(x((*it)->layer_index)) + "," + fmt(f.y((*it)->mean - (*it)->ci95_half_width)) + " ";
    }
    out += "<polygon points=\"" + band_top + band_bottom + "\" fill=\"" + c + "\" fill-opacity=\"0.2\"/>\n";
    out += "<polyline points=\"" + path + "\" fill=\"none\" stroke=\"" + c + "\" stroke-width=\"1.5\"/>\n";
    const double ly = kTop + 16.0 * static_cast<double>(ci);
    out += line(kWidth - kRight + 12, ly, kWidth - kRight + 32, ly, c);
    out += text(kWidth - kRight + 36, ly + 4, std::string(split_name(split)));
    ++ci;
  }
  return out + "</svg>\n";
}

std::string eval_bars_svg(const EvalSummary& summary) {
  std::vector<std::pair<std::string, const std::vector<MethodMean>*>> groups{{"overall", &summary.overall}};
  for (const auto& [name, means] : summary.by_partition) groups.emplace_back(name, &means);
  std::vector<std::string> methods;
  Frame f{0.0, 1.0};
  for (const auto& [name, means] : groups) {
    for (const auto& m : *means) {
      if (std::find(methods.begin(), methods.end(), m.method) == methods.end()) methods.push_back(m.method);
      f.y_hi = std::max(f.y_hi, m.mean);
    }
  }
  std::string out = header() + axes(f, summary.metric);
  const double group_w = f.plot_w() / static_cast<double>(groups.size());
  const double bar_w = group_w * 0.8 / static_cast<double>(std::max<std::size_t>(methods.size(), 1));
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double gx = kLeft + group_w * static_cast<double>(g) + group_w * 0.1;
    for (const auto& m : *groups[g].second) {
      const auto mi = static_cast<std::size_t>(std::find(methods.begin(), methods.end(), m.method) - methods.begin());
      const double top = f.y(m.mean);
      out += "<rect x=\"" + fmt(gx + bar_w * static_cast<double>(mi)) + "\" y=\"" + fmt(top) + "\" width=\"" +
             fmt(bar_w * 0.95) + "\" height=\"" + fmt(f.y(0.0) - top) + "\" fill=\"" + color(mi) + "\"/>\n";
    }
    out += text(gx + group_w * 0.4, kHeight - 20, groups[g].first, "middle");
  }
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    const double ly = kTop + 16.0 * static_cast<double>(mi);
    out += "<rect x=\"" + fmt(kWidth - kRight + 12) + "\" y=\"" + fmt(ly - 6) +
           "\" width=\"12\" height=\"10\" fill=\"" + color(mi) + "\"/>\n";
    out += text(kWidth - kRight + 30, ly + 4, methods[mi]);
  }
  return out + "</svg>\n";
}

}  // namespace zoomkit
