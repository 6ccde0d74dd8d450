#include "wavebench/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <utility>

#include <fmt/format.h>

#include "wavebench/error.hpp"

namespace wavebench {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 200.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                              "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string xml_escape(std::string_view s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

void open_svg(std::string& out, std::string_view title) {
  out += fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight, kWidth, kHeight);
  out += fmt::format("<rect x=\"0\" y=\"0\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n",
                     kWidth, kHeight);
  out += fmt::format("<text x=\"{:.2f}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                     kLeft + kPlotW / 2, xml_escape(title));
  out += fmt::format(
      "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
      "stroke=\"black\"/>\n",
      kLeft, kTop, kPlotW, kPlotH);
}

void axis_titles(std::string& out, std::string_view x_title, std::string_view y_title) {
  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n",
                     kLeft + kPlotW / 2, kHeight - 15, xml_escape(x_title));
  out += fmt::format(
      "<text x=\"18\" y=\"{:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2f})\">"
      "{}</text>\n",
      kTop + kPlotH / 2, kTop + kPlotH / 2, xml_escape(y_title));
}

struct LogAxis {
  int lo = 0;
  int hi = 1;
  [[nodiscard]] double frac(double v) const {
    return (std::log10(v) - lo) / static_cast<double>(hi - lo);
  }
};

struct LinearAxis {
  double lo = 0.0;
  double hi = 1.0;
  [[nodiscard]] double frac(double v) const { return (v - lo) / (hi - lo); }
};

LogAxis log_axis(double min_v, double max_v) {
  LogAxis a{static_cast<int>(std::floor(std::log10(min_v))),
            static_cast<int>(std::ceil(std::log10(max_v)))};
  if (a.hi <= a.lo) {
    a.hi = a.lo + 1;
  }
  return a;
}

double px_x(double frac) { return kLeft + frac * kPlotW; }
double px_y(double frac) { return kTop + (1.0 - frac) * kPlotH; }

std::string decade_label(int e) {
  if (e >= 0 && e <= 4) {
    return fmt::format("{:.0f}", std::pow(10.0, e));
  }
  return fmt::format("1e{}", e);
}

}  // namespace

std::vector<RooflinePoint> roofline_points(const std::vector<BenchRecord>& records) {
  std::vector<RooflinePoint> points;
  for (const BenchRecord& r : records) {
    const double bytes = static_cast<double>(r.ideal_reads_bytes + r.ideal_writes_bytes);
    if (r.status != "ok" || bytes <= 0.0 || !(r.seconds_median > 0.0) || r.flops == 0) {
      continue;
    }
    points.push_back({fmt::format("{} {} {}^3", r.variant, r.schedule, r.nx),
                      arithmetic_intensity(static_cast<double>(r.flops), bytes),
                      static_cast<double>(r.flops) / r.seconds_median / 1e9});
  }
  return points;
}

std::string render_roofline_svg(const MachineSpec& spec,
                                const std::vector<RooflinePoint>& points) {
  if (!(spec.peak_gflops > 0.0) || !(spec.mem_bw_gbs > 0.0)) {
    throw ConfigurationError("machine spec needs positive peak and bandwidth");
  }
  for (const RooflinePoint& p : points) {
    if (!(p.arithmetic_intensity > 0.0) || !(p.performance > 0.0) ||
        !std::isfinite(p.arithmetic_intensity) || !std::isfinite(p.performance)) {
      throw ConfigurationError("roofline point '" + p.label + "' needs positive finite values");
    }
  }
  const double ridge = ridge_point(spec);
  double x_min = ridge / 10.0;
  double x_max = ridge * 10.0;
  for (const Ceiling& c : spec.cache_ceilings) {
    x_min = std::min(x_min, spec.peak_gflops / c.bandwidth_gbs / 10.0);
  }
  for (const RooflinePoint& p : points) {
    x_min = std::min(x_min, p.arithmetic_intensity / 2.0);
    x_max = std::max(x_max, p.arithmetic_intensity * 2.0);
  }
  const LogAxis xa = log_axis(x_min, x_max);
  const double x_lo = std::pow(10.0, xa.lo);
  const double x_hi = std::pow(10.0, xa.hi);

  double y_min = roofline_attainable(spec, x_lo);
  double y_max = spec.peak_gflops * 2.0;
  for (const RooflinePoint& p : points) {
    y_min = std::min(y_min, p.performance / 2.0);
    y_max = std::max(y_max, p.performance * 2.0);
  }
  const LogAxis ya = log_axis(y_min, y_max);

  std::string out;
  open_svg(out, "Roofline: " + spec.name);

  for (int e = xa.lo; e <= xa.hi; ++e) {
    const double x = px_x(xa.frac(std::pow(10.0, e)));
    out += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#dddddd\"/>\n"
        "<text x=\"{0:.2f}\" y=\"{3:.2f}\" text-anchor=\"middle\">{4}</text>\n",
        x, kTop, kTop + kPlotH, kTop + kPlotH + 18, decade_label(e));
  }
  for (int e = ya.lo; e <= ya.hi; ++e) {
    const double y = px_y(ya.frac(std::pow(10.0, e)));
    out += fmt::format(
        "<line x1=\"{1:.2f}\" y1=\"{0:.2f}\" x2=\"{2:.2f}\" y2=\"{0:.2f}\" stroke=\"#dddddd\"/>\n"
        "<text x=\"{3:.2f}\" y=\"{4:.2f}\" text-anchor=\"end\">{5}</text>\n",
        y, kLeft, kLeft + kPlotW, kLeft - 6, y + 4, decade_label(e));
  }
  axis_titles(out, "Arithmetic intensity (FLOP/byte)", "Performance (GFLOP/s)");

  const auto ceiling_path = [&](double bandwidth) {
    const double knee = spec.peak_gflops / bandwidth;
    return fmt::format("{:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f}", px_x(xa.frac(x_lo)),
                       px_y(ya.frac(x_lo * bandwidth)), px_x(xa.frac(knee)),
                       px_y(ya.frac(spec.peak_gflops)), px_x(xa.frac(x_hi)),
                       px_y(ya.frac(spec.peak_gflops)));
  };
  out += fmt::format(
      "<polyline class=\"ceiling\" points=\"{}\" fill=\"none\" stroke=\"black\" "
      "stroke-width=\"2\"/>\n",
      ceiling_path(spec.mem_bw_gbs));
  out += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\">{:.6g} GB/s</text>\n", px_x(xa.frac(x_lo)) + 6,
      px_y(ya.frac(x_lo * spec.mem_bw_gbs)) - 8, spec.mem_bw_gbs);
  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.6g} GFLOP/s</text>\n",
                     kLeft + kPlotW - 4, px_y(ya.frac(spec.peak_gflops)) - 6, spec.peak_gflops);
  for (const Ceiling& c : spec.cache_ceilings) {
    out += fmt::format(
        "<polyline class=\"ceiling-{}\" points=\"{}\" fill=\"none\" stroke=\"#555555\" "
        "stroke-dasharray=\"6,4\"/>\n",
        xml_escape(c.name), ceiling_path(c.bandwidth_gbs));
    const double y_label = std::min(x_lo * c.bandwidth_gbs, spec.peak_gflops);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" fill=\"#555555\">{} {:.6g} GB/s</text>\n",
                       px_x(xa.frac(x_lo)) + 6, px_y(ya.frac(y_label)) - 8, xml_escape(c.name),
                       c.bandwidth_gbs);
  }

  for (std::size_t i = 0; i < points.size(); ++i) {
    const RooflinePoint& p = points[i];
    const double ceiling = roofline_attainable(spec, p.arithmetic_intensity);
    const bool above = p.performance > ceiling;
    const double x = px_x(xa.frac(p.arithmetic_intensity));
    const double y = px_y(ya.frac(p.performance));
    const char* color = above ? "#d62728" : kPalette[i % kPalette.size()];
    out += fmt::format(
        "<circle class=\"point\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"5\" fill=\"{}\"/>\n"
        "<text x=\"{:.2f}\" y=\"{:.2f}\">{} ({:.4g}, {:.6g})</text>\n",
        x, y, color, x + 8, y + 4, xml_escape(p.label), p.arithmetic_intensity, p.performance);
    if (above) {
      out += fmt::format(
          "<text class=\"warning\" x=\"{:.2f}\" y=\"{:.2f}\" fill=\"#d62728\">"
          "above roofline: out of model</text>\n",
          x + 8, y + 18);
    }
  }
  out += "</svg>\n";
  return out;
}

std::string render_throughput_svg(const std::vector<BenchRecord>& records) {
  std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> series;
  double x_max = 0.0;
  double y_max = 0.0;
  for (const BenchRecord& r : records) {
    if (r.status != "ok") {
      continue;
    }
    const std::string key = r.variant + " " + r.schedule;
    auto it = std::find_if(series.begin(), series.end(),
                           [&](const auto& s) { return s.first == key; });
    if (it == series.end()) {
      series.push_back({key, {}});
      it = std::prev(series.end());
    }
    it->second.emplace_back(static_cast<double>(r.nx), r.grid_per_s);
    x_max = std::max(x_max, static_cast<double>(r.nx));
    y_max = std::max(y_max, r.grid_per_s);
  }
  for (auto& s : series) {
    std::stable_sort(s.second.begin(), s.second.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  const LinearAxis xa{0.0, x_max > 0.0 ? x_max * 1.05 : 1.0};
  const LinearAxis ya{0.0, y_max > 0.0 ? y_max * 1.1 : 1.0};

  std::string out;
  open_svg(out, "Throughput vs grid size");
  constexpr int kTicks = 5;
  for (int t = 0; t <= kTicks; ++t) {
    const double f = static_cast<double>(t) / kTicks;
    const double x = px_x(f);
    const double y = px_y(f);
    out += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#dddddd\"/>\n"
        "<text x=\"{0:.2f}\" y=\"{3:.2f}\" text-anchor=\"middle\">{4:.4g}</text>\n",
        x, kTop, kTop + kPlotH, kTop + kPlotH + 18, xa.lo + f * (xa.hi - xa.lo));
    out += fmt::format(
        "<line x1=\"{1:.2f}\" y1=\"{0:.2f}\" x2=\"{2:.2f}\" y2=\"{0:.2f}\" stroke=\"#dddddd\"/>\n"
        "<text x=\"{3:.2f}\" y=\"{4:.2f}\" text-anchor=\"end\">{5:.3g}</text>\n",
        y, kLeft, kLeft + kPlotW, kLeft - 6, y + 4, ya.lo + f * (ya.hi - ya.lo));
  }
  axis_titles(out, "Grid size (n, for n^3 points)", "Grid/s");

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& [name, pts] = series[i];
    const char* color = kPalette[i % kPalette.size()];
    std::string coords;
    for (const auto& [gx, gy] : pts) {
      if (!coords.empty()) {
        coords += ' ';
      }
      coords += fmt::format("{:.2f},{:.2f}", px_x(xa.frac(gx)), px_y(ya.frac(gy)));
    }
    out += fmt::format(
        "<polyline class=\"series\" points=\"{}\" fill=\"none\" stroke=\"{}\" "
        "stroke-width=\"2\"/>\n",
        coords, color);
    for (const auto& [gx, gy] : pts) {
      out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n",
                         px_x(xa.frac(gx)), px_y(ya.frac(gy)), color);
    }
    const double ly = kTop + 10 + 18 * static_cast<double>(i);
    out += fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
        "stroke-width=\"2\"/>\n"
        "<text class=\"legend\" x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n",
        kLeft + kPlotW + 12, ly, kLeft + kPlotW + 36, ly, color, kLeft + kPlotW + 42, ly + 4,
        xml_escape(name));
  }
  out += "</svg>\n";
  return out;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigurationError("cannot write " + path.string());
  }
  out << text;
}

}  // namespace

void emit_roofline_svg(const MachineSpec& spec, const std::vector<RooflinePoint>& points,
                       const std::filesystem::path& path) {
  write_text(path, render_roofline_svg(spec, points));
}

void emit_throughput_svg(const std::vector<BenchRecord>& records,
                         const std::filesystem::path& path) {
  write_text(path, render_throughput_svg(records));
}

}  // namespace wavebench
