#include "ecosched/gantt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>

#include <fmt/format.h>

namespace ecosched {

namespace {

constexpr std::array<std::string_view, 10> kPalette{
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
};

constexpr double kWidth = 960.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kLane = 36.0;
constexpr double kLaneGap = 6.0;
constexpr double kAxis = 40.0;

std::string escape(std::string_view s) {
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

// 1, 2 or 5 times a power of ten, giving at most ~10 ticks.
double tick_step(double span) {
  if (span <= 0.0) return 1.0;
  const double raw = span / 10.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) return m * mag;
  return 10.0 * mag;
}

}  // namespace

std::string render_gantt_svg(const ScheduleTrace& trace, const std::string& title) {
  const int lanes = std::max(trace.total_gpus, 1);
  const double plot_w = kWidth - kLeft - kRight;
  const double height = kTop + lanes * (kLane + kLaneGap) + kAxis;
  const double span = trace.makespan > 0.0 ? trace.makespan : 1.0;
  auto x_of = [&](double t) { return kLeft + plot_w * t / span; };
  auto y_of = [&](int lane) { return kTop + lane * (kLane + kLaneGap); };

  std::string svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "font-family=\"sans-serif\" font-size=\"11\">\n",
      kWidth, height);
  svg += fmt::format("<rect width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n", kWidth, height);
  svg += fmt::format("<text x=\"{:.1f}\" y=\"20\" font-size=\"14\">{} (makespan {:.1f} s)</text>\n", kLeft,
                     escape(title), trace.makespan);

  for (int lane = 0; lane < lanes; ++lane) {
    svg += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"#f4f4f4\"/>\n", kLeft,
                       y_of(lane), plot_w, kLane);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">GPU {}</text>\n", kLeft - 8.0,
                       y_of(lane) + kLane / 2.0 + 4.0, lane);
  }

  const double axis_y = kTop + lanes * (kLane + kLaneGap);
  svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n", kLeft,
                     axis_y, kLeft + plot_w, axis_y);
  const double step = tick_step(span);
  for (int i = 0; i * step <= span * (1.0 + 1e-12); ++i) {
    const double t = i * step;
    const double x = x_of(t);
    svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n", x,
                       axis_y, x, axis_y + 5.0);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:g}</text>\n", x, axis_y + 18.0, t);
  }
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">time (s)</text>\n", kLeft + plot_w / 2.0,
                     axis_y + 34.0);

  // per_app is keyed by app_id, so palette slots follow app_id order
  std::size_t color = 0;
  for (const auto& [id, rec] : trace.per_app) {
    const auto fill = kPalette[color++ % kPalette.size()];
    const double x0 = x_of(rec.start);
    const double w = std::max(x_of(rec.end) - x0, 0.5);
    for (int gpu : rec.gpus) {
      if (gpu < 0 || gpu >= lanes) continue;
      svg += fmt::format(
          "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\" stroke=\"black\" "
          "stroke-width=\"0.5\"><title>{} on GPU {}: {:.1f}-{:.1f} s</title></rect>\n",
          x0, y_of(gpu), w, kLane, fill, escape(id), gpu, rec.start, rec.end);
      svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" fill=\"white\">{}</text>\n", x0 + 4.0,
                         y_of(gpu) + kLane / 2.0 + 4.0, escape(id));
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace ecosched
