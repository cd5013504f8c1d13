#include "fallrec/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fallrec {

namespace {

struct Mapper {
  double t0, t1, x0, x1;
  static constexpr double kW = 900.0, kH = 420.0;
  static constexpr double kML = 60.0, kMR = 20.0, kMT = 30.0, kMB = 40.0;

  double px(double t) const {
    return kML + (t - t0) / std::max(t1 - t0, 1e-9) * (kW - kML - kMR);
  }
  double py(double x) const {
    return kH - kMB - (x - x0) / std::max(x1 - x0, 1e-9) * (kH - kMT - kMB);
  }
};

void polyline(std::ostream& os, const std::vector<Vec2>& pts,
              const std::string& color, double width) {
  if (pts.size() < 2) return;
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
     << width << "\" points=\"";
  for (const auto& p : pts) os << p(0) << "," << p(1) << " ";
  os << "\"/>\n";
}

}  // namespace

void write_trace_svg(const std::string& path, const EpisodeTrace& trace) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open SVG for writing: " + path);

  double t0 = 0.0, t1 = 1.0, x0 = -0.5, x1 = 0.5;
  bool first = true;
  for (const auto& tick : trace.ticks) {
    auto expand = [&](double x) {
      if (!std::isfinite(x)) return;
      if (first) {
        x0 = x1 = x;
        first = false;
      }
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
    };
    expand(tick.balance.p_c_x);
    if (tick.balance.xi_defined) expand(tick.balance.xi);
    if (tick.support_valid) {
      expand(tick.support_min);
      expand(tick.support_max);
    }
    t1 = std::max(t1, tick.time);
  }
  const double pad = 0.05 * std::max(x1 - x0, 0.1);
  x0 -= pad;
  x1 += pad;

  Mapper m{t0, t1, x0, x1};
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
      << "width=\"" << Mapper::kW << "\" height=\"" << Mapper::kH
      << "\" viewBox=\"0 0 " << Mapper::kW << " " << Mapper::kH << "\">\n"
      << "<rect width=\"" << Mapper::kW << "\" height=\"" << Mapper::kH
      << "\" fill=\"white\"/>\n";

  // Support interval as a shaded band per tick (polygon strips between
  // consecutive valid ticks).
  for (size_t i = 0; i + 1 < trace.ticks.size(); ++i) {
    const auto& a = trace.ticks[i];
    const auto& b = trace.ticks[i + 1];
    if (!a.support_valid || !b.support_valid) continue;
    out << "<polygon fill=\"#cfe8cf\" stroke=\"none\" points=\""
        << m.px(a.time) << "," << m.py(a.support_min) << " "
        << m.px(b.time) << "," << m.py(b.support_min) << " "
        << m.px(b.time) << "," << m.py(b.support_max) << " "
        << m.px(a.time) << "," << m.py(a.support_max) << "\"/>\n";
  }

  std::vector<Vec2> com, cp;
  for (const auto& tick : trace.ticks) {
    com.push_back({m.px(tick.time), m.py(tick.balance.p_c_x)});
    if (tick.balance.xi_defined)
      cp.push_back({m.px(tick.time), m.py(tick.balance.xi)});
    else {
      polyline(out, cp, "#c0392b", 1.5);
      cp.clear();
    }
  }
  polyline(out, cp, "#c0392b", 1.5);
  polyline(out, com, "#2c3e50", 1.5);

  // Axes.
  out << "<line x1=\"" << Mapper::kML << "\" y1=\"" << m.py(x0) << "\" x2=\""
      << Mapper::kW - Mapper::kMR << "\" y2=\"" << m.py(x0)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n"
      << "<line x1=\"" << Mapper::kML << "\" y1=\"" << m.py(x0) << "\" x2=\""
      << Mapper::kML << "\" y2=\"" << m.py(x1)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n"
      << "<text x=\"" << Mapper::kW / 2 << "\" y=\"" << Mapper::kH - 8
      << "\" font-family=\"sans-serif\" font-size=\"13\">time [s]</text>\n"
      << "<text x=\"8\" y=\"" << Mapper::kMT
      << "\" font-family=\"sans-serif\" font-size=\"13\">ground x [m]"
      << "</text>\n"
      << "<text x=\"" << Mapper::kML + 10 << "\" y=\"" << Mapper::kMT + 4
      << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#2c3e50\">"
      << "CoM projection</text>\n"
      << "<text x=\"" << Mapper::kML + 130 << "\" y=\"" << Mapper::kMT + 4
      << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#c0392b\">"
      << "capture point</text>\n"
      << "<text x=\"" << Mapper::kML + 250 << "\" y=\"" << Mapper::kMT + 4
      << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#5a8f5a\">"
      << "support interval</text>\n"
      << "</svg>\n";
}

}  // namespace fallrec
