#include "escalife/svg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "escalife/time.hpp"

namespace escalife::svg {

namespace {

constexpr double kMarginLeft = 64.0;
constexpr double kMarginRight = 150.0;
constexpr double kMarginTop = 28.0;
constexpr double kMarginBottom = 44.0;

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return lo > hi; }
  void pad() {
    if (empty()) {
      lo = 0.0;
      hi = 1.0;
    } else if (hi - lo < 1e-12) {
      const double d = std::max(std::abs(lo) * 0.1, 1.0);
      lo -= d;
      hi += d;
    }
  }
};

// Ticks at 1, 2 or 5 times a power of ten.
std::vector<double> ticks(double lo, double hi, int target = 5) {
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (raw <= step) break;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    out.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
  }
  return out;
}

std::string date_label(double days) {
  return format_date(Date{std::chrono::days{static_cast<long>(std::llround(days))}});
}

}  // namespace

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
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

std::string number(double v) {
  if (!std::isfinite(v)) return "nan";
  std::string s = fmt::format("{:.4g}", v);
  if (s == "-0") s = "0";
  return s;
}

std::string render(const Chart& c) {
  Range xr;
  Range yr;
  for (const auto& s : c.series) {
    for (const auto& [x, y] : s.points) {
      xr.add(x);
      yr.add(y);
    }
  }
  for (const auto& h : c.hlines) yr.add(h.y);
  for (const auto& a : c.annotations) {
    xr.add(a.x);
    yr.add(a.y);
  }
  if (!yr.empty() && yr.lo > 0.0) yr.lo = 0.0;
  xr.pad();
  yr.pad();
  yr.hi += (yr.hi - yr.lo) * 0.05;

  const double w = c.width;
  const double h = c.height;
  const double pw = w - kMarginLeft - kMarginRight;
  const double ph = h - kMarginTop - kMarginBottom;
  auto px = [&](double x) { return kMarginLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kMarginTop + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * ph; };
  auto f = [](double v) { return fmt::format("{:.2f}", v); };

  std::string out = fmt::format(
      R"(<svg xmlns="http://www.w3.org/2000/svg" class="chart" width="{}" height="{}" viewBox="0 0 {} {}">)",
      c.width, c.height, c.width, c.height);
  out += '\n';
  out += fmt::format(R"(<text x="{}" y="16" class="title">{}</text>)", f(kMarginLeft), escape(c.title));
  out += '\n';
  out += fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#999"/>)", f(kMarginLeft),
                     f(kMarginTop), f(pw), f(ph));
  out += '\n';

  for (double t : ticks(yr.lo, yr.hi)) {
    out += fmt::format(R"(<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#eee"/><text x="{}" y="{}" class="ytick">{}</text>)",
                       f(kMarginLeft), f(py(t)), f(kMarginLeft + pw), f(py(t)), f(kMarginLeft - 4), f(py(t) + 4),
                       number(t));
    out += '\n';
  }
  for (double t : ticks(xr.lo, xr.hi, c.x_is_date ? 4 : 6)) {
    out += fmt::format(R"(<text x="{}" y="{}" class="xtick">{}</text>)", f(px(t)), f(kMarginTop + ph + 16),
                       c.x_is_date ? date_label(t) : number(t));
    out += '\n';
  }
  out += fmt::format(R"(<text x="{}" y="{}" class="xlabel">{}</text>)", f(kMarginLeft + pw / 2), f(h - 6),
                     escape(c.x_label));
  out += fmt::format(R"svg(<text x="12" y="{}" class="ylabel" transform="rotate(-90 12 {})">{}</text>)svg",
                     f(kMarginTop + ph / 2), f(kMarginTop + ph / 2), escape(c.y_label));
  out += '\n';

  for (const auto& hl : c.hlines) {
    out += fmt::format(
        R"(<line class="threshold" data-y="{}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-dasharray="6 3"/>)"
        R"(<text x="{}" y="{}" class="hlabel" fill="{}">{}</text>)",
        number(hl.y), f(kMarginLeft), f(py(hl.y)), f(kMarginLeft + pw), f(py(hl.y)), hl.color, f(kMarginLeft + pw + 4),
        f(py(hl.y) + 4), hl.color, escape(hl.label));
    out += '\n';
  }

  double legend_y = kMarginTop + 10;
  for (const auto& s : c.series) {
    if (s.line && s.points.size() > 1) {
      std::string pts;
      for (const auto& [x, y] : s.points) {
        if (!std::isfinite(y)) continue;
        if (!pts.empty()) pts += ' ';
        pts += f(px(x)) + "," + f(py(y));
      }
      out += fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.5"{} points="{}"/>)", s.color,
                         s.dashed ? R"( stroke-dasharray="4 3")" : "", pts);
      out += '\n';
    }
    if (s.markers || s.points.size() == 1) {
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        const auto [x, y] = s.points[i];
        if (!std::isfinite(y)) continue;
        const std::string cls = i < s.point_class.size() ? s.point_class[i] : std::string("pt");
        out += fmt::format(R"(<circle class="{}" cx="{}" cy="{}" r="2.5" fill="{}" data-y="{}"/>)", cls, f(px(x)),
                           f(py(y)), s.color, number(y));
        out += '\n';
      }
    }
    out += fmt::format(R"(<rect x="{}" y="{}" width="10" height="3" fill="{}"/><text x="{}" y="{}" class="legend">{}</text>)",
                       f(kMarginLeft + pw + 4), f(legend_y + 20), s.color, f(kMarginLeft + pw + 18), f(legend_y + 24),
                       escape(s.label));
    out += '\n';
    legend_y += 14;
  }

  for (const auto& a : c.annotations) {
    out += fmt::format(R"(<text class="annotation" x="{}" y="{}">{}</text>)", f(px(a.x) + 4), f(py(a.y) - 6),
                       escape(a.text));
    out += '\n';
  }
  out += "</svg>\n";
  return out;
}

}  // namespace escalife::svg
