#include "kdvw/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace kdvw {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '"') out += "&quot;";
    else out += c;
  }
  return out;
}

std::string fmt(double v, const char* f = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  return (r < 1.5 ? 1.0 : r < 3.0 ? 2.0 : r < 7.0 ? 5.0 : 10.0) * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-300 + 1e-12 * std::abs(lo)) {
      const double d = lo == 0.0 ? 1.0 : 0.1 * std::abs(lo);
      lo -= d;
      hi += d;
    }
    const double pad = 0.04 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  const double W = spec.width, H = spec.height;
  const double ml = 80, mr = 20, mt = 40, mb = 55;
  const double pw = W - ml - mr, ph = H - mt - mb;

  Range rx, ry;
  for (const auto& s : spec.series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      rx.add(s.x[i]);
      ry.add(s.y[i]);
    }
  }
  for (const auto& r : spec.rules) rx.add(r.x);
  rx.settle();
  ry.settle();
  auto X = [&](double v) { return ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto Y = [&](double v) { return mt + (ry.hi - v) / (ry.hi - ry.lo) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << fmt(W / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(spec.title)
    << "</text>\n";

  // axes and ticks
  o << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  const double sx = nice_step(rx.hi - rx.lo, 8), sy = nice_step(ry.hi - ry.lo, 6);
  for (double v = std::ceil(rx.lo / sx) * sx; v <= rx.hi; v += sx) {
    const double px = X(v);
    o << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(mt + ph) << "\" x2=\"" << fmt(px) << "\" y2=\""
      << fmt(mt + ph + 5) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(mt + ph + 18) << "\" text-anchor=\"middle\">"
      << fmt(std::abs(v) < 1e-12 * sx ? 0.0 : v, "%g") << "</text>\n";
  }
  for (double v = std::ceil(ry.lo / sy) * sy; v <= ry.hi; v += sy) {
    const double py = Y(v);
    o << "<line x1=\"" << fmt(ml - 5) << "\" y1=\"" << fmt(py) << "\" x2=\"" << fmt(ml) << "\" y2=\"" << fmt(py)
      << "\" stroke=\"black\"/>";
    o << "<text x=\"" << fmt(ml - 8) << "\" y=\"" << fmt(py + 4) << "\" text-anchor=\"end\">"
      << fmt(std::abs(v) < 1e-12 * sy ? 0.0 : v, "%g") << "</text>\n";
  }
  o << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(H - 12) << "\" text-anchor=\"middle\">"
    << escape(spec.xlabel) << "</text>\n";
  o << "<text x=\"18\" y=\"" << fmt(mt + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << fmt(mt + ph / 2) << ")\">" << escape(spec.ylabel) << "</text>\n";

  o << "<clipPath id=\"plot\"><rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(pw)
    << "\" height=\"" << fmt(ph) << "\"/></clipPath>\n<g clip-path=\"url(#plot)\">\n";
  for (const auto& r : spec.rules) {
    o << "<line x1=\"" << fmt(X(r.x)) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(X(r.x)) << "\" y2=\""
      << fmt(mt + ph) << "\" stroke=\"gray\" stroke-dasharray=\"5,4\"/>";
    o << "<text x=\"" << fmt(X(r.x) + 3) << "\" y=\"" << fmt(mt + 14) << "\" fill=\"gray\">" << escape(r.label)
      << "</text>\n";
  }
  for (const auto& s : spec.series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.markers) {
      for (std::size_t i = 0; i < n; ++i)
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
          o << "<circle cx=\"" << fmt(X(s.x[i])) << "\" cy=\"" << fmt(Y(s.y[i])) << "\" r=\"3.5\" fill=\""
            << s.color << "\"/>\n";
      continue;
    }
    std::string pts;
    auto flush = [&] {
      if (!pts.empty())
        o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"" << fmt(s.width)
          << "\" points=\"" << pts << "\"/>\n";
      pts.clear();
    };
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      pts += fmt(X(s.x[i])) + "," + fmt(Y(s.y[i])) + " ";
    }
    flush();
  }
  o << "</g>\n";

  // legend and notes
  double ly = mt + 16;
  for (const auto& s : spec.series) {
    if (s.label.empty()) continue;
    const double lx = ml + pw - 150;
    o << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << fmt(lx + 20) << "\" y2=\""
      << fmt(ly - 4) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>";
    o << "<text x=\"" << fmt(lx + 26) << "\" y=\"" << fmt(ly) << "\">" << escape(s.label) << "</text>\n";
    ly += 16;
  }
  double ny = mt + 16;
  for (const auto& n : spec.notes) {
    o << "<text x=\"" << fmt(ml + 8) << "\" y=\"" << fmt(ny) << "\">" << escape(n) << "</text>\n";
    ny += 16;
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace kdvw
