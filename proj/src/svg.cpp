#include "hyperswarm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace hyperswarm {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

const char* colour(std::size_t group) { return kPalette[group % std::size(kPalette)]; }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Fixed formatting keeps the files byte-stable across runs.
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void header(std::ostringstream& out, int w, int h, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << ' ' << h << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(title) << "</text>\n";
}

}  // namespace

std::string render_disc_svg(std::span<const PlotPoint> points, const std::string& title) {
  constexpr int size = 480;
  constexpr double cx = size / 2.0, cy = size / 2.0 + 12.0, R = 200.0;
  std::ostringstream out;
  header(out, size, size + 24, title);
  out << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(R)
      << "\" fill=\"#f4f4f8\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  out << "<line x1=\"" << num(cx - R) << "\" y1=\"" << num(cy) << "\" x2=\"" << num(cx + R)
      << "\" y2=\"" << num(cy) << "\" stroke=\"#bbb\" stroke-dasharray=\"4 4\"/>\n";
  out << "<line x1=\"" << num(cx) << "\" y1=\"" << num(cy - R) << "\" x2=\"" << num(cx)
      << "\" y2=\"" << num(cy + R) << "\" stroke=\"#bbb\" stroke-dasharray=\"4 4\"/>\n";
  for (const auto& p : points) {
    const double x = cx + R * p.z.real(), y = cy - R * p.z.imag();
    out << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"4\" fill=\""
        << colour(p.group) << "\"/>\n";
    if (!p.label.empty()) {
      out << "<text x=\"" << num(x + 6) << "\" y=\"" << num(y - 6) << "\" font-size=\"10\">"
          << escape(p.label) << "</text>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_line_chart_svg(std::span<const Series> series, const std::string& title,
                                  const std::string& x_label, const std::string& y_label) {
  constexpr int w = 640, h = 400;
  constexpr double left = 60, right = 20, top = 40, bottom = 50;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!(xmax > xmin)) {
    xmin = std::isfinite(xmin) ? xmin - 1.0 : 0.0;
    xmax = xmin + 2.0;
  }
  if (!(ymax > ymin)) {
    ymin = std::isfinite(ymin) ? ymin - 1.0 : 0.0;
    ymax = ymin + 2.0;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (w - left - right); };
  auto sy = [&](double y) { return h - bottom - (y - ymin) / (ymax - ymin) * (h - top - bottom); };

  std::ostringstream out;
  header(out, w, h, title);
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w - left - right
      << "\" height=\"" << h - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double yv = ymin + (ymax - ymin) * i / 4.0, xv = xmin + (xmax - xmin) * i / 4.0;
    out << "<text x=\"" << left - 6 << "\" y=\"" << num(sy(yv) + 4)
        << "\" text-anchor=\"end\" font-size=\"10\">" << num(yv) << "</text>\n";
    out << "<text x=\"" << num(sx(xv)) << "\" y=\"" << h - bottom + 16
        << "\" text-anchor=\"middle\" font-size=\"10\">" << num(xv) << "</text>\n";
  }
  out << "<text x=\"" << w / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\" font-size=\"12\">"
      << escape(x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << h / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 " << h / 2 << ")\">" << escape(y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    out << "<polyline fill=\"none\" stroke=\"" << colour(k) << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (std::isfinite(s.y[i])) out << num(sx(s.x[i])) << ',' << num(sy(s.y[i])) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << left + 10 << "\" y=\"" << top + 16 + 14 * k << "\" font-size=\"11\" fill=\""
        << colour(k) << "\">" << escape(s.name) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_labyrinth_svg(const LabyrinthConfig& cfg, std::span<const Point2> path,
                                 const std::string& title) {
  constexpr int size = 520;
  const double cx = size / 2.0, cy = size / 2.0 + 12.0;
  double extent = cfg.radii.empty() ? 1.0 : cfg.radii.back();
  for (const auto& p : path) extent = std::max(extent, std::hypot(p.x, p.y));
  const double scale = 230.0 / extent;

  std::ostringstream out;
  header(out, size, size + 24, title);
  for (std::size_t c = 0; c < cfg.radii.size(); ++c) {
    const double r = cfg.radii[c] * scale;
    for (const auto& arc : cfg.arcs[c]) {
      double sweep = wrap_angle(arc.end - arc.start);
      if (sweep == 0.0) sweep = kTwoPi;
      const bool full = sweep > kTwoPi - 1e-9;
      const char* stroke = cfg.is_barrier(arc) ? "#d62728" : (arc.reward > 0 ? "#2ca02c" : "#999");
      const double width = cfg.is_barrier(arc) ? 4.0 : 1.0 + std::min(4.0, std::abs(arc.reward) / 10.0);
      if (full) {
        out << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(r)
            << "\" fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << "\"/>\n";
      } else {
        const double x0 = cx + r * std::cos(arc.start), y0 = cy - r * std::sin(arc.start);
        const double x1 = cx + r * std::cos(arc.start + sweep), y1 = cy - r * std::sin(arc.start + sweep);
        out << "<path d=\"M " << num(x0) << ' ' << num(y0) << " A " << num(r) << ' ' << num(r)
            << " 0 " << (sweep > kTwoPi / 2 ? 1 : 0) << " 0 " << num(x1) << ' ' << num(y1)
            << "\" fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << "\"/>\n";
      }
      const double mid = arc.start + sweep / 2.0;
      out << "<text x=\"" << num(cx + (r + 9) * std::cos(mid)) << "\" y=\""
          << num(cy - (r + 9) * std::sin(mid) + 3) << "\" font-size=\"9\" text-anchor=\"middle\">"
          << short_num(arc.reward) << "</text>\n";
    }
  }
  if (!path.empty()) {
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (const auto& p : path) out << num(cx + scale * p.x) << ',' << num(cy - scale * p.y) << ' ';
    out << "\"/>\n";
    for (const auto& p : path) {
      out << "<circle cx=\"" << num(cx + scale * p.x) << "\" cy=\"" << num(cy - scale * p.y)
          << "\" r=\"2.5\" fill=\"#1f77b4\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace hyperswarm
