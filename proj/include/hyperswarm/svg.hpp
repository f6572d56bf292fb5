#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hyperswarm/envs.hpp"
#include "hyperswarm/geom.hpp"

namespace hyperswarm {

struct PlotPoint {
  Complex z;
  std::size_t group = 0;  // picks the colour
  std::string label;
};

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Unit disc with the given points; labels are drawn next to them.
std::string render_disc_svg(std::span<const PlotPoint> points, const std::string& title);

std::string render_line_chart_svg(std::span<const Series> series, const std::string& title,
                                  const std::string& x_label, const std::string& y_label);

/// Circles coloured arc by arc (green reward, red barrier) with the walk on top.
std::string render_labyrinth_svg(const LabyrinthConfig& cfg, std::span<const Point2> path,
                                 const std::string& title);

}  // namespace hyperswarm
