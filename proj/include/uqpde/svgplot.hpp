#ifndef UQPDE_SVGPLOT_HPP
#define UQPDE_SVGPLOT_HPP

#include "uqpde/trimesh.hpp"
#include "uqpde/types.hpp"

#include <string>
#include <vector>

namespace uqpde::svgplot {

struct Series {
  std::string label;
  Vector y;
  std::string color;
  bool points_only = false;
};

/// Line plot with optional shaded band (e.g. a credibility interval).
std::string line_plot(const std::string& title, const Vector& x,
                      const std::vector<Series>& series, const Vector* band_lo = nullptr,
                      const Vector* band_hi = nullptr, const std::string& band_label = "");

/// Per-coefficient plot: vertical CI segments, mean dots, optional truth dots.
std::string coefficient_ci(const std::string& title, const Vector& mean, const Vector& lower,
                           const Vector& upper, const Vector* truth = nullptr);

/// Field over a triangle mesh, flat-shaded per triangle with a colorbar.
std::string tri_heatmap(const std::string& title, const TriMesh& mesh, const Vector& nodal);

void write_file(const std::string& path, const std::string& svg);

}  // namespace uqpde::svgplot

#endif
