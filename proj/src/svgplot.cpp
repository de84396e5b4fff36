#include "uqpde/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace uqpde::svgplot {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 64, kRight = 24, kTop = 36, kBottom = 44;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

struct Range {
  double lo = 0.0, hi = 1.0;
  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void tighten_init() { lo = 1e300; hi = -1e300; }
  void finalize() {
    if (lo > hi) { lo = 0.0; hi = 1.0; }
    if (hi - lo < 1e-12) { lo -= 0.5; hi += 0.5; }
    const double pad = 0.04 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

struct Frame {
  Range xr, yr;
  double sx(double x) const { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * (kWidth - kLeft - kRight); }
  double sy(double y) const { return kHeight - kBottom - (y - yr.lo) / (yr.hi - yr.lo) * (kHeight - kTop - kBottom); }
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

void open_svg(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\""
      << " text-anchor=\"middle\">" << title << "</text>\n";
}

void draw_axes(std::ostringstream& out, const Frame& f) {
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight
      << "\" height=\"" << kHeight - kTop - kBottom
      << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double tx = f.xr.lo + i * (f.xr.hi - f.xr.lo) / 4.0;
    const double ty = f.yr.lo + i * (f.yr.hi - f.yr.lo) / 4.0;
    out << "<text x=\"" << f.sx(tx) << "\" y=\"" << kHeight - kBottom + 16
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" << fmt(tx)
        << "</text>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << f.sy(ty) + 3
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" << fmt(ty)
        << "</text>\n";
  }
}

void draw_legend(std::ostringstream& out, const std::vector<std::pair<std::string, std::string>>& entries) {
  double y = kTop + 14;
  for (const auto& [label, color] : entries) {
    if (label.empty()) continue;
    out << "<rect x=\"" << kLeft + 8 << "\" y=\"" << y - 8
        << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n"
        << "<text x=\"" << kLeft + 22 << "\" y=\"" << y
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << label << "</text>\n";
    y += 16;
  }
}

// compact viridis-like ramp
void colormap(double t, int& r, int& g, int& b) {
  t = std::clamp(t, 0.0, 1.0);
  static const double stops[5][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140},
                                     {94, 201, 98}, {253, 231, 37}};
  const double pos = t * 4.0;
  const int k = std::min(3, static_cast<int>(pos));
  const double u = pos - k;
  r = static_cast<int>(std::lround((1 - u) * stops[k][0] + u * stops[k + 1][0]));
  g = static_cast<int>(std::lround((1 - u) * stops[k][1] + u * stops[k + 1][1]));
  b = static_cast<int>(std::lround((1 - u) * stops[k][2] + u * stops[k + 1][2]));
}

}  // namespace

std::string line_plot(const std::string& title, const Vector& x,
                      const std::vector<Series>& series, const Vector* band_lo,
                      const Vector* band_hi, const std::string& band_label) {
  Frame f;
  f.xr.tighten_init();
  f.yr.tighten_init();
  for (Index i = 0; i < x.size(); ++i) f.xr.include(x[i]);
  for (const auto& s : series) {
    for (Index i = 0; i < s.y.size(); ++i) f.yr.include(s.y[i]);
  }
  if (band_lo && band_hi) {
    for (Index i = 0; i < band_lo->size(); ++i) {
      f.yr.include((*band_lo)[i]);
      f.yr.include((*band_hi)[i]);
    }
  }
  f.xr.finalize();
  f.yr.finalize();

  std::ostringstream out;
  open_svg(out, title);
  std::vector<std::pair<std::string, std::string>> legend;

  if (band_lo && band_hi) {
    out << "<polygon fill=\"#1f77b4\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
    for (Index i = 0; i < x.size(); ++i) out << f.sx(x[i]) << "," << f.sy((*band_lo)[i]) << " ";
    for (Index i = x.size(); i-- > 0;) out << f.sx(x[i]) << "," << f.sy((*band_hi)[i]) << " ";
    out << "\"/>\n";
    legend.emplace_back(band_label, "#aec7e8");
  }
  int color_index = 0;
  for (const auto& s : series) {
    const std::string color = s.color.empty() ? kPalette[color_index++ % 6] : s.color;
    if (s.points_only) {
      for (Index i = 0; i < x.size(); ++i) {
        out << "<circle cx=\"" << f.sx(x[i]) << "\" cy=\"" << f.sy(s.y[i])
            << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
      }
    } else {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (Index i = 0; i < x.size(); ++i) out << f.sx(x[i]) << "," << f.sy(s.y[i]) << " ";
      out << "\"/>\n";
    }
    legend.emplace_back(s.label, color);
  }
  draw_axes(out, f);
  draw_legend(out, legend);
  out << "</svg>\n";
  return out.str();
}

std::string coefficient_ci(const std::string& title, const Vector& mean, const Vector& lower,
                           const Vector& upper, const Vector* truth) {
  Frame f;
  f.xr.tighten_init();
  f.yr.tighten_init();
  f.xr.include(0.0);
  f.xr.include(static_cast<double>(mean.size()) + 1.0);
  for (Index i = 0; i < mean.size(); ++i) {
    f.yr.include(lower[i]);
    f.yr.include(upper[i]);
    if (truth) f.yr.include((*truth)[i]);
  }
  f.xr.finalize();
  f.yr.finalize();

  std::ostringstream out;
  open_svg(out, title);
  for (Index i = 0; i < mean.size(); ++i) {
    const double cx = f.sx(static_cast<double>(i + 1));
    out << "<line x1=\"" << cx << "\" y1=\"" << f.sy(lower[i]) << "\" x2=\"" << cx << "\" y2=\""
        << f.sy(upper[i]) << "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
    out << "<circle cx=\"" << cx << "\" cy=\"" << f.sy(mean[i])
        << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
    if (truth) {
      out << "<circle cx=\"" << cx << "\" cy=\"" << f.sy((*truth)[i])
          << "\" r=\"3\" fill=\"none\" stroke=\"#ff7f0e\" stroke-width=\"1.5\"/>\n";
    }
  }
  draw_axes(out, f);
  draw_legend(out, {{"mean and CI", "#1f77b4"},
                    {truth ? "truth" : "", "#ff7f0e"}});
  out << "</svg>\n";
  return out.str();
}

std::string tri_heatmap(const std::string& title, const TriMesh& mesh, const Vector& nodal) {
  require_dim(mesh.num_vertices(), nodal.size(), "tri_heatmap nodal values");
  Frame f;
  f.xr.tighten_init();
  f.yr.tighten_init();
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    f.xr.include(mesh.vertices(v, 0));
    f.yr.include(mesh.vertices(v, 1));
  }
  f.xr.finalize();
  f.yr.finalize();
  double vmin = nodal.minCoeff(), vmax = nodal.maxCoeff();
  if (vmax - vmin < 1e-300) vmax = vmin + 1.0;

  std::ostringstream out;
  open_svg(out, title);
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const double value = (nodal[mesh.triangles(t, 0)] + nodal[mesh.triangles(t, 1)] +
                          nodal[mesh.triangles(t, 2)]) / 3.0;
    int r, g, b;
    colormap((value - vmin) / (vmax - vmin), r, g, b);
    out << "<polygon points=\"";
    for (int e = 0; e < 3; ++e) {
      out << f.sx(mesh.vertices(mesh.triangles(t, e), 0)) << ","
          << f.sy(mesh.vertices(mesh.triangles(t, e), 1)) << " ";
    }
    out << "\" fill=\"rgb(" << r << "," << g << "," << b << ")\" stroke=\"none\"/>\n";
  }
  // colorbar
  const double bar_x = kWidth - kRight - 14, bar_top = kTop + 10, bar_h = kHeight - kTop - kBottom - 20;
  for (int i = 0; i < 64; ++i) {
    int r, g, b;
    colormap(1.0 - static_cast<double>(i) / 63.0, r, g, b);
    out << "<rect x=\"" << bar_x << "\" y=\"" << bar_top + i * bar_h / 64.0
        << "\" width=\"10\" height=\"" << bar_h / 64.0 + 0.5 << "\" fill=\"rgb(" << r << "," << g
        << "," << b << ")\"/>\n";
  }
  out << "<text x=\"" << bar_x - 4 << "\" y=\"" << bar_top + 4
      << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" << fmt(vmax)
      << "</text>\n";
  out << "<text x=\"" << bar_x - 4 << "\" y=\"" << bar_top + bar_h
      << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" << fmt(vmin)
      << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

void write_file(const std::string& path, const std::string& svg) {
  std::ofstream out(path);
  require(out.good(), "svgplot: cannot open " + path);
  out << svg;
  require(out.good(), "svgplot: write failed for " + path);
}

}  // namespace uqpde::svgplot
