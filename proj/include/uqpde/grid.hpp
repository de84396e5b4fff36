#ifndef UQPDE_GRID_HPP
#define UQPDE_GRID_HPP

#include "uqpde/types.hpp"

namespace uqpde {

/// 1D grid of strictly increasing node coordinates, n >= 2.
class Grid1D {
 public:
  explicit Grid1D(Vector nodes) : nodes_(std::move(nodes)) {
    require(nodes_.size() >= 2, "Grid1D: need at least 2 nodes");
    for (Index i = 1; i < nodes_.size(); ++i) {
      require(nodes_[i] > nodes_[i - 1], "Grid1D: nodes must be strictly increasing");
    }
  }

  static Grid1D uniform(double lo, double hi, Index n) {
    require(n >= 2 && hi > lo, "Grid1D::uniform: need n >= 2 and hi > lo");
    return Grid1D(Vector::LinSpaced(n, lo, hi));
  }

  const Vector& nodes() const { return nodes_; }
  Index size() const { return nodes_.size(); }
  double min() const { return nodes_[0]; }
  double max() const { return nodes_[nodes_.size() - 1]; }
  double operator[](Index i) const { return nodes_[i]; }

  /// Trapezoid quadrature weights over [min, max].
  Vector trapezoid_weights() const {
    Vector w = Vector::Zero(size());
    for (Index i = 0; i + 1 < size(); ++i) {
      const double h = nodes_[i + 1] - nodes_[i];
      w[i] += 0.5 * h;
      w[i + 1] += 0.5 * h;
    }
    return w;
  }

  /// Linear interpolation of nodal values onto query points inside [min, max].
  Vector interpolate(const Vector& values, const Vector& query) const {
    require_dim(size(), values.size(), "Grid1D::interpolate values");
    Vector out(query.size());
    for (Index q = 0; q < query.size(); ++q) {
      const double x = query[q];
      require(x >= min() - 1e-12 && x <= max() + 1e-12,
              "Grid1D::interpolate: query point " + std::to_string(x) +
                  " outside grid hull [" + std::to_string(min()) + ", " +
                  std::to_string(max()) + "]");
      // locate the containing interval
      Index lo = 0, hi = size() - 1;
      while (hi - lo > 1) {
        const Index mid = (lo + hi) / 2;
        if (nodes_[mid] <= x) lo = mid; else hi = mid;
      }
      const double h = nodes_[hi] - nodes_[lo];
      const double t = std::min(1.0, std::max(0.0, (x - nodes_[lo]) / h));
      out[q] = (1.0 - t) * values[lo] + t * values[hi];
    }
    return out;
  }

 private:
  Vector nodes_;
};

/// Tensor grid of two Grid1D axes (e.g. observation times x sensor locations).
class Grid2D {
 public:
  Grid2D(Grid1D axis1, Grid1D axis2)
      : axis1_(std::move(axis1)), axis2_(std::move(axis2)) {}

  const Grid1D& axis1() const { return axis1_; }
  const Grid1D& axis2() const { return axis2_; }
  Index size() const { return axis1_.size() * axis2_.size(); }

 private:
  Grid1D axis1_;
  Grid1D axis2_;
};

}  // namespace uqpde

#endif
