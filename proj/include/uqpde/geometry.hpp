#ifndef UQPDE_GEOMETRY_HPP
#define UQPDE_GEOMETRY_HPP

#include "uqpde/fem.hpp"
#include "uqpde/grid.hpp"
#include "uqpde/trimesh.hpp"
#include "uqpde/types.hpp"

#include <json.hpp>

#include <memory>
#include <variant>

namespace uqpde {

/// Parameterization layer: maps coefficient vectors (parameter space) to
/// discretized field values (function space), with the inverse map where one
/// exists. Geometries are immutable after construction and safe to share
/// across threads.
class Geometry {
 public:
  virtual ~Geometry() = default;

  virtual Index par_dim() const = 0;
  virtual Index fun_dim() const = 0;

  Vector par2fun(const Vector& x) const {
    require_dim(par_dim(), x.size(), "par2fun parameter");
    return map_par2fun(x);
  }

  Vector fun2par(const Vector& f) const {
    require_dim(fun_dim(), f.size(), "fun2par function values");
    return map_fun2par(f);
  }

  virtual bool invertible() const { return true; }

  /// Geometry of the function-value space (used by Samples::funvals).
  virtual std::shared_ptr<const Geometry> function_geometry() const = 0;

  virtual nlohmann::json describe() const = 0;

 protected:
  virtual Vector map_par2fun(const Vector& x) const = 0;
  virtual Vector map_fun2par(const Vector& f) const = 0;
};

using GeometryPtr = std::shared_ptr<const Geometry>;

/// Identity parameterization: coefficients are nodal values on a 1D grid, a
/// tensor grid, or a triangle mesh.
class NodalGeometry : public Geometry,
                      public std::enable_shared_from_this<NodalGeometry> {
 public:
  using Support = std::variant<Grid1D, Grid2D, std::shared_ptr<const TriMesh>>;

  explicit NodalGeometry(Grid1D grid) : support_(std::move(grid)) {}
  explicit NodalGeometry(Grid2D grid) : support_(std::move(grid)) {}
  explicit NodalGeometry(std::shared_ptr<const TriMesh> mesh) : support_(std::move(mesh)) {}

  Index par_dim() const override { return n_dof(); }
  Index fun_dim() const override { return n_dof(); }
  Index n_dof() const;

  bool is_mesh() const { return std::holds_alternative<std::shared_ptr<const TriMesh>>(support_); }
  bool is_grid1d() const { return std::holds_alternative<Grid1D>(support_); }
  const TriMesh& mesh() const;
  const Grid1D& grid() const;
  const Grid2D& grid2d() const;

  /// Spatial dimension of the support (1 for grids, 2 for meshes).
  int spatial_dim() const { return is_mesh() ? 2 : 1; }

  std::uint64_t support_hash() const;

  std::shared_ptr<const Geometry> function_geometry() const override {
    return shared_from_this();
  }
  nlohmann::json describe() const override;

 protected:
  Vector map_par2fun(const Vector& x) const override { return x; }
  Vector map_fun2par(const Vector& f) const override { return f; }

 private:
  Support support_;
};

/// Piecewise-constant expansion over n_steps equal-width intervals of the
/// grid span. Intervals are half-open with the last one closed; internal
/// breakpoints belong to the interval on their right.
class StepExpansionGeometry : public Geometry {
 public:
  StepExpansionGeometry(Grid1D grid, int n_steps);

  Index par_dim() const override { return n_steps_; }
  Index fun_dim() const override { return grid_.size(); }
  const Grid1D& grid() const { return grid_; }
  int interval_of_node(Index k) const { return interval_[k]; }

  std::shared_ptr<const Geometry> function_geometry() const override { return nodal_; }
  nlohmann::json describe() const override;

 protected:
  Vector map_par2fun(const Vector& x) const override;
  Vector map_fun2par(const Vector& f) const override;

 private:
  Grid1D grid_;
  int n_steps_;
  std::vector<int> interval_;  // per node
  std::shared_ptr<const NodalGeometry> nodal_;
};

/// Truncated sine expansion g = (1/a) sum_i x_i sqrt(lambda_i) e_i with
/// lambda_i = i^-gamma and e_i = sqrt(2) sin(i pi t), t the grid coordinate
/// rescaled to [0, 1]. The basis is orthonormal under trapezoid quadrature
/// on the rescaled grid.
class KLExpansionGeometry : public Geometry {
 public:
  KLExpansionGeometry(Grid1D grid, double decay_rate, double normalizer, int num_modes);

  Index par_dim() const override { return num_modes_; }
  Index fun_dim() const override { return grid_.size(); }
  const Grid1D& grid() const { return grid_; }
  double decay_rate() const { return decay_rate_; }
  double normalizer() const { return normalizer_; }

  /// Basis column e_i (1-based mode index), unit quadrature norm.
  Vector basis(int i) const;

  std::shared_ptr<const Geometry> function_geometry() const override { return nodal_; }
  nlohmann::json describe() const override;

 protected:
  Vector map_par2fun(const Vector& x) const override { return synthesis_ * x; }
  Vector map_fun2par(const Vector& f) const override { return projection_ * f; }

 private:
  Grid1D grid_;
  double decay_rate_, normalizer_;
  int num_modes_;
  Matrix synthesis_;   // fun = synthesis * x
  Matrix projection_;  // x = projection * fun
  std::shared_ptr<const NodalGeometry> nodal_;
};

/// Spectral parameterization of a Matern-class covariance operator on a
/// nodal space: g = sum_i x_i sqrt(lambda_i) e_i with M-orthonormal
/// eigenvectors e_i of the shifted Laplacian and sqrt(lambda_1) = 1.
class MaternKLGeometry : public Geometry {
 public:
  MaternKLGeometry(std::shared_ptr<const NodalGeometry> base, double length_scale,
                   double smoothness, Vector sqrt_lambda, Matrix basis, SpMatrix mass);

  Index par_dim() const override { return sqrt_lambda_.size(); }
  Index fun_dim() const override { return base_->n_dof(); }

  const NodalGeometry& base() const { return *base_; }
  double length_scale() const { return length_scale_; }
  double smoothness() const { return smoothness_; }
  const Vector& sqrt_lambda() const { return sqrt_lambda_; }
  const Matrix& basis() const { return basis_; }
  const SpMatrix& mass() const { return mass_; }

  std::shared_ptr<const Geometry> function_geometry() const override { return base_; }
  nlohmann::json describe() const override;

 protected:
  Vector map_par2fun(const Vector& x) const override;
  Vector map_fun2par(const Vector& f) const override;

 private:
  std::shared_ptr<const NodalGeometry> base_;
  double length_scale_, smoothness_;
  Vector sqrt_lambda_;
  Matrix basis_;       // n_dof x n_KL, columns M-orthonormal
  SpMatrix mass_;
};

/// Solves (K + 1/l^2 M) e = mu M e with natural boundary treatment, keeps the
/// n_kl smallest mu, sets sqrt(lambda_i) = (mu_i / mu_1)^(-(nu + d/2)/2) and
/// fixes eigenvector signs (first nonzero entry positive). When cache_dir is
/// nonempty the eigenpairs are stored in/loaded from a binary file keyed by
/// (support hash, l, nu, n_kl).
std::shared_ptr<const MaternKLGeometry> build_matern_kl(
    std::shared_ptr<const NodalGeometry> base, double length_scale, double smoothness,
    int num_terms, const std::string& cache_dir = "");

/// Elementwise 0.5 * (hi * (1 - sign(r)) + lo * (1 + sign(r))) with
/// sign(0) = 0, so values land in {lo, (lo+hi)/2, hi}.
Vector heaviside(const Vector& r, double lo, double hi);

/// Pointwise map applied after a base parameterization.
class MappedGeometry : public Geometry {
 public:
  enum class MapKind { Heaviside, Scale, Exp };

  static std::shared_ptr<const MappedGeometry> heaviside_map(GeometryPtr base, double lo, double hi);
  static std::shared_ptr<const MappedGeometry> scale_map(GeometryPtr base, double factor);
  static std::shared_ptr<const MappedGeometry> exp_map(GeometryPtr base);

  Index par_dim() const override { return base_->par_dim(); }
  Index fun_dim() const override { return base_->fun_dim(); }
  MapKind kind() const { return kind_; }
  const Geometry& base() const { return *base_; }

  bool invertible() const override { return kind_ != MapKind::Heaviside; }
  std::shared_ptr<const Geometry> function_geometry() const override {
    return base_->function_geometry();
  }
  nlohmann::json describe() const override;

 protected:
  Vector map_par2fun(const Vector& x) const override;
  Vector map_fun2par(const Vector& f) const override;

 private:
  MappedGeometry(GeometryPtr base, MapKind kind, double a, double b);
  GeometryPtr base_;
  MapKind kind_;
  double lo_ = 0.0, hi_ = 0.0;  // heaviside levels or scale factor in lo_
};

}  // namespace uqpde

#endif
