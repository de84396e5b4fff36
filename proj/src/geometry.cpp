#include "uqpde/geometry.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace uqpde {

Index NodalGeometry::n_dof() const {
  if (is_grid1d()) return grid().size();
  if (is_mesh()) return mesh().num_vertices();
  return grid2d().size();
}

const TriMesh& NodalGeometry::mesh() const {
  require(is_mesh(), "NodalGeometry: support is not a mesh");
  return *std::get<std::shared_ptr<const TriMesh>>(support_);
}

const Grid1D& NodalGeometry::grid() const {
  require(is_grid1d(), "NodalGeometry: support is not a 1D grid");
  return std::get<Grid1D>(support_);
}

const Grid2D& NodalGeometry::grid2d() const {
  require(std::holds_alternative<Grid2D>(support_), "NodalGeometry: support is not a 2D grid");
  return std::get<Grid2D>(support_);
}

std::uint64_t NodalGeometry::support_hash() const {
  if (is_grid1d()) return content_hash(grid().nodes());
  if (is_mesh()) return mesh_hash(mesh());
  return content_hash(grid2d().axis1().nodes()) ^ (content_hash(grid2d().axis2().nodes()) << 1);
}

nlohmann::json NodalGeometry::describe() const {
  nlohmann::json j{{"kind", "nodal"}, {"n_dof", n_dof()}};
  if (is_grid1d()) {
    j["support"] = "grid1d";
    j["span"] = {grid().min(), grid().max()};
  } else if (is_mesh()) {
    j["support"] = "trimesh";
    j["n_triangles"] = mesh().num_triangles();
  } else {
    j["support"] = "grid2d";
    j["shape"] = {grid2d().axis1().size(), grid2d().axis2().size()};
  }
  return j;
}

StepExpansionGeometry::StepExpansionGeometry(Grid1D grid, int n_steps)
    : grid_(std::move(grid)), n_steps_(n_steps),
      nodal_(std::make_shared<NodalGeometry>(grid_)) {
  require(n_steps_ >= 1, "StepExpansion: n_steps must be >= 1");
  const double width = (grid_.max() - grid_.min()) / n_steps_;
  interval_.resize(grid_.size());
  std::vector<int> count(n_steps_, 0);
  for (Index k = 0; k < grid_.size(); ++k) {
    int idx = static_cast<int>(std::floor((grid_[k] - grid_.min()) / width));
    idx = std::max(0, std::min(n_steps_ - 1, idx));
    interval_[k] = idx;
    count[idx]++;
  }
  for (int i = 0; i < n_steps_; ++i) {
    require(count[i] > 0, "StepExpansion: interval " + std::to_string(i) +
                              " contains no grid nodes");
  }
}

Vector StepExpansionGeometry::map_par2fun(const Vector& x) const {
  Vector f(grid_.size());
  for (Index k = 0; k < grid_.size(); ++k) f[k] = x[interval_[k]];
  return f;
}

Vector StepExpansionGeometry::map_fun2par(const Vector& f) const {
  Vector sums = Vector::Zero(n_steps_);
  Vector counts = Vector::Zero(n_steps_);
  for (Index k = 0; k < grid_.size(); ++k) {
    sums[interval_[k]] += f[k];
    counts[interval_[k]] += 1.0;
  }
  return sums.cwiseQuotient(counts);
}

nlohmann::json StepExpansionGeometry::describe() const {
  return {{"kind", "step_expansion"}, {"n_steps", n_steps_}, {"n_grid", grid_.size()}};
}

KLExpansionGeometry::KLExpansionGeometry(Grid1D grid, double decay_rate, double normalizer,
                                         int num_modes)
    : grid_(std::move(grid)), decay_rate_(decay_rate), normalizer_(normalizer),
      num_modes_(num_modes), nodal_(std::make_shared<NodalGeometry>(grid_)) {
  require(decay_rate_ > 0.0, "KLExpansion: decay_rate must be positive");
  require(normalizer_ > 0.0, "KLExpansion: normalizer must be positive");
  require(num_modes_ >= 1, "KLExpansion: num_modes must be >= 1");
  const Index n = grid_.size();
  Matrix basis_cols(n, num_modes_);
  for (int i = 1; i <= num_modes_; ++i) basis_cols.col(i - 1) = basis(i);
  Vector sqrt_lambda(num_modes_);
  for (int i = 1; i <= num_modes_; ++i) {
    sqrt_lambda[i - 1] = std::sqrt(std::pow(static_cast<double>(i), -decay_rate_));
  }
  synthesis_ = basis_cols * (sqrt_lambda / normalizer_).asDiagonal();
  // quadrature weights on the rescaled coordinate: trapezoid / span
  Vector w = grid_.trapezoid_weights() / (grid_.max() - grid_.min());
  projection_ = (normalizer_ * sqrt_lambda.cwiseInverse()).asDiagonal() *
                basis_cols.transpose() * w.asDiagonal();
}

Vector KLExpansionGeometry::basis(int i) const {
  Vector e(grid_.size());
  const double span = grid_.max() - grid_.min();
  for (Index k = 0; k < grid_.size(); ++k) {
    const double t = (grid_[k] - grid_.min()) / span;
    e[k] = std::numbers::sqrt2 * std::sin(i * std::numbers::pi * t);
  }
  return e;
}

nlohmann::json KLExpansionGeometry::describe() const {
  return {{"kind", "kl_expansion"},
          {"decay_rate", decay_rate_},
          {"normalizer", normalizer_},
          {"num_modes", num_modes_},
          {"n_grid", grid_.size()}};
}

MaternKLGeometry::MaternKLGeometry(std::shared_ptr<const NodalGeometry> base,
                                   double length_scale, double smoothness,
                                   Vector sqrt_lambda, Matrix basis, SpMatrix mass)
    : base_(std::move(base)), length_scale_(length_scale), smoothness_(smoothness),
      sqrt_lambda_(std::move(sqrt_lambda)), basis_(std::move(basis)), mass_(std::move(mass)) {
  require(sqrt_lambda_.size() <= base_->n_dof(),
          "MaternKL: num_terms exceeds nodal dimension");
  for (Index i = 0; i < sqrt_lambda_.size(); ++i) {
    require(sqrt_lambda_[i] > 0.0, "MaternKL: sqrt_lambda must be positive");
    if (i > 0) {
      require(sqrt_lambda_[i] <= sqrt_lambda_[i - 1] + 1e-12,
              "MaternKL: sqrt_lambda must be non-increasing");
    }
  }
}

Vector MaternKLGeometry::map_par2fun(const Vector& x) const {
  return basis_ * sqrt_lambda_.cwiseProduct(x);
}

Vector MaternKLGeometry::map_fun2par(const Vector& f) const {
  return (basis_.transpose() * (mass_ * f)).cwiseQuotient(sqrt_lambda_);
}

nlohmann::json MaternKLGeometry::describe() const {
  return {{"kind", "matern_kl"},
          {"length_scale", length_scale_},
          {"smoothness", smoothness_},
          {"num_terms", sqrt_lambda_.size()},
          {"n_dof", base_->n_dof()}};
}

namespace {

std::string matern_cache_path(const std::string& dir, std::uint64_t key) {
  std::ostringstream name;
  name << dir << "/matern_" << std::hex << key << ".bin";
  return name.str();
}

std::uint64_t matern_cache_key(const NodalGeometry& base, double l, double nu, int n_kl) {
  const double params[3] = {l, nu, static_cast<double>(n_kl)};
  return base.support_hash() ^ (content_hash(params, 3) * 0x9e3779b97f4a7c15ull);
}

bool load_matern_cache(const std::string& path, Index n_dof, int n_kl, Vector& sqrt_lambda,
                       Matrix& basis) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) return false;
  std::uint64_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  if (!in.good() || rows != static_cast<std::uint64_t>(n_dof) ||
      cols != static_cast<std::uint64_t>(n_kl)) {
    return false;
  }
  sqrt_lambda.resize(n_kl);
  basis.resize(n_dof, n_kl);
  in.read(reinterpret_cast<char*>(sqrt_lambda.data()), n_kl * sizeof(double));
  in.read(reinterpret_cast<char*>(basis.data()), n_dof * n_kl * sizeof(double));
  return in.good();
}

void store_matern_cache(const std::string& path, const Vector& sqrt_lambda, const Matrix& basis) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) return;  // cache is best effort
  const std::uint64_t rows = basis.rows(), cols = basis.cols();
  out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
  out.write(reinterpret_cast<const char*>(sqrt_lambda.data()),
            sqrt_lambda.size() * sizeof(double));
  out.write(reinterpret_cast<const char*>(basis.data()), basis.size() * sizeof(double));
}

}  // namespace

std::shared_ptr<const MaternKLGeometry> build_matern_kl(
    std::shared_ptr<const NodalGeometry> base, double length_scale, double smoothness,
    int num_terms, const std::string& cache_dir) {
  require(length_scale > 0.0, "build_matern_kl: length_scale must be positive");
  require(smoothness > 0.0, "build_matern_kl: smoothness must be positive");
  require(num_terms >= 1 && num_terms <= base->n_dof(),
          "build_matern_kl: need 1 <= num_terms <= n_dof");

  SpMatrix stiffness, mass;
  if (base->is_mesh()) {
    stiffness = P1StiffnessKernel(base->mesh()).unit_stiffness();
    mass = p1_mass_matrix(base->mesh());
  } else if (base->is_grid1d()) {
    stiffness = grid1d_stiffness(base->grid());
    mass = grid1d_mass(base->grid());
  } else {
    throw Error("build_matern_kl: tensor-grid support has no eigenbasis");
  }

  const std::string cache_path =
      cache_dir.empty()
          ? std::string()
          : matern_cache_path(cache_dir,
                              matern_cache_key(*base, length_scale, smoothness, num_terms));
  Vector sqrt_lambda;
  Matrix basis;
  if (!cache_path.empty() &&
      load_matern_cache(cache_path, base->n_dof(), num_terms, sqrt_lambda, basis)) {
    return std::make_shared<MaternKLGeometry>(base, length_scale, smoothness,
                                              std::move(sqrt_lambda), std::move(basis),
                                              std::move(mass));
  }

  Matrix mass_dense(mass);
  {
    Eigen::LLT<Matrix> llt(mass_dense);
    require(llt.info() == Eigen::Success, "build_matern_kl: mass matrix not SPD");
  }
  Matrix shifted = Matrix(stiffness) + mass_dense / (length_scale * length_scale);
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(shifted, mass_dense);
  require(solver.info() == Eigen::Success, "build_matern_kl: eigensolver failure");

  const Vector mu = solver.eigenvalues().head(num_terms);
  require(mu[0] > 0.0, "build_matern_kl: nonpositive leading eigenvalue");
  basis = solver.eigenvectors().leftCols(num_terms);
  const double exponent = -(smoothness + base->spatial_dim() / 2.0) / 2.0;
  sqrt_lambda.resize(num_terms);
  for (Index i = 0; i < num_terms; ++i) sqrt_lambda[i] = std::pow(mu[i] / mu[0], exponent);

  // deterministic sign: first entry of noticeable magnitude made positive
  for (Index j = 0; j < basis.cols(); ++j) {
    const double tol = 1e-12 * basis.col(j).cwiseAbs().maxCoeff();
    for (Index i = 0; i < basis.rows(); ++i) {
      if (std::abs(basis(i, j)) > tol) {
        if (basis(i, j) < 0.0) basis.col(j) = -basis.col(j);
        break;
      }
    }
  }

  if (!cache_path.empty()) {
    std::filesystem::create_directories(cache_dir);
    store_matern_cache(cache_path, sqrt_lambda, basis);
  }
  return std::make_shared<MaternKLGeometry>(base, length_scale, smoothness,
                                            std::move(sqrt_lambda), std::move(basis),
                                            std::move(mass));
}

Vector heaviside(const Vector& r, double lo, double hi) {
  require(lo < hi, "heaviside: need lo < hi");
  Vector out(r.size());
  for (Index i = 0; i < r.size(); ++i) {
    const double s = (r[i] > 0.0) ? 1.0 : (r[i] < 0.0 ? -1.0 : 0.0);
    out[i] = 0.5 * (hi * (1.0 - s) + lo * (1.0 + s));
  }
  return out;
}

MappedGeometry::MappedGeometry(GeometryPtr base, MapKind kind, double a, double b)
    : base_(std::move(base)), kind_(kind), lo_(a), hi_(b) {}

std::shared_ptr<const MappedGeometry> MappedGeometry::heaviside_map(GeometryPtr base, double lo,
                                                                    double hi) {
  require(lo < hi, "MappedGeometry: heaviside needs lo < hi");
  return std::shared_ptr<const MappedGeometry>(
      new MappedGeometry(std::move(base), MapKind::Heaviside, lo, hi));
}

std::shared_ptr<const MappedGeometry> MappedGeometry::scale_map(GeometryPtr base, double factor) {
  require(factor != 0.0, "MappedGeometry: scale factor must be nonzero");
  return std::shared_ptr<const MappedGeometry>(
      new MappedGeometry(std::move(base), MapKind::Scale, factor, 0.0));
}

std::shared_ptr<const MappedGeometry> MappedGeometry::exp_map(GeometryPtr base) {
  return std::shared_ptr<const MappedGeometry>(
      new MappedGeometry(std::move(base), MapKind::Exp, 0.0, 0.0));
}

Vector MappedGeometry::map_par2fun(const Vector& x) const {
  const Vector g = base_->par2fun(x);
  switch (kind_) {
    case MapKind::Heaviside: return heaviside(g, lo_, hi_);
    case MapKind::Scale: return lo_ * g;
    case MapKind::Exp: return g.array().exp();
  }
  throw Error("MappedGeometry: unknown map kind");
}

Vector MappedGeometry::map_fun2par(const Vector& f) const {
  switch (kind_) {
    case MapKind::Heaviside:
      throw Error("fun2par: non-invertible map (heaviside)");
    case MapKind::Scale:
      return base_->fun2par(f / lo_);
    case MapKind::Exp: {
      for (Index i = 0; i < f.size(); ++i) {
        require(f[i] > 0.0, "fun2par: exp map requires positive function values");
      }
      return base_->fun2par(f.array().log());
    }
  }
  throw Error("MappedGeometry: unknown map kind");
}

nlohmann::json MappedGeometry::describe() const {
  nlohmann::json j{{"kind", "mapped"}, {"base", base_->describe()}};
  switch (kind_) {
    case MapKind::Heaviside:
      j["map"] = "heaviside";
      j["low"] = lo_;
      j["high"] = hi_;
      break;
    case MapKind::Scale:
      j["map"] = "scale";
      j["factor"] = lo_;
      break;
    case MapKind::Exp:
      j["map"] = "exp";
      break;
  }
  return j;
}

}  // namespace uqpde
