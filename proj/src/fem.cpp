#include "uqpde/fem.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/IterativeLinearSolvers>

#include <cmath>
#include <map>

namespace uqpde {

namespace {

// Gradients of the three P1 basis functions on one triangle (constant), plus
// the signed area. grad phi_i = (b_i, c_i) / (2A).
struct ElementGeometry {
  double area;
  std::array<double, 3> bx, by;
};

ElementGeometry element_geometry(const TriMesh& mesh, Index t) {
  const auto p0 = mesh.vertices.row(mesh.triangles(t, 0));
  const auto p1 = mesh.vertices.row(mesh.triangles(t, 1));
  const auto p2 = mesh.vertices.row(mesh.triangles(t, 2));
  ElementGeometry g{};
  g.area = 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
  require(g.area > 1e-14, "assemble_p1: degenerate triangle " + std::to_string(t));
  const double inv2a = 1.0 / (2.0 * g.area);
  g.bx = {(p1[1] - p2[1]) * inv2a, (p2[1] - p0[1]) * inv2a, (p0[1] - p1[1]) * inv2a};
  g.by = {(p2[0] - p1[0]) * inv2a, (p0[0] - p2[0]) * inv2a, (p1[0] - p0[0]) * inv2a};
  return g;
}

int value_slot(const SpMatrix& m, int row, int col) {
  for (int k = m.outerIndexPtr()[col]; k < m.outerIndexPtr()[col + 1]; ++k) {
    if (m.innerIndexPtr()[k] == row) return k;
  }
  throw Error("P1StiffnessKernel: missing pattern entry");
}

void check_sigma(const Vector& sigma, Index n_nodes) {
  require_dim(n_nodes, sigma.size(), "conductivity vector");
  for (Index i = 0; i < sigma.size(); ++i) {
    require(sigma[i] > 0.0, "conductivity must be positive, got " +
                                std::to_string(sigma[i]) + " at node " + std::to_string(i));
  }
}

}  // namespace

P1StiffnessKernel::P1StiffnessKernel(const TriMesh& mesh)
    : n_nodes_(mesh.num_vertices()), triangles_(mesh.triangles) {
  const Index m = mesh.num_triangles();
  element_.resize(m);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(9 * m);
  for (Index t = 0; t < m; ++t) {
    const ElementGeometry g = element_geometry(mesh, t);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        element_[t][3 * i + j] = g.area * (g.bx[i] * g.bx[j] + g.by[i] * g.by[j]);
        triplets.emplace_back(triangles_(t, i), triangles_(t, j), 0.0);
      }
    }
  }
  pattern_.resize(n_nodes_, n_nodes_);
  pattern_.setFromTriplets(triplets.begin(), triplets.end());
  pattern_.makeCompressed();

  slots_.resize(m);
  for (Index t = 0; t < m; ++t) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        slots_[t][3 * i + j] = value_slot(pattern_, triangles_(t, i), triangles_(t, j));
      }
    }
  }
  unit_stiffness_ = pattern_;
  fill(Vector::Ones(n_nodes_), unit_stiffness_);
}

void P1StiffnessKernel::fill(const Vector& sigma, SpMatrix& out) const {
  check_sigma(sigma, n_nodes_);
  require(out.nonZeros() == pattern_.nonZeros() && out.isCompressed(),
          "P1StiffnessKernel::fill: matrix does not share the assembly pattern");
  double* values = out.valuePtr();
  std::fill(values, values + out.nonZeros(), 0.0);
  for (std::size_t t = 0; t < element_.size(); ++t) {
    const Index ti = static_cast<Index>(t);
    const double sigma_t = (sigma[triangles_(ti, 0)] + sigma[triangles_(ti, 1)] +
                            sigma[triangles_(ti, 2)]) / 3.0;
    for (int e = 0; e < 9; ++e) values[slots_[t][e]] += sigma_t * element_[t][e];
  }
}

SpMatrix p1_mass_matrix(const TriMesh& mesh) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(9 * mesh.num_triangles());
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.triangle_area(t);
    require(area > 1e-14, "p1_mass_matrix: degenerate triangle " + std::to_string(t));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        triplets.emplace_back(mesh.triangles(t, i), mesh.triangles(t, j),
                              area / 12.0 * (i == j ? 2.0 : 1.0));
      }
    }
  }
  SpMatrix m(mesh.num_vertices(), mesh.num_vertices());
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

P1System assemble_p1(const TriMesh& mesh, const Vector& sigma, const LoadDensity& load) {
  check_sigma(sigma, mesh.num_vertices());
  require_dim(mesh.num_vertices(), load.values.size(), "load density");
  P1StiffnessKernel kernel(mesh);
  P1System system;
  system.stiffness = kernel.pattern();
  kernel.fill(sigma, system.stiffness);
  system.load = Vector::Zero(mesh.num_vertices());
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.triangle_area(t);
    const int n0 = mesh.triangles(t, 0), n1 = mesh.triangles(t, 1), n2 = mesh.triangles(t, 2);
    // consistent P1 load: integral of (interpolated f) phi_i
    system.load[n0] += area / 12.0 * (2.0 * load.values[n0] + load.values[n1] + load.values[n2]);
    system.load[n1] += area / 12.0 * (load.values[n0] + 2.0 * load.values[n1] + load.values[n2]);
    system.load[n2] += area / 12.0 * (load.values[n0] + load.values[n1] + 2.0 * load.values[n2]);
  }
  return system;
}

P1System assemble_p1(const TriMesh& mesh, const Vector& sigma, const LoadGradientSource& load) {
  check_sigma(sigma, mesh.num_vertices());
  require_dim(mesh.num_vertices(), load.lift.size(), "gradient-source lift");
  P1StiffnessKernel kernel(mesh);
  P1System system;
  system.stiffness = kernel.pattern();
  kernel.fill(sigma, system.stiffness);
  system.load = -(kernel.unit_stiffness() * load.lift);
  return system;
}

void apply_dirichlet(SpMatrix& matrix, Vector& rhs,
                     const std::vector<std::pair<int, double>>& constraints) {
  const Index n = matrix.rows();
  std::vector<char> constrained(n, 0);
  Vector value = Vector::Zero(n);
  for (const auto& [node, v] : constraints) {
    require(node >= 0 && node < n, "apply_dirichlet: node index " + std::to_string(node) +
                                       " out of range");
    if (constrained[node]) {
      require(value[node] == v, "apply_dirichlet: conflicting values at node " +
                                    std::to_string(node));
    }
    constrained[node] = 1;
    value[node] = v;
  }
  // move known columns to the right-hand side before elimination
  rhs -= matrix * value;
  for (Index col = 0; col < matrix.outerSize(); ++col) {
    for (SpMatrix::InnerIterator it(matrix, col); it; ++it) {
      if (constrained[it.row()] || constrained[col]) {
        it.valueRef() = (it.row() == col) ? 1.0 : 0.0;
      }
    }
  }
  for (Index i = 0; i < n; ++i) {
    if (constrained[i]) rhs[i] = value[i];
  }
}

void apply_dirichlet(P1System& system, const std::vector<int>& nodes, const Vector& values) {
  require_dim(static_cast<Index>(nodes.size()), values.size(), "dirichlet values");
  std::vector<std::pair<int, double>> constraints;
  constraints.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) constraints.emplace_back(nodes[i], values[i]);
  apply_dirichlet(system.stiffness, system.load, constraints);
  system.dirichlet.insert(system.dirichlet.end(), constraints.begin(), constraints.end());
}

Vector solve_p1(const P1System& system, SolveInfo* info) {
  const Index n = system.stiffness.rows();
  SolveInfo local;
  Vector u;
  if (n <= 2000) {
    Eigen::LLT<Matrix> llt(Matrix(system.stiffness));
    require(llt.info() == Eigen::Success, "solve_p1: matrix not SPD (Cholesky failed)");
    u = llt.solve(system.load);
    local.method = "dense_cholesky";
  } else {
    Eigen::ConjugateGradient<SpMatrix, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-10);
    cg.setMaxIterations(4 * n);
    cg.compute(system.stiffness);
    u = cg.solve(system.load);
    require(cg.info() == Eigen::Success,
            "solve_p1: CG did not converge, residual " + std::to_string(cg.error()));
    local.iterations = static_cast<int>(cg.iterations());
    local.method = "conjugate_gradient";
  }
  const double bnorm = system.load.norm();
  local.residual = (system.stiffness * u - system.load).norm() / (bnorm > 0 ? bnorm : 1.0);
  if (info) *info = local;
  return u;
}

Vector harmonic_lift(int k, const TriMesh& mesh) {
  require(k >= 1, "harmonic_lift: k must be >= 1");
  Vector lift(mesh.num_vertices());
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    const double x = mesh.vertices(v, 0), y = mesh.vertices(v, 1);
    const double r = std::hypot(x, y);
    const double theta = std::atan2(y, x);
    lift[v] = std::pow(r, k) * std::sin(k * theta);
  }
  return lift;
}

BoundaryFluxKernel::BoundaryFluxKernel(const TriMesh& mesh)
    : n_nodes_(mesh.num_vertices()),
      n_boundary_(static_cast<Index>(mesh.boundary_nodes.size())) {
  std::map<int, int> boundary_position;
  for (std::size_t i = 0; i < mesh.boundary_nodes.size(); ++i) {
    boundary_position[mesh.boundary_nodes[i]] = static_cast<int>(i);
  }
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry g = element_geometry(mesh, t);
    for (int local = 0; local < 3; ++local) {
      auto it = boundary_position.find(mesh.triangles(t, local));
      if (it == boundary_position.end()) continue;
      Contribution c{};
      c.position = it->second;
      for (int j = 0; j < 3; ++j) {
        c.nodes[j] = mesh.triangles(t, j);
        c.row[j] = g.area * (g.bx[local] * g.bx[j] + g.by[local] * g.by[j]);
      }
      contributions_.push_back(c);
    }
  }
}

Vector BoundaryFluxKernel::apply(const Vector& sigma, const Vector& u_total) const {
  check_sigma(sigma, n_nodes_);
  require_dim(n_nodes_, u_total.size(), "boundary_flux solution");
  Vector flux = Vector::Zero(n_boundary_);
  for (const Contribution& c : contributions_) {
    const double sigma_t = (sigma[c.nodes[0]] + sigma[c.nodes[1]] + sigma[c.nodes[2]]) / 3.0;
    double value = 0.0;
    for (int j = 0; j < 3; ++j) value += c.row[j] * u_total[c.nodes[j]];
    flux[c.position] += sigma_t * value;
  }
  return flux;
}

Vector boundary_flux(const TriMesh& mesh, const Vector& sigma, const Vector& u_total) {
  return BoundaryFluxKernel(mesh).apply(sigma, u_total);
}

SpMatrix grid1d_stiffness(const Grid1D& grid) {
  const Index n = grid.size();
  std::vector<Eigen::Triplet<double>> triplets;
  for (Index i = 0; i + 1 < n; ++i) {
    const double inv_h = 1.0 / (grid[i + 1] - grid[i]);
    triplets.emplace_back(i, i, inv_h);
    triplets.emplace_back(i + 1, i + 1, inv_h);
    triplets.emplace_back(i, i + 1, -inv_h);
    triplets.emplace_back(i + 1, i, -inv_h);
  }
  SpMatrix k(n, n);
  k.setFromTriplets(triplets.begin(), triplets.end());
  k.makeCompressed();
  return k;
}

SpMatrix grid1d_mass(const Grid1D& grid) {
  const Index n = grid.size();
  std::vector<Eigen::Triplet<double>> triplets;
  for (Index i = 0; i + 1 < n; ++i) {
    const double h = grid[i + 1] - grid[i];
    triplets.emplace_back(i, i, h / 3.0);
    triplets.emplace_back(i + 1, i + 1, h / 3.0);
    triplets.emplace_back(i, i + 1, h / 6.0);
    triplets.emplace_back(i + 1, i, h / 6.0);
  }
  SpMatrix m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

}  // namespace uqpde
