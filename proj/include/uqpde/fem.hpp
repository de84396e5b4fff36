#ifndef UQPDE_FEM_HPP
#define UQPDE_FEM_HPP

#include "uqpde/grid.hpp"
#include "uqpde/trimesh.hpp"
#include "uqpde/types.hpp"

#include <array>
#include <vector>

namespace uqpde {

/// Assembled P1 system: K u = b with pending/applied Dirichlet constraints.
struct P1System {
  SpMatrix stiffness;
  Vector load;
  std::vector<std::pair<int, double>> dirichlet;  // applied constraints
};

/// Volumetric load from a nodal density f: b_i = integral of f phi_i.
struct LoadDensity {
  Vector values;  // per node
};

/// Load from a gradient source (lifting): b_i = -integral of grad(u_lift) . grad(phi_i).
struct LoadGradientSource {
  Vector lift;  // per node
};

/// Precomputed P1 element integrals of grad(phi_i).grad(phi_j) over a fixed
/// mesh, with slot indices into a shared sparsity pattern. Immutable after
/// construction; fill() writes into caller-owned matrices, so one kernel may
/// serve concurrent assemblies.
class P1StiffnessKernel {
 public:
  explicit P1StiffnessKernel(const TriMesh& mesh);

  /// Zero matrix carrying the full assembly pattern (compressed).
  SpMatrix pattern() const { return pattern_; }

  /// Overwrites values of `out` (must share the pattern) with the stiffness
  /// for nodal conductivity sigma; per-element sigma is the nodal mean.
  void fill(const Vector& sigma, SpMatrix& out) const;

  /// One-shot assembly with unit conductivity (cached internally at build).
  const SpMatrix& unit_stiffness() const { return unit_stiffness_; }

  Index num_nodes() const { return n_nodes_; }

 private:
  Index n_nodes_;
  Eigen::MatrixXi triangles_;
  std::vector<std::array<double, 9>> element_;  // 3x3 per triangle, row-major
  std::vector<std::array<int, 9>> slots_;       // value index per entry
  SpMatrix pattern_;
  SpMatrix unit_stiffness_;
};

/// P1 consistent mass matrix: M_ij = integral of phi_i phi_j.
SpMatrix p1_mass_matrix(const TriMesh& mesh);

/// Assemble stiffness (nodal conductivity, per-element mean) and load.
P1System assemble_p1(const TriMesh& mesh, const Vector& sigma, const LoadDensity& load);
P1System assemble_p1(const TriMesh& mesh, const Vector& sigma, const LoadGradientSource& load);

/// Symmetric elimination of Dirichlet constraints: rows/cols zeroed, unit
/// diagonal, load adjusted so constrained nodes attain the prescribed values.
void apply_dirichlet(P1System& system, const std::vector<int>& nodes, const Vector& values);
void apply_dirichlet(SpMatrix& matrix, Vector& rhs,
                     const std::vector<std::pair<int, double>>& constraints);

struct SolveInfo {
  int iterations = 0;
  double residual = 0.0;
  std::string method;
};

/// Direct Cholesky for n <= 2000, otherwise conjugate gradient to relative
/// residual 1e-10. The system must be constrained and SPD.
Vector solve_p1(const P1System& system, SolveInfo* info = nullptr);

/// Nodal values of r^k sin(k theta): harmonic, equals sin(k theta) on the
/// unit-disk boundary.
Vector harmonic_lift(int k, const TriMesh& mesh);

/// Boundary current functional, precomputed once per mesh. The measurement
/// is the Galerkin residual b_i = sum_j K_sigma(i, j) u_total(j) at boundary
/// nodes (boundary order): the weak form of the normal current against the
/// boundary hat functions, consistent with the stiffness discretization.
class BoundaryFluxKernel {
 public:
  explicit BoundaryFluxKernel(const TriMesh& mesh);

  Vector apply(const Vector& sigma, const Vector& u_total) const;

 private:
  struct Contribution {
    int position;                 // index into the boundary-ordered output
    std::array<int, 3> nodes;     // triangle nodes (sigma and u lookups)
    std::array<double, 3> row;    // element stiffness row of the boundary node
  };
  Index n_nodes_;
  Index n_boundary_;
  std::vector<Contribution> contributions_;
};

/// One-shot boundary current measurement at boundary nodes in boundary order.
Vector boundary_flux(const TriMesh& mesh, const Vector& sigma, const Vector& u_total);

/// 1D P1 stiffness/mass on a grid (natural boundary treatment).
SpMatrix grid1d_stiffness(const Grid1D& grid);
SpMatrix grid1d_mass(const Grid1D& grid);

}  // namespace uqpde

#endif
