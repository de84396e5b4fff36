#ifndef UQPDE_PDE_HPP
#define UQPDE_PDE_HPP

#include "uqpde/fem.hpp"
#include "uqpde/grid.hpp"
#include "uqpde/types.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <functional>
#include <memory>
#include <optional>

namespace uqpde {

/// Discretized PDE with the assemble / solve / observe triple. A PDE object
/// holds mutable assembled state and is confined to one thread; distinct
/// instances over shared immutable meshes and grids may run in parallel.
class PdeProblem {
 public:
  virtual ~PdeProblem() = default;

  virtual void assemble(const Vector& parameter) = 0;
  /// Returns the solution states as columns (time steps, or one column for
  /// steady problems) plus solver info.
  virtual std::pair<Matrix, SolveInfo> solve() = 0;
  virtual Vector observe(const Matrix& solution) const = 0;
  virtual Index solution_dim() const = 0;

  virtual std::unique_ptr<PdeProblem> clone_for_thread() const = 0;
};

/// Components returned by a time-dependent PDE form at one time instant.
struct TimeStepComponents {
  SpMatrix op;     // differential operator D
  Vector rhs;      // source term f
  Vector initial;  // initial state g0
};

using PdeForm = std::function<TimeStepComponents(const Vector& parameter, double tau)>;

enum class TimeScheme { ExplicitEuler, ImplicitEuler };

/// Time stepper for u' = D u + f. Explicit Euler advances
/// u^{k+1} = u^k + dtau (D u^k + f^k); implicit Euler solves
/// (I - dtau D) u^{k+1} = u^k + dtau f^{k+1}. The form is invoked every step
/// unless constructed with time_invariant_form (a per-step hook left for
/// genuinely time-varying sources).
class TimeDependentLinearPDE : public PdeProblem {
 public:
  TimeDependentLinearPDE(PdeForm form, Vector time_steps, Grid1D grid_sol,
                         std::optional<Grid1D> grid_obs = std::nullopt,
                         TimeScheme scheme = TimeScheme::ExplicitEuler,
                         bool time_invariant_form = false);

  void assemble(const Vector& parameter) override;
  std::pair<Matrix, SolveInfo> solve() override;
  /// Final-time solution restricted to grid_obs by linear interpolation.
  Vector observe(const Matrix& solution) const override;
  Index solution_dim() const override { return grid_sol_.size(); }

  const Vector& time_steps() const { return time_steps_; }
  const Grid1D& grid_sol() const { return grid_sol_; }
  const Grid1D& grid_obs() const { return grid_obs_; }

  std::unique_ptr<PdeProblem> clone_for_thread() const override;

 private:
  PdeForm form_;
  Vector time_steps_;
  Grid1D grid_sol_;
  Grid1D grid_obs_;
  TimeScheme scheme_;
  bool time_invariant_form_;

  bool assembled_ = false;
  Vector parameter_;
  TimeStepComponents assembled_components_;

  // implicit-step factorization, refreshed when the operator or dtau changes
  SpMatrix cached_op_;
  double cached_dtau_ = -1.0;
  Eigen::SparseLU<SpMatrix> step_lu_;
  bool step_lu_valid_ = false;
};

/// Assembled steady system prior to constraint elimination.
struct SteadySystem {
  SpMatrix matrix;
  std::vector<std::pair<int, double>> dirichlet;
};

using SteadyMatrixAssembler = std::function<SteadySystem(const Vector& parameter)>;
using SteadyRhsAssembler = std::function<Vector(const Vector& parameter)>;
using SteadyObserver = std::function<Vector(const Vector& parameter, const Vector& solution)>;

enum class SteadySolver { DenseCholesky, SparseCholesky, ConjugateGradient };

/// Steady-state solver K(p) u = b(p) with Dirichlet elimination. With
/// reuse_assembled, the constrained matrix factorization is cached keyed by
/// the parameter content hash and shared with rhs variants created through
/// with_updated_rhs (one factorization serves several right-hand sides).
class SteadyStateLinearPDE : public PdeProblem {
 public:
  SteadyStateLinearPDE(SteadyMatrixAssembler matrix_assembler, SteadyRhsAssembler rhs_assembler,
                       SteadyObserver observer,
                       SteadySolver solver = SteadySolver::SparseCholesky,
                       double cg_tolerance = 1e-10, bool reuse_assembled = true);

  void assemble(const Vector& parameter) override;
  std::pair<Matrix, SolveInfo> solve() override;
  Vector observe(const Matrix& solution) const override;
  Index solution_dim() const override;

  /// Sibling PDE sharing this matrix cache, with substituted rhs/observer.
  SteadyStateLinearPDE with_updated_rhs(SteadyRhsAssembler rhs_assembler,
                                        SteadyObserver observer) const;

  /// Number of matrix build+factorization events since construction
  /// (shared with rhs siblings).
  long factorization_count() const;

  std::unique_ptr<PdeProblem> clone_for_thread() const override;

 private:
  struct MatrixCache;
  std::shared_ptr<MatrixCache> cache_;
  SteadyRhsAssembler rhs_assembler_;
  SteadyObserver observer_;

  bool assembled_ = false;
  Vector parameter_;
  Vector rhs_constrained_;
};

}  // namespace uqpde

#endif
