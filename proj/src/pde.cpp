#include "uqpde/pde.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <cmath>
#include <cstring>

namespace uqpde {

namespace {

constexpr double kInstabilityThreshold = 1e12;

bool same_sparse(const SpMatrix& a, const SpMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.nonZeros() != b.nonZeros()) return false;
  if (std::memcmp(a.valuePtr(), b.valuePtr(), sizeof(double) * a.nonZeros()) != 0) return false;
  if (std::memcmp(a.innerIndexPtr(), b.innerIndexPtr(),
                  sizeof(SpMatrix::StorageIndex) * a.nonZeros()) != 0) {
    return false;
  }
  return std::memcmp(a.outerIndexPtr(), b.outerIndexPtr(),
                     sizeof(SpMatrix::StorageIndex) * (a.outerSize() + 1)) == 0;
}

}  // namespace

TimeDependentLinearPDE::TimeDependentLinearPDE(PdeForm form, Vector time_steps, Grid1D grid_sol,
                                               std::optional<Grid1D> grid_obs, TimeScheme scheme,
                                               bool time_invariant_form)
    : form_(std::move(form)),
      time_steps_(std::move(time_steps)),
      grid_sol_(std::move(grid_sol)),
      grid_obs_(grid_obs ? std::move(*grid_obs) : grid_sol_),
      scheme_(scheme),
      time_invariant_form_(time_invariant_form) {
  require(time_steps_.size() >= 2, "TimeDependentLinearPDE: need at least 2 time points");
  require(time_steps_[0] == 0.0, "TimeDependentLinearPDE: time steps must start at 0");
  for (Index k = 1; k < time_steps_.size(); ++k) {
    require(time_steps_[k] > time_steps_[k - 1],
            "TimeDependentLinearPDE: time steps must be strictly increasing");
  }
  require(grid_obs_.min() >= grid_sol_.min() - 1e-12 && grid_obs_.max() <= grid_sol_.max() + 1e-12,
          "TimeDependentLinearPDE: grid_obs outside solution grid hull");
}

void TimeDependentLinearPDE::assemble(const Vector& parameter) {
  assembled_components_ = form_(parameter, time_steps_[0]);
  const Index n = grid_sol_.size();
  require_dim(n, assembled_components_.initial.size(), "PDE form initial state");
  require(assembled_components_.op.rows() == n && assembled_components_.op.cols() == n,
          "PDE form operator must be square with the solution grid dimension");
  require_dim(n, assembled_components_.rhs.size(), "PDE form rhs");
  parameter_ = parameter;
  assembled_ = true;
}

std::pair<Matrix, SolveInfo> TimeDependentLinearPDE::solve() {
  require(assembled_, "TimeDependentLinearPDE::solve: assemble not called");
  const Index n = grid_sol_.size();
  const Index n_tau = time_steps_.size();
  Matrix solution(n, n_tau);
  solution.col(0) = assembled_components_.initial;

  TimeStepComponents step = assembled_components_;
  SolveInfo info;
  info.method = scheme_ == TimeScheme::ExplicitEuler ? "explicit_euler" : "implicit_euler";

  for (Index k = 0; k + 1 < n_tau; ++k) {
    const double dtau = time_steps_[k + 1] - time_steps_[k];
    if (scheme_ == TimeScheme::ExplicitEuler) {
      if (!time_invariant_form_) step = form_(parameter_, time_steps_[k]);
      solution.col(k + 1) =
          solution.col(k) + dtau * (step.op * solution.col(k) + step.rhs);
    } else {
      if (!time_invariant_form_) step = form_(parameter_, time_steps_[k + 1]);
      if (!step_lu_valid_ || cached_dtau_ != dtau || !same_sparse(cached_op_, step.op)) {
        SpMatrix identity(n, n);
        identity.setIdentity();
        SpMatrix system = identity - dtau * step.op;
        system.makeCompressed();
        step_lu_.compute(system);
        require(step_lu_.info() == Eigen::Success,
                "TimeDependentLinearPDE: implicit step factorization failed");
        cached_op_ = step.op;
        cached_dtau_ = dtau;
        step_lu_valid_ = true;
        info.iterations++;  // counts factorizations for the implicit scheme
      }
      solution.col(k + 1) = step_lu_.solve(solution.col(k) + dtau * step.rhs);
    }
    const double amplitude = solution.col(k + 1).cwiseAbs().maxCoeff();
    if (!std::isfinite(amplitude) || amplitude > kInstabilityThreshold) {
      throw Error("unstable time step: solution magnitude " + std::to_string(amplitude) +
                  " at tau = " + std::to_string(time_steps_[k + 1]) +
                  " (reduce dtau or use implicit_euler)");
    }
  }
  return {std::move(solution), info};
}

Vector TimeDependentLinearPDE::observe(const Matrix& solution) const {
  require_dim(grid_sol_.size(), solution.rows(), "observe solution rows");
  require_dim(time_steps_.size(), solution.cols(), "observe solution columns");
  return grid_sol_.interpolate(solution.col(solution.cols() - 1), grid_obs_.nodes());
}

std::unique_ptr<PdeProblem> TimeDependentLinearPDE::clone_for_thread() const {
  return std::make_unique<TimeDependentLinearPDE>(form_, time_steps_, grid_sol_, grid_obs_,
                                                  scheme_, time_invariant_form_);
}

struct SteadyStateLinearPDE::MatrixCache {
  SteadyMatrixAssembler assemble_matrix;
  SteadySolver solver;
  double cg_tolerance;
  bool reuse;

  bool valid = false;
  std::uint64_t key = 0;
  SpMatrix raw;          // before constraint elimination (rhs adjustment)
  SpMatrix constrained;
  std::vector<std::pair<int, double>> bc;
  Eigen::LLT<Matrix> dense_llt;
  Eigen::SimplicialLDLT<SpMatrix> sparse_ldlt;
  bool pattern_analyzed = false;
  long factorizations = 0;

  void build(const Vector& parameter) {
    SteadySystem system = assemble_matrix(parameter);
    raw = system.matrix;
    raw.makeCompressed();
    bc = system.dirichlet;
    constrained = raw;
    Vector dummy = Vector::Zero(raw.rows());
    apply_dirichlet(constrained, dummy, bc);
    switch (solver) {
      case SteadySolver::DenseCholesky:
        dense_llt.compute(Matrix(constrained));
        require(dense_llt.info() == Eigen::Success,
                "SteadyStateLinearPDE: matrix not SPD (dense Cholesky failed)");
        break;
      case SteadySolver::SparseCholesky:
        if (!pattern_analyzed) {
          sparse_ldlt.analyzePattern(constrained);
          pattern_analyzed = true;
        }
        sparse_ldlt.factorize(constrained);
        require(sparse_ldlt.info() == Eigen::Success,
                "SteadyStateLinearPDE: sparse Cholesky factorization failed");
        break;
      case SteadySolver::ConjugateGradient:
        break;  // iterative; nothing to factor
    }
    factorizations++;
    valid = true;
  }
};

SteadyStateLinearPDE::SteadyStateLinearPDE(SteadyMatrixAssembler matrix_assembler,
                                           SteadyRhsAssembler rhs_assembler,
                                           SteadyObserver observer, SteadySolver solver,
                                           double cg_tolerance, bool reuse_assembled)
    : cache_(std::make_shared<MatrixCache>()),
      rhs_assembler_(std::move(rhs_assembler)),
      observer_(std::move(observer)) {
  cache_->assemble_matrix = std::move(matrix_assembler);
  cache_->solver = solver;
  cache_->cg_tolerance = cg_tolerance;
  cache_->reuse = reuse_assembled;
}

void SteadyStateLinearPDE::assemble(const Vector& parameter) {
  const std::uint64_t key = content_hash(parameter);
  if (!(cache_->reuse && cache_->valid && cache_->key == key)) {
    cache_->build(parameter);
    cache_->key = key;
  }
  Vector rhs = rhs_assembler_(parameter);
  require_dim(cache_->raw.rows(), rhs.size(), "steady rhs");
  // eliminate constrained columns, then pin prescribed values
  Vector bc_values = Vector::Zero(rhs.size());
  for (const auto& [node, value] : cache_->bc) bc_values[node] = value;
  rhs -= cache_->raw * bc_values;
  for (const auto& [node, value] : cache_->bc) rhs[node] = value;
  rhs_constrained_ = std::move(rhs);
  parameter_ = parameter;
  assembled_ = true;
}

std::pair<Matrix, SolveInfo> SteadyStateLinearPDE::solve() {
  require(assembled_, "SteadyStateLinearPDE::solve: assemble not called");
  SolveInfo info;
  Vector u;
  switch (cache_->solver) {
    case SteadySolver::DenseCholesky:
      u = cache_->dense_llt.solve(rhs_constrained_);
      info.method = "dense_cholesky";
      break;
    case SteadySolver::SparseCholesky:
      u = cache_->sparse_ldlt.solve(rhs_constrained_);
      require(cache_->sparse_ldlt.info() == Eigen::Success,
              "SteadyStateLinearPDE: sparse Cholesky solve failed");
      info.method = "sparse_cholesky";
      break;
    case SteadySolver::ConjugateGradient: {
      Eigen::ConjugateGradient<SpMatrix, Eigen::Lower | Eigen::Upper> cg;
      cg.setTolerance(cache_->cg_tolerance);
      cg.setMaxIterations(4 * cache_->constrained.rows());
      cg.compute(cache_->constrained);
      u = cg.solve(rhs_constrained_);
      require(cg.info() == Eigen::Success,
              "SteadyStateLinearPDE: CG did not converge, residual " +
                  std::to_string(cg.error()));
      info.iterations = static_cast<int>(cg.iterations());
      info.method = "conjugate_gradient";
      break;
    }
  }
  const double bnorm = rhs_constrained_.norm();
  info.residual = (cache_->constrained * u - rhs_constrained_).norm() / (bnorm > 0 ? bnorm : 1.0);
  Matrix solution(u.size(), 1);
  solution.col(0) = u;
  return {std::move(solution), info};
}

Vector SteadyStateLinearPDE::observe(const Matrix& solution) const {
  require(assembled_, "SteadyStateLinearPDE::observe: assemble not called");
  require(solution.cols() == 1, "SteadyStateLinearPDE::observe: expected one state column");
  return observer_(parameter_, solution.col(0));
}

Index SteadyStateLinearPDE::solution_dim() const {
  require(cache_->valid, "SteadyStateLinearPDE: solution dimension unknown before assembly");
  return cache_->raw.rows();
}

SteadyStateLinearPDE SteadyStateLinearPDE::with_updated_rhs(SteadyRhsAssembler rhs_assembler,
                                                            SteadyObserver observer) const {
  SteadyStateLinearPDE sibling = *this;
  sibling.rhs_assembler_ = std::move(rhs_assembler);
  sibling.observer_ = std::move(observer);
  sibling.assembled_ = false;
  sibling.rhs_constrained_.resize(0);
  return sibling;
}

long SteadyStateLinearPDE::factorization_count() const { return cache_->factorizations; }

std::unique_ptr<PdeProblem> SteadyStateLinearPDE::clone_for_thread() const {
  // fresh cache: factorizations are rebuilt on first assemble in the new thread
  auto clone = std::make_unique<SteadyStateLinearPDE>(
      cache_->assemble_matrix, rhs_assembler_, observer_, cache_->solver, cache_->cg_tolerance,
      cache_->reuse);
  return clone;
}

}  // namespace uqpde
