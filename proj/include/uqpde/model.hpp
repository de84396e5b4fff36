#ifndef UQPDE_MODEL_HPP
#define UQPDE_MODEL_HPP

#include "uqpde/geometry.hpp"
#include "uqpde/pde.hpp"
#include "uqpde/types.hpp"

#include <functional>
#include <memory>

namespace uqpde {

/// Forward model A = observe . solve . par2fun binding a PDE (or a black-box
/// callable) to domain and range geometries. Evaluation mutates PDE internal
/// state: use one instance per thread (clone_for_thread duplicates mutable
/// state over shared immutable meshes and geometries).
class ForwardModel {
 public:
  enum class Kind { PdeModel, Blackbox };
  using Callable = std::function<Vector(const Vector&)>;

  ForwardModel(std::shared_ptr<PdeProblem> pde, GeometryPtr domain_geometry,
               GeometryPtr range_geometry);

  /// Black-box forward map on function values; with raw_parameter the
  /// callable receives the coefficient vector directly (no par2fun).
  static ForwardModel blackbox(Callable fn, GeometryPtr domain_geometry,
                               GeometryPtr range_geometry, bool raw_parameter = false);

  /// A(x): function values from the domain geometry, then the PDE triple
  /// (or black-box call).
  Vector forward(const Vector& x) const;

  /// Forward map applied to given function values, bypassing par2fun.
  Vector forward_fun(const Vector& g) const;

  Index domain_dim() const { return domain_geometry_->par_dim(); }
  Index range_dim() const { return range_geometry_->par_dim(); }
  const GeometryPtr& domain_geometry() const { return domain_geometry_; }
  const GeometryPtr& range_geometry() const { return range_geometry_; }
  Kind kind() const { return kind_; }

  /// PDE access (e.g. factorization counters in tests); null for black boxes.
  const std::shared_ptr<PdeProblem>& pde() const { return pde_; }

  /// Sibling model sharing this model's steady-state matrix cache with a
  /// substituted right-hand side and observer. Errors for black-box or
  /// time-dependent models.
  ForwardModel with_updated_rhs(SteadyRhsAssembler rhs_assembler, SteadyObserver observer) const;

  ForwardModel clone_for_thread() const;

 private:
  ForwardModel() = default;
  Kind kind_ = Kind::PdeModel;
  std::shared_ptr<PdeProblem> pde_;
  Callable callable_;
  bool raw_parameter_ = false;
  GeometryPtr domain_geometry_;
  GeometryPtr range_geometry_;
};

}  // namespace uqpde

#endif
