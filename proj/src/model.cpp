#include "uqpde/model.hpp"

namespace uqpde {

ForwardModel::ForwardModel(std::shared_ptr<PdeProblem> pde, GeometryPtr domain_geometry,
                           GeometryPtr range_geometry)
    : kind_(Kind::PdeModel),
      pde_(std::move(pde)),
      domain_geometry_(std::move(domain_geometry)),
      range_geometry_(std::move(range_geometry)) {
  require(pde_ != nullptr, "ForwardModel: null PDE");
  require(domain_geometry_ && range_geometry_, "ForwardModel: geometries required");
}

ForwardModel ForwardModel::blackbox(Callable fn, GeometryPtr domain_geometry,
                                    GeometryPtr range_geometry, bool raw_parameter) {
  require(fn != nullptr, "ForwardModel: null black-box callable");
  require(domain_geometry && range_geometry, "ForwardModel: geometries required");
  ForwardModel model;
  model.kind_ = Kind::Blackbox;
  model.callable_ = std::move(fn);
  model.raw_parameter_ = raw_parameter;
  model.domain_geometry_ = std::move(domain_geometry);
  model.range_geometry_ = std::move(range_geometry);
  return model;
}

Vector ForwardModel::forward(const Vector& x) const {
  require_dim(domain_dim(), x.size(), "forward parameter");
  Vector y;
  if (kind_ == Kind::Blackbox && raw_parameter_) {
    y = callable_(x);
  } else {
    y = forward_fun(domain_geometry_->par2fun(x));
  }
  require_dim(range_dim(), y.size(), "forward output vs range geometry");
  return y;
}

Vector ForwardModel::forward_fun(const Vector& g) const {
  if (kind_ == Kind::Blackbox) {
    require(!raw_parameter_,
            "forward_fun: raw-parameter black box takes coefficients, not function values");
    return callable_(g);
  }
  pde_->assemble(g);
  auto [solution, info] = pde_->solve();
  return pde_->observe(solution);
}

ForwardModel ForwardModel::with_updated_rhs(SteadyRhsAssembler rhs_assembler,
                                            SteadyObserver observer) const {
  require(kind_ == Kind::PdeModel, "with_updated_rhs: not a PDE model");
  auto* steady = dynamic_cast<SteadyStateLinearPDE*>(pde_.get());
  require(steady != nullptr, "with_updated_rhs: requires a steady-state PDE model");
  auto sibling = std::make_shared<SteadyStateLinearPDE>(
      steady->with_updated_rhs(std::move(rhs_assembler), std::move(observer)));
  return ForwardModel(sibling, domain_geometry_, range_geometry_);
}

ForwardModel ForwardModel::clone_for_thread() const {
  if (kind_ == Kind::Blackbox) return *this;  // callables capture immutable state only
  ForwardModel clone;
  clone.kind_ = kind_;
  clone.pde_ = pde_->clone_for_thread();
  clone.domain_geometry_ = domain_geometry_;
  clone.range_geometry_ = range_geometry_;
  return clone;
}

}  // namespace uqpde
