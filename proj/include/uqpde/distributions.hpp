#ifndef UQPDE_DISTRIBUTIONS_HPP
#define UQPDE_DISTRIBUTIONS_HPP

#include "uqpde/model.hpp"
#include "uqpde/rng.hpp"
#include "uqpde/samples.hpp"
#include "uqpde/types.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace uqpde {

using Bindings = std::map<std::string, Vector>;

/// Gaussian with scalar standard deviation and i.i.d. components. The mean
/// is either a fixed vector or a forward model applied to a conditioning
/// variable (a data distribution y ~ Gaussian(A(x), s^2 I)).
class GaussianIID {
 public:
  GaussianIID(std::string name, Vector mean, double sdev, GeometryPtr geometry = nullptr);
  GaussianIID(std::string name, std::shared_ptr<const ForwardModel> model,
              std::string conditioning_name, double sdev, GeometryPtr geometry = nullptr);

  const std::string& name() const { return name_; }
  Index dim() const { return dim_; }
  double sdev() const { return sdev_; }
  const GeometryPtr& geometry() const { return geometry_; }

  bool has_model_mean() const { return model_ != nullptr; }
  const std::string& conditioning_name() const { return conditioning_name_; }
  const std::shared_ptr<const ForwardModel>& model() const { return model_; }
  const Vector& fixed_mean() const;

  /// Mean vector; model means require the conditioning variable bound.
  Vector mean(const Bindings& conditioning = {}) const;

  /// -(n/2) log(2 pi s^2) - |value - mean|^2 / (2 s^2)
  double logpdf(const Vector& value, const Bindings& conditioning = {}) const;

  Samples sample(Rng& rng, Index count, const Bindings& conditioning = {}) const;

 private:
  std::string name_;
  Vector mean_;
  std::shared_ptr<const ForwardModel> model_;
  std::string conditioning_name_;
  double sdev_;
  GeometryPtr geometry_;
  Index dim_;
};

class Posterior;

/// Ordered product of densities p(x, y, ...) with acyclic conditioning.
class JointDensity {
 public:
  explicit JointDensity(std::vector<std::shared_ptr<const GaussianIID>> factors);

  const std::vector<std::shared_ptr<const GaussianIID>>& factors() const { return factors_; }

  /// Sum of factor logpdfs with every variable bound.
  double logpdf(const Bindings& values) const;

  /// Condition on observed data vectors; exactly one variable must remain
  /// free and becomes the posterior parameter.
  Posterior condition(const Bindings& observed) const;

 private:
  std::vector<std::shared_ptr<const GaussianIID>> factors_;
};

/// Conditioned log-target: prior plus Gaussian likelihood terms, each an
/// observed dataset with its forward model and noise level. logpdf keeps the
/// normalizing constants (samplers only need differences, tests use both).
class Posterior {
 public:
  struct LikelihoodTerm {
    std::shared_ptr<const ForwardModel> model;
    Vector y_obs;
    double sdev;
    std::string data_name;
  };

  Posterior(std::shared_ptr<const GaussianIID> prior, std::vector<LikelihoodTerm> terms);

  Index dim() const { return prior_->dim(); }
  const GaussianIID& prior() const { return *prior_; }
  const std::vector<LikelihoodTerm>& terms() const { return terms_; }

  double prior_logpdf(const Vector& x) const;
  double loglik(const Vector& x) const;
  double logpdf(const Vector& x) const { return prior_logpdf(x) + loglik(x); }

 private:
  std::shared_ptr<const GaussianIID> prior_;
  std::vector<LikelihoodTerm> terms_;
};

}  // namespace uqpde

#endif
