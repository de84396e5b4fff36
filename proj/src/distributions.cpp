#include "uqpde/distributions.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace uqpde {

GaussianIID::GaussianIID(std::string name, Vector mean, double sdev, GeometryPtr geometry)
    : name_(std::move(name)), mean_(std::move(mean)), sdev_(sdev),
      geometry_(std::move(geometry)), dim_(mean_.size()) {
  require(sdev_ > 0.0, "GaussianIID '" + name_ + "': sdev must be positive");
  if (geometry_) {
    require_dim(geometry_->par_dim(), dim_, "GaussianIID '" + name_ + "' mean vs geometry");
  }
}

GaussianIID::GaussianIID(std::string name, std::shared_ptr<const ForwardModel> model,
                         std::string conditioning_name, double sdev, GeometryPtr geometry)
    : name_(std::move(name)), model_(std::move(model)),
      conditioning_name_(std::move(conditioning_name)), sdev_(sdev),
      geometry_(std::move(geometry)) {
  require(model_ != nullptr, "GaussianIID '" + name_ + "': null model");
  require(sdev_ > 0.0, "GaussianIID '" + name_ + "': sdev must be positive");
  require(!conditioning_name_.empty(), "GaussianIID '" + name_ + "': conditioning name empty");
  dim_ = model_->range_dim();
  if (!geometry_) geometry_ = model_->range_geometry();
  require_dim(geometry_->par_dim(), dim_, "GaussianIID '" + name_ + "' model vs geometry");
}

const Vector& GaussianIID::fixed_mean() const {
  require(!has_model_mean(), "GaussianIID '" + name_ + "': mean is a model expression");
  return mean_;
}

Vector GaussianIID::mean(const Bindings& conditioning) const {
  if (!has_model_mean()) return mean_;
  auto it = conditioning.find(conditioning_name_);
  if (it == conditioning.end()) {
    throw Error("GaussianIID '" + name_ + "': missing conditioning variable '" +
                conditioning_name_ + "'");
  }
  return model_->forward(it->second);
}

double GaussianIID::logpdf(const Vector& value, const Bindings& conditioning) const {
  require_dim(dim_, value.size(), "GaussianIID '" + name_ + "' logpdf value");
  const Vector mu = mean(conditioning);
  const double n = static_cast<double>(dim_);
  return -0.5 * n * std::log(2.0 * std::numbers::pi * sdev_ * sdev_) -
         (value - mu).squaredNorm() / (2.0 * sdev_ * sdev_);
}

Samples GaussianIID::sample(Rng& rng, Index count, const Bindings& conditioning) const {
  require(count >= 1, "GaussianIID::sample: count must be >= 1");
  const Vector mu = mean(conditioning);
  Matrix draws(dim_, count);
  for (Index c = 0; c < count; ++c) {
    draws.col(c) = mu + sdev_ * rng.normal_vector(dim_);
  }
  SamplesMeta meta;
  meta.sampler = "gaussian_iid";
  meta.seed = rng.seed();
  meta.rng = Rng::algorithm();
  return Samples(std::move(draws), geometry_, std::move(meta));
}

JointDensity::JointDensity(std::vector<std::shared_ptr<const GaussianIID>> factors)
    : factors_(std::move(factors)) {
  require(!factors_.empty(), "JointDensity: no factors");
  std::set<std::string> names;
  for (const auto& f : factors_) {
    require(f != nullptr, "JointDensity: null factor");
    require(names.insert(f->name()).second,
            "JointDensity: duplicate variable name '" + f->name() + "'");
  }
  for (const auto& f : factors_) {
    if (!f->has_model_mean()) continue;
    require(names.count(f->conditioning_name()) == 1,
            "JointDensity: factor '" + f->name() + "' conditions on unknown variable '" +
                f->conditioning_name() + "'");
    require(f->conditioning_name() != f->name(),
            "JointDensity: factor '" + f->name() + "' conditions on itself");
  }
  // cycle check over conditioning edges
  for (const auto& start : factors_) {
    std::string current = start->name();
    for (std::size_t hops = 0; hops <= factors_.size(); ++hops) {
      const GaussianIID* node = nullptr;
      for (const auto& f : factors_) {
        if (f->name() == current) node = f.get();
      }
      if (!node || !node->has_model_mean()) break;
      current = node->conditioning_name();
      require(current != start->name(),
              "JointDensity: conditioning cycle through '" + start->name() + "'");
    }
  }
}

double JointDensity::logpdf(const Bindings& values) const {
  double total = 0.0;
  for (const auto& f : factors_) {
    auto it = values.find(f->name());
    require(it != values.end(), "JointDensity::logpdf: variable '" + f->name() + "' unbound");
    total += f->logpdf(it->second, values);
  }
  return total;
}

Posterior JointDensity::condition(const Bindings& observed) const {
  std::set<std::string> names;
  for (const auto& f : factors_) names.insert(f->name());
  for (const auto& [name, value] : observed) {
    require(names.count(name) == 1,
            "condition: observed variable '" + name + "' is not part of the joint");
  }

  std::shared_ptr<const GaussianIID> prior;
  std::vector<Posterior::LikelihoodTerm> terms;
  for (const auto& f : factors_) {
    auto it = observed.find(f->name());
    if (it == observed.end()) {
      require(prior == nullptr,
              "condition: more than one free variable ('" + prior->name() + "' and '" +
                  f->name() + "'); hierarchies are not supported");
      prior = f;
      continue;
    }
    require(f->has_model_mean(),
            "condition: observed factor '" + f->name() + "' does not depend on a free variable");
    require_dim(f->dim(), it->second.size(), "condition: data for '" + f->name() + "'");
    terms.push_back({f->model(), it->second, f->sdev(), f->name()});
  }
  require(prior != nullptr, "condition: no free variable left to infer");
  require(!prior->has_model_mean(), "condition: free variable '" + prior->name() +
                                        "' must have a fixed-mean prior");
  for (const auto& f : factors_) {
    if (f->has_model_mean()) {
      require(f->conditioning_name() == prior->name(),
              "condition: factor '" + f->name() + "' conditions on '" + f->conditioning_name() +
                  "', not on the free variable '" + prior->name() + "'");
    }
  }
  return Posterior(std::move(prior), std::move(terms));
}

Posterior::Posterior(std::shared_ptr<const GaussianIID> prior, std::vector<LikelihoodTerm> terms)
    : prior_(std::move(prior)), terms_(std::move(terms)) {
  require(prior_ != nullptr, "Posterior: null prior");
  for (const auto& term : terms_) {
    require(term.model != nullptr, "Posterior: null model in likelihood term");
    require_dim(term.model->range_dim(), term.y_obs.size(),
                "Posterior: data '" + term.data_name + "' vs model range");
    require(term.sdev > 0.0, "Posterior: nonpositive noise sdev for '" + term.data_name + "'");
  }
}

double Posterior::prior_logpdf(const Vector& x) const { return prior_->logpdf(x); }

double Posterior::loglik(const Vector& x) const {
  require_dim(dim(), x.size(), "Posterior::loglik parameter");
  double total = 0.0;
  for (const auto& term : terms_) {
    const Vector predicted = term.model->forward(x);
    const double n = static_cast<double>(predicted.size());
    total += -0.5 * n * std::log(2.0 * std::numbers::pi * term.sdev * term.sdev) -
             (term.y_obs - predicted).squaredNorm() / (2.0 * term.sdev * term.sdev);
  }
  return total;
}

}  // namespace uqpde
