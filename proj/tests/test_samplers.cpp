#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "uqpde/samplers.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace uqpde;

namespace {

GeometryPtr nodal(Index n) {
  return std::make_shared<NodalGeometry>(Grid1D::uniform(0.0, 1.0, std::max<Index>(n, 2)));
}

std::shared_ptr<const ForwardModel> linear_model(const Matrix& a) {
  return std::make_shared<const ForwardModel>(ForwardModel::blackbox(
      [a](const Vector& x) { return Vector(a * x); }, nodal(a.cols()), nodal(a.rows()),
      /*raw_parameter=*/true));
}

// N(mean, diag(sdev^2)) as a conditioned posterior: prior x data trick is
// unnecessary, a prior-only posterior suffices
Posterior gaussian_target(const Vector& mean, double sdev) {
  return Posterior(std::make_shared<GaussianIID>("x", mean, sdev), {});
}

// 2D independent gaussian with variances (1, 4) via a diagonal likelihood at
// zero data and a wide prior is awkward; instead use prior sdev 1 and a
// likelihood that sharpens one component. Simpler: build from the conjugate
// identity cov = (I + A^T A / s^2)^-1.
Posterior gaussian_target_2d_var14() {
  // want cov = diag(1, 4): prior N(0, I) alone gives diag(1, 1); add a
  // pseudo-observation on x2 with negative information is impossible, so
  // instead scale the prior: prior N(0, 2^2 I) and likelihood on x1 only:
  // cov = (1/4 I + a^T a / s^2)^-1 with a = [e1], s such that 1/4 + 1/s^2 = 1
  Matrix a(1, 2);
  a << 1.0, 0.0;
  const double s = std::sqrt(4.0 / 3.0);
  auto prior = std::make_shared<GaussianIID>("x", Vector::Zero(2), 2.0);
  std::vector<Posterior::LikelihoodTerm> terms;
  terms.push_back({linear_model(a), Vector::Zero(1), s, "y"});
  return Posterior(std::move(prior), std::move(terms));
}

Posterior standard_prior(Index n) {
  return Posterior(std::make_shared<GaussianIID>("x", Vector::Zero(n), 1.0), {});
}

}  // namespace

TEST_CASE("mh recovers a 1D standard normal") {
  const Posterior target = gaussian_target(Vector::Zero(1), 1.0);
  ChainConfig config;
  config.n_samples = 100000;
  config.seed = 42;
  const ChainResult result = mh_sample(target, config);
  REQUIRE(result.samples.cols() == 100000);
  const double m = result.samples.row(0).mean();
  const double v = result.samples.row(0).array().square().mean() - m * m;
  CHECK(std::abs(m) < 0.05);
  CHECK(v > 0.9);
  CHECK(v < 1.1);
  CHECK(result.acceptance_rate > 0.13);
  CHECK(result.acceptance_rate < 0.33);
  CHECK(result.samples.allFinite());
}

TEST_CASE("same seed gives bit-identical chains") {
  const Posterior target = gaussian_target(Vector::Zero(3), 2.0);
  ChainConfig config;
  config.n_samples = 2000;
  config.seed = 7;
  const ChainResult a = mh_sample(target, config);
  const ChainResult b = mh_sample(target, config);
  CHECK(a.samples == b.samples);
  CHECK(a.final_scale == b.final_scale);
  const ChainResult c = cwmh_sample(target, config);
  const ChainResult d = cwmh_sample(target, config);
  CHECK(c.samples == d.samples);
  const ChainResult e = pcn_sample(standard_prior(3), config);
  const ChainResult f = pcn_sample(standard_prior(3), config);
  CHECK(e.samples == f.samples);
}

TEST_CASE("acceptance depends only on logpdf differences") {
  // a likelihood term with a constant model shifts the log-target by a
  // constant; the chain must be identical
  const Posterior plain = standard_prior(2);
  auto constant_model = std::make_shared<const ForwardModel>(ForwardModel::blackbox(
      [](const Vector&) { return Vector::Constant(1, 3.0); }, nodal(2), nodal(1),
      /*raw_parameter=*/true));
  std::vector<Posterior::LikelihoodTerm> terms;
  terms.push_back({constant_model, Vector::Constant(1, 1.0), 0.7, "y"});
  const Posterior shifted(std::make_shared<GaussianIID>("x", Vector::Zero(2), 1.0),
                          std::move(terms));

  ChainConfig config;
  config.n_samples = 3000;
  config.seed = 11;
  CHECK(mh_sample(plain, config).samples == mh_sample(shifted, config).samples);
  CHECK(cwmh_sample(plain, config).samples == cwmh_sample(shifted, config).samples);
}

TEST_CASE("cwmh matches per-component variances and acceptance targets") {
  const Posterior target = gaussian_target_2d_var14();
  ChainConfig config;
  config.n_samples = 50000;
  config.seed = 3;
  const ChainResult result = cwmh_sample(target, config);
  for (Index d = 0; d < 2; ++d) {
    const double m = result.samples.row(d).mean();
    const double v = result.samples.row(d).array().square().mean() - m * m;
    const double expected = d == 0 ? 1.0 : 4.0;
    CHECK(std::abs(v - expected) / expected < 0.15);
    CHECK(result.component_acceptance[d] > 0.13);
    CHECK(result.component_acceptance[d] < 0.33);
  }
  CHECK(result.samples.allFinite());
}

TEST_CASE("one-dimensional cwmh is statistically the mh kernel") {
  const Posterior target = gaussian_target(Vector::Zero(1), 1.0);
  ChainConfig config;
  config.n_samples = 100000;
  config.seed = 17;
  const ChainResult mh = mh_sample(target, config);
  config.seed = 18;
  const ChainResult cw = cwmh_sample(target, config);
  std::vector<double> a(mh.samples.data(), mh.samples.data() + mh.samples.size());
  std::vector<double> b(cw.samples.data(), cw.samples.data() + cw.samples.size());
  CHECK(oracles::ks_statistic(a, b) < 0.02);
}

TEST_CASE("pcn requires a standard gaussian prior") {
  const Posterior shifted = gaussian_target(Vector::Constant(2, 1.0), 1.0);
  ChainConfig config;
  config.n_samples = 100;
  CHECK_THROWS_WITH_AS(pcn_sample(shifted, config),
                       doctest::Contains("standard Gaussian prior"), Error);
  const Posterior wide = gaussian_target(Vector::Zero(2), 2.0);
  CHECK_THROWS_AS(pcn_sample(wide, config), Error);
}

TEST_CASE("pcn with constant likelihood reproduces the prior") {
  const Posterior target = standard_prior(10);
  ChainConfig config;
  config.n_samples = 100000;
  config.seed = 2024;
  const ChainResult result = pcn_sample(target, config);
  for (Index d = 0; d < 10; ++d) {
    const double m = result.samples.row(d).mean();
    const double v = result.samples.row(d).array().square().mean() - m * m;
    CHECK(std::abs(m) <= 0.05);
    CHECK(v >= 0.9);
    CHECK(v <= 1.1);
  }
  CHECK(result.acceptance_rate == 1.0);  // likelihood ratio is always 1
}

TEST_CASE("pcn at beta = 1 draws i.i.d. prior samples") {
  const Posterior target = standard_prior(2);
  ChainConfig config;
  config.n_samples = 100000;
  config.n_burn = 0;  // no adaptation: beta stays at 1
  config.initial_scale = 1.0;
  config.seed = 5;
  const ChainResult result = pcn_sample(target, config);
  CHECK(result.final_scale[0] == 1.0);
  for (Index d = 0; d < 2; ++d) {
    const auto row = result.samples.row(d);
    const double m = row.mean();
    double lag1 = 0.0, var = 0.0;
    for (Index c = 0; c + 1 < row.size(); ++c) {
      lag1 += (row[c] - m) * (row[c + 1] - m);
    }
    for (Index c = 0; c < row.size(); ++c) var += (row[c] - m) * (row[c] - m);
    CHECK(std::abs(lag1 / var) <= 0.02);
  }
}

TEST_CASE("pcn matches the conjugate posterior of a linear model") {
  Matrix a(5, 3);
  a << 1.0, 0.2, -0.5, 0.0, 1.5, 0.3, -0.7, 0.1, 1.0, 0.4, -0.2, 0.8, 0.6, 0.9, -1.1;
  const double sdev = 0.5;
  const Vector x_true = oracles::random_vector(3, 61);
  const Vector y_obs = a * x_true + 0.1 * oracles::random_vector(5, 62);
  const auto oracle = oracles::conjugate_posterior(a, Vector::Zero(5), y_obs, sdev);

  std::vector<Posterior::LikelihoodTerm> terms;
  terms.push_back({linear_model(a), y_obs, sdev, "y"});
  const Posterior posterior(std::make_shared<GaussianIID>("x", Vector::Zero(3), 1.0),
                            std::move(terms));
  ChainConfig config;
  config.n_samples = 50000;
  config.seed = 77;
  const ChainResult result = pcn_sample(posterior, config);
  const Samples samples = result.to_samples(nullptr);
  const Vector m = mean(samples);
  const Vector v = variance(samples);
  const Vector n_eff = ess(samples);
  for (Index d = 0; d < 3; ++d) {
    const double se = std::sqrt(oracle.cov(d, d) / n_eff[d]);
    CHECK(std::abs(m[d] - oracle.mean[d]) <= 3.0 * se);
    CHECK(std::abs(v[d] - oracle.cov(d, d)) / oracle.cov(d, d) <= 0.25);
  }
}

TEST_CASE("detailed balance between two half-spaces") {
  const Posterior target = gaussian_target(Vector::Zero(1), 1.0);
  ChainConfig config;
  config.n_samples = 200000;
  config.seed = 10;
  const ChainResult result = mh_sample(target, config);
  Index up = 0, down = 0;
  for (Index c = 0; c + 1 < result.samples.cols(); ++c) {
    const bool before = result.samples(0, c) >= 0.0;
    const bool after = result.samples(0, c + 1) >= 0.0;
    if (!before && after) ++up;
    if (before && !after) ++down;
  }
  const double diff = std::abs(static_cast<double>(up) - static_cast<double>(down));
  CHECK(diff <= 3.0 * std::sqrt(static_cast<double>(up + down)));
}

TEST_CASE("adaptation is frozen after burn-in") {
  const Posterior target = gaussian_target(Vector::Zero(2), 1.0);
  ChainConfig config;
  config.n_samples = 5000;
  config.n_burn = 0;
  config.initial_scale = 0.37;
  config.seed = 1;
  CHECK(mh_sample(target, config).final_scale[0] == 0.37);
  CHECK(cwmh_sample(target, config).final_scale == Vector::Constant(2, 0.37));
}

TEST_CASE("non-finite start is rejected with a clear error") {
  auto nan_model = std::make_shared<const ForwardModel>(ForwardModel::blackbox(
      [](const Vector&) {
        return Vector::Constant(1, std::numeric_limits<double>::quiet_NaN());
      },
      nodal(2), nodal(1), /*raw_parameter=*/true));
  std::vector<Posterior::LikelihoodTerm> terms;
  terms.push_back({nan_model, Vector::Zero(1), 1.0, "y"});
  const Posterior posterior(std::make_shared<GaussianIID>("x", Vector::Zero(2), 1.0),
                            std::move(terms));
  ChainConfig config;
  config.n_samples = 10;
  CHECK_THROWS_WITH_AS(mh_sample(posterior, config), doctest::Contains("non-finite"), Error);
}

TEST_CASE("unknown sampler name lists the supported set") {
  const Posterior target = standard_prior(1);
  ChainConfig config;
  CHECK_THROWS_WITH_AS(sample_posterior("nuts", target, config),
                       doctest::Contains("mh, cwmh, pcn"), Error);
}
