#include "uqpde/samplers.hpp"

#include "uqpde/rng.hpp"

#include <cmath>

namespace uqpde {

namespace {

constexpr Index kWindow = 100;

struct AdaptationWindow {
  Index proposals = 0;
  Index accepts = 0;
  Index window_index = 0;  // 1-based once the first window completes

  // Robbins-Monro: scale *= exp((rate - target)/sqrt(window)); returns the
  // window rate when a window just completed.
  std::optional<double> record(bool accepted, bool adapting, double target, double& scale) {
    proposals++;
    if (accepted) accepts++;
    if (proposals < kWindow) return std::nullopt;
    const double rate = static_cast<double>(accepts) / static_cast<double>(proposals);
    window_index++;
    if (adapting) {
      scale *= std::exp((rate - target) / std::sqrt(static_cast<double>(window_index)));
    }
    proposals = 0;
    accepts = 0;
    return rate;
  }
};

Vector initial_point(const Posterior& posterior, const ChainConfig& config) {
  Vector x0 = config.x0 ? *config.x0 : Vector::Zero(posterior.dim());
  require_dim(posterior.dim(), x0.size(), "sampler x0");
  return x0;
}

void report_progress(const ChainConfig& config, Index iteration, Index total) {
  if (config.progress && iteration % std::max<Index>(1, config.progress_every) == 0) {
    config.progress(iteration, total);
  }
}

bool accept_log_ratio(double log_ratio, Rng& rng) {
  if (log_ratio >= 0.0) return true;
  return std::log(rng.uniform()) < log_ratio;  // NaN compares false: reject
}

}  // namespace

Samples ChainResult::to_samples(GeometryPtr geometry) const {
  SamplesMeta meta;
  meta.sampler = algorithm;
  meta.seed = seed;
  meta.rng = Rng::algorithm();
  meta.acceptance_rate = acceptance_rate;
  meta.target_acceptance = target_acceptance;
  return Samples(samples, std::move(geometry), std::move(meta));
}

ChainResult mh_sample(const Posterior& posterior, const ChainConfig& config) {
  require(config.n_samples > 0, "mh_sample: n_samples must be positive");
  const Index n = posterior.dim();
  const Index n_burn = config.burn();
  const Index total = n_burn + config.n_samples;
  const double target = config.target_acceptance.value_or(0.234);
  require(target > 0.0 && target < 1.0, "mh_sample: target acceptance must be in (0,1)");

  Rng rng(config.seed);
  Vector x = initial_point(posterior, config);
  double lp = posterior.logpdf(x);
  require(std::isfinite(lp), "mh_sample: non-finite logpdf at x0");

  double scale = config.initial_scale.value_or(2.38 / std::sqrt(static_cast<double>(n)));
  ChainResult result;
  result.samples.resize(n, config.n_samples);
  result.seed = config.seed;
  result.algorithm = "mh";
  result.target_acceptance = target;

  AdaptationWindow window;
  Index kept_accepts = 0;
  for (Index it = 0; it < total; ++it) {
    const bool adapting = it < n_burn;
    const Vector proposal = x + scale * rng.normal_vector(n);
    const double lp_proposal = posterior.logpdf(proposal);
    const bool accepted = accept_log_ratio(lp_proposal - lp, rng);
    if (accepted) {
      x = proposal;
      lp = lp_proposal;
    }
    if (auto rate = window.record(accepted, adapting, target, scale)) {
      result.window_acceptance.push_back(*rate);
    }
    if (!adapting) {
      result.samples.col(it - n_burn) = x;
      if (accepted) kept_accepts++;
    }
    report_progress(config, it + 1, total);
  }
  result.acceptance_rate = static_cast<double>(kept_accepts) /
                           static_cast<double>(config.n_samples);
  result.final_scale = Vector::Constant(1, scale);
  return result;
}

ChainResult cwmh_sample(const Posterior& posterior, const ChainConfig& config) {
  require(config.n_samples > 0, "cwmh_sample: n_samples must be positive");
  const Index n = posterior.dim();
  const Index n_burn = config.burn();
  const Index total = n_burn + config.n_samples;
  const double target = config.target_acceptance.value_or(0.23);
  require(target > 0.0 && target < 1.0, "cwmh_sample: target acceptance must be in (0,1)");

  Rng rng(config.seed);
  Vector x = initial_point(posterior, config);
  double lp = posterior.logpdf(x);
  require(std::isfinite(lp), "cwmh_sample: non-finite logpdf at x0");

  Vector scale = Vector::Constant(n, config.initial_scale.value_or(1.0));
  std::vector<AdaptationWindow> windows(static_cast<std::size_t>(n));
  Eigen::VectorXi kept_accepts = Eigen::VectorXi::Zero(n);

  ChainResult result;
  result.samples.resize(n, config.n_samples);
  result.seed = config.seed;
  result.algorithm = "cwmh";
  result.target_acceptance = target;

  for (Index it = 0; it < total; ++it) {
    const bool adapting = it < n_burn;
    // one sweep: sequential single-coordinate proposals, accepted independently
    for (Index d = 0; d < n; ++d) {
      Vector proposal = x;
      proposal[d] += scale[d] * rng.normal();
      const double lp_proposal = posterior.logpdf(proposal);
      const bool accepted = accept_log_ratio(lp_proposal - lp, rng);
      if (accepted) {
        x = proposal;
        lp = lp_proposal;
        if (!adapting) kept_accepts[d]++;
      }
      if (auto rate = windows[static_cast<std::size_t>(d)].record(accepted, adapting, target,
                                                                  scale[d])) {
        if (d == 0) result.window_acceptance.push_back(*rate);
      }
    }
    if (!adapting) result.samples.col(it - n_burn) = x;
    report_progress(config, it + 1, total);
  }
  result.component_acceptance =
      kept_accepts.cast<double>() / static_cast<double>(config.n_samples);
  result.acceptance_rate = result.component_acceptance.mean();
  result.final_scale = scale;
  return result;
}

ChainResult pcn_sample(const Posterior& posterior, const ChainConfig& config) {
  require(config.n_samples > 0, "pcn_sample: n_samples must be positive");
  const GaussianIID& prior = posterior.prior();
  require(!prior.has_model_mean() && prior.fixed_mean().cwiseAbs().maxCoeff() == 0.0 &&
              prior.sdev() == 1.0,
          "pCN requires standard Gaussian prior (zero mean, unit sdev)");

  const Index n = posterior.dim();
  const Index n_burn = config.burn();
  const Index total = n_burn + config.n_samples;
  const double target = config.target_acceptance.value_or(0.30);
  require(target > 0.0 && target < 1.0, "pcn_sample: target acceptance must be in (0,1)");

  Rng rng(config.seed);
  Vector x = initial_point(posterior, config);
  double ll = posterior.loglik(x);
  require(std::isfinite(posterior.prior_logpdf(x) + ll), "pcn_sample: non-finite logpdf at x0");

  double beta = std::min(1.0, config.initial_scale.value_or(0.2));
  ChainResult result;
  result.samples.resize(n, config.n_samples);
  result.seed = config.seed;
  result.algorithm = "pcn";
  result.target_acceptance = target;

  AdaptationWindow window;
  Index kept_accepts = 0;
  for (Index it = 0; it < total; ++it) {
    const bool adapting = it < n_burn;
    const Vector proposal =
        std::sqrt(1.0 - beta * beta) * x + beta * rng.normal_vector(n);
    const double ll_proposal = posterior.loglik(proposal);
    // prior-preserving proposal: the acceptance ratio is likelihood-only
    const bool accepted = accept_log_ratio(ll_proposal - ll, rng);
    if (accepted) {
      x = proposal;
      ll = ll_proposal;
    }
    if (auto rate = window.record(accepted, adapting, target, beta)) {
      result.window_acceptance.push_back(*rate);
      beta = std::min(beta, 1.0);
    }
    if (!adapting) {
      result.samples.col(it - n_burn) = x;
      if (accepted) kept_accepts++;
    }
    report_progress(config, it + 1, total);
  }
  result.acceptance_rate = static_cast<double>(kept_accepts) /
                           static_cast<double>(config.n_samples);
  result.final_scale = Vector::Constant(1, beta);
  return result;
}

ChainResult sample_posterior(const std::string& algorithm, const Posterior& posterior,
                             const ChainConfig& config) {
  if (algorithm == "mh") return mh_sample(posterior, config);
  if (algorithm == "cwmh") return cwmh_sample(posterior, config);
  if (algorithm == "pcn") return pcn_sample(posterior, config);
  throw Error("unknown sampler '" + algorithm + "'; supported samplers: mh, cwmh, pcn");
}

}  // namespace uqpde
