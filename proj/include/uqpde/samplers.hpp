#ifndef UQPDE_SAMPLERS_HPP
#define UQPDE_SAMPLERS_HPP

#include "uqpde/distributions.hpp"
#include "uqpde/samples.hpp"
#include "uqpde/types.hpp"

#include <functional>
#include <optional>

namespace uqpde {

struct ChainConfig {
  Index n_samples = 1000;
  std::optional<Index> n_burn;    // default n_samples / 5
  std::uint64_t seed = 0;
  std::optional<Vector> x0;       // default zero vector
  std::optional<double> target_acceptance;  // per-algorithm default
  std::optional<double> initial_scale;      // proposal scale / pCN beta before adaptation

  std::function<void(Index iteration, Index total)> progress;
  Index progress_every = 1000;

  Index burn() const { return n_burn ? *n_burn : n_samples / 5; }
};

struct ChainResult {
  Matrix samples;                      // n_dim x n_samples, post burn-in
  double acceptance_rate = 0.0;        // post burn-in
  std::vector<double> window_acceptance;  // per 100-iteration window, whole run
  Vector component_acceptance;         // cwmh only: per-component, post burn-in
  Vector final_scale;                  // adapted scale(s); single entry for mh/pcn
  std::uint64_t seed = 0;
  std::string algorithm;
  double target_acceptance = 0.0;

  Samples to_samples(GeometryPtr geometry) const;
};

/// Random-walk Metropolis-Hastings with a global Gaussian proposal; the scale
/// adapts toward a 0.234 acceptance rate during burn-in (multiplied by
/// exp((rate - target)/sqrt(window)) per 100-iteration window) and is frozen
/// afterwards.
ChainResult mh_sample(const Posterior& posterior, const ChainConfig& config);

/// Component-wise Metropolis-Hastings: one sweep of sequential
/// single-coordinate proposals per stored sample, per-component scales
/// adapted toward 0.23.
ChainResult cwmh_sample(const Posterior& posterior, const ChainConfig& config);

/// Preconditioned Crank-Nicolson: x' = sqrt(1-b^2) x + b xi, accepted on the
/// likelihood ratio alone. Requires a zero-mean unit-variance Gaussian
/// prior; beta adapts toward 0.30 during burn-in.
ChainResult pcn_sample(const Posterior& posterior, const ChainConfig& config);

/// Dispatch by name: "mh", "cwmh" or "pcn".
ChainResult sample_posterior(const std::string& algorithm, const Posterior& posterior,
                             const ChainConfig& config);

}  // namespace uqpde

#endif
