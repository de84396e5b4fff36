#ifndef UQPDE_SAMPLES_HPP
#define UQPDE_SAMPLES_HPP

#include "uqpde/geometry.hpp"
#include "uqpde/types.hpp"

#include <json.hpp>

#include <limits>
#include <string>

namespace uqpde {

struct SamplesMeta {
  std::string sampler;
  std::uint64_t seed = 0;
  std::string rng;
  double acceptance_rate = std::numeric_limits<double>::quiet_NaN();
  double target_acceptance = std::numeric_limits<double>::quiet_NaN();
};

/// Immutable container of posterior (or prior) draws: one column per sample,
/// with the geometry that interprets rows as expansion coefficients.
class Samples {
 public:
  Samples(Matrix values, GeometryPtr geometry, SamplesMeta meta = {});

  const Matrix& values() const { return values_; }
  Index dim() const { return values_.rows(); }
  Index count() const { return values_.cols(); }
  const GeometryPtr& geometry() const { return geometry_; }
  const SamplesMeta& meta() const { return meta_; }

  Samples select(const std::vector<Index>& columns) const;
  Samples thin(Index stride) const;

 private:
  Matrix values_;
  GeometryPtr geometry_;
  SamplesMeta meta_;
};

Vector mean(const Samples& samples);
/// Unbiased per-dimension variance; errors on a single sample.
Vector variance(const Samples& samples);

struct CiBands {
  Vector lower, upper, mean;
  double percent = 0.0;
};

/// Per-dimension empirical credibility interval at the given percent, with
/// the linear-interpolation quantile rule.
CiBands ci(const Samples& samples, double percent);

/// Maps every sample through the geometry's par2fun; the result carries the
/// function-value geometry, so statistics on it are function-space
/// statistics (required under nonlinear maps).
Samples funvals(const Samples& samples);

/// Per-dimension effective sample size via initial-positive-sequence
/// truncation of the autocorrelation; a constant chain reports 1.
Vector ess(const Samples& samples);

/// Writes samples.csv (one row per sample), stats.csv (per-dimension
/// mean/variance/CI bounds) and meta.json into the directory.
void export_samples(const Samples& samples, const std::string& dir, double ci_percent = 95.0);

/// Reads samples.csv + meta.json back; pass the geometry if the caller can
/// reconstruct it (import alone cannot rebuild eigenbases).
Samples import_samples(const std::string& dir, GeometryPtr geometry = nullptr);

}  // namespace uqpde

#endif
