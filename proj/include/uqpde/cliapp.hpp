#ifndef UQPDE_CLIAPP_HPP
#define UQPDE_CLIAPP_HPP

#include "uqpde/problems.hpp"
#include "uqpde/types.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace uqpde {

/// Invalid configuration (exit code 1, vs 2 for numerical failures).
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string problem;
  Heat1DOptions heat;
  Poisson2DOptions poisson;
  EitOptions eit;
  PatOptions pat;

  std::string sampler;  // empty: use the problem's recommended sampler
  Index n_samples = 5000;
  std::optional<Index> n_burn;
  std::uint64_t seed = 0;
  int chains = 1;
  double ci_percent = 95.0;

  std::string output_dir;
  bool dump_mesh = false;
  std::string kl_cache;
  bool quiet = false;

  nlohmann::json echo;  // merged flat config, written to meta.json
};

/// Merge flag values over config-file values over defaults, reject unknown
/// keys, and range-check every entry. Both inputs are flat JSON objects with
/// keys like "problem.noise_level" or "sampler.n_samples".
RunConfig validate_config(const std::string& problem, const nlohmann::json& flags,
                          const nlohmann::json& file_config);

ProblemBundle build_problem(const RunConfig& config);

/// Full pipeline: build the problem, sample (one chain per thread), write
/// data/samples/stats CSVs, meta.json and SVG plots into output_dir.
/// Partial outputs are removed on failure.
void run(const RunConfig& config);

/// Re-render stats and plots from a saved run directory (meta.json carries
/// the full config echo, so the problem is rebuilt deterministically).
void run_plot(const std::string& input_dir);

}  // namespace uqpde

#endif
