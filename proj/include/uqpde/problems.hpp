#ifndef UQPDE_PROBLEMS_HPP
#define UQPDE_PROBLEMS_HPP

#include "uqpde/distributions.hpp"
#include "uqpde/model.hpp"
#include "uqpde/types.hpp"

#include <json.hpp>

#include <memory>
#include <string>
#include <vector>

namespace uqpde {

/// Ready-to-sample inverse problem: forward model(s), prior and data
/// densities, synthesized truth and noisy data, the conditioned posterior
/// and the recommended sampler.
struct ProblemBundle {
  std::string name;
  std::vector<std::shared_ptr<const ForwardModel>> models;
  std::shared_ptr<const GaussianIID> prior;
  std::vector<std::shared_ptr<const GaussianIID>> data_densities;

  Vector truth_parameter;           // empty when the truth has no coefficient vector
  Vector truth_field;               // function-space truth
  std::vector<Vector> y_exact;
  std::vector<Vector> y_obs;
  std::vector<double> s_noise;      // recorded per dataset

  std::shared_ptr<const JointDensity> joint;
  std::shared_ptr<const Posterior> posterior;
  std::string recommended_sampler;  // mh | cwmh | pcn

  nlohmann::json descriptor;        // options echo and derived quantities
};

struct Heat1DOptions {
  enum class Variant { Step3, Kl20 };
  enum class Observation { Full, Half };

  Variant variant = Variant::Step3;
  double tau_max = 0.01;
  double noise_level = 0.10;
  Observation obs = Observation::Full;
  Index n_grid = 100;       // interior nodes of (0,1)
  Index n_tau = 0;          // 0: keep the default step length (224 intervals per 0.01)
  double conductivity = 1.0;
  TimeScheme scheme = TimeScheme::ExplicitEuler;
  std::uint64_t seed = 0;
};

ProblemBundle build_heat1d(const Heat1DOptions& options);

/// Initial condition used as the kl20 truth: a raised cosine plus two narrow
/// Gaussian bumps at 0.5 and 0.8, scaled by 1/30.
double heat1d_custom_initial(double xi);

struct Poisson2DOptions {
  int mesh_nx = 32, mesh_ny = 32;
  int num_terms = 32;
  double length_scale = 0.1;
  double smoothness = 2.0;
  double noise_level = 0.01;
  std::uint64_t seed = 0;
  std::string kl_cache_dir;
};

ProblemBundle build_poisson2d(const Poisson2DOptions& options);

struct EitOptions {
  enum class Truth { ThreeCircles, OneCircle };

  int n_rings = 8, n_sectors = 94;
  int num_terms = 64;
  double length_scale = 0.2;
  double smoothness = 1.0;
  double noise_level = 0.05;
  Truth truth = Truth::ThreeCircles;
  double sigma_low = 1.0, sigma_high = 10.0;
  int num_frequencies = 4;
  std::uint64_t seed = 0;
  std::string kl_cache_dir;
};

ProblemBundle build_eit(const EitOptions& options);

struct PatOptions {
  enum class Data { Full, Partial };
  enum class Truth { PriorDraw, TwoBumps };

  Data data = Data::Full;
  int n_g = 121;
  int num_terms = 100;
  double length_scale = 0.1;
  double smoothness = 0.75;
  double prior_scale = 15.0;
  double s_noise = 0.125;      // absolute noise level
  int frequency = 250;         // measurements per unit time
  Truth truth = Truth::PriorDraw;
  std::uint64_t seed = 0;
  std::string kl_cache_dir;
};

ProblemBundle build_pat(const PatOptions& options);

/// The black-box PAT forward map alone (leapfrog wave solve on [-1, 2] with
/// zero extension, sensors at 0 and 1); exposed for direct testing.
Vector pat_forward(const Vector& g_nodal, int n_g, int frequency, bool full_data);

}  // namespace uqpde

#endif
