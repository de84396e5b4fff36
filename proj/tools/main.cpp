#include "uqpde/cliapp.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

namespace {

using nlohmann::json;

struct FlagSet {
  CLI::App* cmd;
  json flags = json::object();
  std::string config_path;

  template <typename T>
  void option(const std::string& name, const std::string& key, const std::string& help) {
    auto setter = [this, key](const T& value) { flags[key] = value; };
    cmd->add_option_function<T>(name, setter, help);
  }

  void flag(const std::string& name, const std::string& key, const std::string& help) {
    auto setter = [this, key](std::int64_t count) {
      if (count > 0) flags[key] = true;
    };
    cmd->add_flag_function(name, setter, help);
  }

  void common() {
    option<std::string>("--sampler", "sampler.id", "sampler: mh, cwmh or pcn");
    option<std::int64_t>("--samples", "sampler.n_samples", "number of kept samples");
    option<std::int64_t>("--burn", "sampler.n_burn", "burn-in iterations (default samples/5)");
    option<std::int64_t>("--seed", "sampler.seed", "random seed");
    option<std::int64_t>("--chains", "sampler.chains", "independent chains (parallel threads)");
    option<double>("--ci", "sampler.ci", "credibility interval percent (default 95)");
    option<std::string>("--output", "output.dir",
                        "output directory (default $UQPDE_OUTPUT_DIR/<problem>)");
    option<std::string>("--kl-cache", "output.kl_cache", "directory for cached eigenbases");
    flag("--dump-mesh", "output.dump_mesh", "export the mesh as mesh.txt");
    flag("--quiet", "output.quiet", "suppress progress output");
    cmd->add_option("--config", config_path, "JSON config file with flat keys");
  }
};

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in.good()) throw uqpde::ConfigError("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw uqpde::ConfigError("config file " + path + ": " + e.what());
  }
}

int run_problem(const std::string& problem, const FlagSet& flags) {
  uqpde::RunConfig config =
      uqpde::validate_config(problem, flags.flags, load_config_file(flags.config_path));
  uqpde::run(config);
  std::cout << "wrote " << config.output_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PDE-based Bayesian inversion: build a problem, sample the posterior, export "
               "data, statistics and plots"};
  app.require_subcommand(1);

  FlagSet heat{app.add_subcommand("heat1d", "1D heat initial-condition inversion")};
  heat.common();
  heat.option<double>("--noise", "problem.noise_level", "relative noise level");
  heat.option<std::string>("--variant", "problem.variant", "step3 or kl20");
  heat.option<double>("--tau-max", "problem.tau_max", "final time");
  heat.option<std::string>("--obs", "problem.obs", "observation window: full or half");
  heat.option<std::int64_t>("--n-grid", "problem.n_grid", "interior grid nodes");
  heat.option<std::int64_t>("--n-tau", "problem.n_tau", "time points (0 = automatic)");
  heat.option<std::string>("--scheme", "problem.scheme", "explicit_euler or implicit_euler");

  FlagSet poisson{app.add_subcommand("poisson2d", "2D Poisson log-conductivity inversion")};
  poisson.common();
  poisson.option<double>("--noise", "problem.noise_level", "relative noise level");
  poisson.option<std::int64_t>("--mesh-dim", "problem.mesh_dim", "square mesh cells per side");
  poisson.option<std::int64_t>("--n-kl", "problem.num_terms", "KL truncation");
  poisson.option<double>("--length-scale", "problem.length_scale", "Matern length scale");
  poisson.option<double>("--nu", "problem.smoothness", "Matern smoothness");

  FlagSet eit{app.add_subcommand("eit", "electrical impedance tomography (unit disk)")};
  eit.common();
  eit.option<double>("--noise", "problem.noise_level", "relative noise level");
  eit.option<std::int64_t>("--rings", "problem.n_rings", "mesh rings");
  eit.option<std::int64_t>("--sectors", "problem.n_sectors", "mesh sectors / boundary size");
  eit.option<std::int64_t>("--n-kl", "problem.num_terms", "KL truncation");
  eit.option<double>("--length-scale", "problem.length_scale", "Matern length scale");
  eit.option<double>("--nu", "problem.smoothness", "Matern smoothness");
  eit.option<std::string>("--truth", "problem.truth", "three_circles or one_circle");

  FlagSet pat{app.add_subcommand("pat", "photoacoustic initial-pressure inversion")};
  pat.common();
  pat.option<std::string>("--data", "problem.data", "full or partial sensor data");
  pat.option<std::int64_t>("--n-g", "problem.n_g", "initial-pressure nodes");
  pat.option<std::int64_t>("--n-kl", "problem.num_terms", "KL truncation");
  pat.option<double>("--length-scale", "problem.length_scale", "Matern length scale");
  pat.option<double>("--nu", "problem.smoothness", "Matern smoothness");
  pat.option<double>("--prior-scale", "problem.prior_scale", "field scaling factor");
  pat.option<double>("--s-noise", "problem.s_noise", "absolute noise sdev");
  pat.option<std::int64_t>("--frequency", "problem.frequency", "measurements per unit time");
  pat.option<std::string>("--truth", "problem.truth", "prior_draw or two_bumps");

  auto* plot = app.add_subcommand("plot", "re-render plots and stats from a saved run");
  std::string plot_input;
  plot->add_option("--input", plot_input, "run directory with meta.json and samples.csv")
      ->required();

  try {
    app.parse(argc, argv);
    if (heat.cmd->parsed()) return run_problem("heat1d", heat);
    if (poisson.cmd->parsed()) return run_problem("poisson2d", poisson);
    if (eit.cmd->parsed()) return run_problem("eit", eit);
    if (pat.cmd->parsed()) return run_problem("pat", pat);
    if (plot->parsed()) {
      uqpde::run_plot(plot_input);
      std::cout << "updated " << plot_input << "\n";
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const uqpde::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
