#include "uqpde/cliapp.hpp"

#include "uqpde/samplers.hpp"
#include "uqpde/svgplot.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

namespace uqpde {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kProblems = {"heat1d", "poisson2d", "eit", "pat"};

const std::set<std::string> kCommonKeys = {
    "sampler.id",  "sampler.n_samples", "sampler.n_burn", "sampler.seed",
    "sampler.chains", "sampler.ci",     "output.dir",     "output.dump_mesh",
    "output.kl_cache", "output.quiet",  "problem.name",
};

std::set<std::string> problem_keys(const std::string& problem) {
  std::set<std::string> keys = kCommonKeys;
  auto add = [&keys](std::initializer_list<const char*> names) {
    for (const char* n : names) keys.insert(std::string("problem.") + n);
  };
  if (problem == "heat1d") {
    add({"variant", "tau_max", "noise_level", "obs", "n_grid", "n_tau", "scheme"});
  } else if (problem == "poisson2d") {
    add({"mesh_dim", "num_terms", "length_scale", "smoothness", "noise_level"});
  } else if (problem == "eit") {
    add({"n_rings", "n_sectors", "num_terms", "length_scale", "smoothness", "noise_level",
         "truth"});
  } else if (problem == "pat") {
    add({"data", "n_g", "num_terms", "length_scale", "smoothness", "prior_scale", "s_noise",
         "frequency", "truth"});
  }
  return keys;
}

class FlatConfig {
 public:
  FlatConfig(const std::string& problem, const nlohmann::json& flags,
             const nlohmann::json& file_config) {
    const std::set<std::string> allowed = problem_keys(problem);
    auto fold = [&](const nlohmann::json& src, const char* origin) {
      if (src.is_null()) return;
      if (!src.is_object()) throw ConfigError(std::string(origin) + ": expected a JSON object");
      for (const auto& [key, value] : src.items()) {
        if (!allowed.count(key)) {
          throw ConfigError(std::string(origin) + ": unknown key '" + key + "' for problem '" +
                            problem + "'");
        }
        if (!merged_.contains(key)) merged_[key] = value;
      }
    };
    fold(flags, "flags");        // flags win
    fold(file_config, "config file");
    merged_["problem.name"] = problem;
  }

  const nlohmann::json& merged() const { return merged_; }

  double number(const std::string& key, double fallback, double lo, double hi,
                const std::string& range_text) const {
    if (!merged_.contains(key)) return fallback;
    const auto& v = merged_.at(key);
    if (!v.is_number()) throw ConfigError(key + " must be a number (" + range_text + ")");
    const double x = v.get<double>();
    if (x < lo || x > hi) throw ConfigError(key + " must be " + range_text);
    return x;
  }

  Index integer(const std::string& key, Index fallback, Index lo, Index hi,
                const std::string& range_text) const {
    if (!merged_.contains(key)) return fallback;
    const auto& v = merged_.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
      throw ConfigError(key + " must be an integer (" + range_text + ")");
    }
    const Index x = v.get<Index>();
    if (x < lo || x > hi) throw ConfigError(key + " must be " + range_text);
    return x;
  }

  std::string choice(const std::string& key, const std::string& fallback,
                     const std::set<std::string>& allowed) const {
    if (!merged_.contains(key)) return fallback;
    const auto& v = merged_.at(key);
    std::string value = v.is_string() ? v.get<std::string>() : v.dump();
    if (!allowed.count(value)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ConfigError(key + " must be one of: " + list + " (got '" + value + "')");
    }
    return value;
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!merged_.contains(key)) return fallback;
    const auto& v = merged_.at(key);
    if (!v.is_boolean()) throw ConfigError(key + " must be a boolean");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    if (!merged_.contains(key)) return fallback;
    const auto& v = merged_.at(key);
    if (!v.is_string()) throw ConfigError(key + " must be a string");
    return v.get<std::string>();
  }

  bool has(const std::string& key) const { return merged_.contains(key); }

 private:
  nlohmann::json merged_ = nlohmann::json::object();
};

std::string default_output_dir(const std::string& problem) {
  const char* root = std::getenv("UQPDE_OUTPUT_DIR");
  return (root ? std::string(root) : std::string("uqpde_out")) + "/" + problem;
}

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Index kMaxIndex = std::numeric_limits<Index>::max();

}  // namespace

RunConfig validate_config(const std::string& problem, const nlohmann::json& flags,
                          const nlohmann::json& file_config) {
  if (!kProblems.count(problem)) {
    throw ConfigError("unknown problem '" + problem +
                      "'; supported: heat1d, poisson2d, eit, pat");
  }
  const FlatConfig cfg(problem, flags, file_config);

  RunConfig run;
  run.problem = problem;
  run.sampler = cfg.choice("sampler.id", "", {"mh", "cwmh", "pcn"});
  run.n_samples = cfg.integer("sampler.n_samples", 5000, 1, kMaxIndex, ">= 1");
  if (cfg.has("sampler.n_burn")) {
    run.n_burn = cfg.integer("sampler.n_burn", 0, 0, kMaxIndex, ">= 0");
  }
  run.seed = static_cast<std::uint64_t>(
      cfg.integer("sampler.seed", 0, 0, kMaxIndex, ">= 0"));
  run.chains = static_cast<int>(cfg.integer("sampler.chains", 1, 1, 64, "between 1 and 64"));
  run.ci_percent = cfg.number("sampler.ci", 95.0, 1e-6, 100.0, "in (0, 100]");
  run.output_dir = cfg.text("output.dir", default_output_dir(problem));
  run.dump_mesh = cfg.flag("output.dump_mesh", false);
  run.kl_cache = cfg.text("output.kl_cache", "");
  run.quiet = cfg.flag("output.quiet", false);

  const double noise = cfg.number("problem.noise_level",
                                  problem == "poisson2d" ? 0.01 : (problem == "heat1d" ? 0.10
                                                                                       : 0.05),
                                  0.0, kInf, ">= 0");
  if (problem == "heat1d") {
    auto& h = run.heat;
    h.noise_level = noise;
    h.seed = run.seed;
    h.variant = cfg.choice("problem.variant", "step3", {"step3", "kl20"}) == "step3"
                    ? Heat1DOptions::Variant::Step3
                    : Heat1DOptions::Variant::Kl20;
    h.tau_max = cfg.number("problem.tau_max", 0.01, 1e-12, kInf, "> 0");
    h.obs = cfg.choice("problem.obs", "full", {"full", "half"}) == "full"
                ? Heat1DOptions::Observation::Full
                : Heat1DOptions::Observation::Half;
    h.n_grid = cfg.integer("problem.n_grid", 100, 2, 100000, "between 2 and 100000");
    h.n_tau = cfg.integer("problem.n_tau", 0, 0, 100000000, ">= 0 (0 = automatic)");
    h.scheme = cfg.choice("problem.scheme", "explicit_euler",
                          {"explicit_euler", "implicit_euler"}) == "explicit_euler"
                   ? TimeScheme::ExplicitEuler
                   : TimeScheme::ImplicitEuler;
  } else if (problem == "poisson2d") {
    auto& p = run.poisson;
    p.noise_level = noise;
    p.seed = run.seed;
    p.kl_cache_dir = run.kl_cache;
    const Index dim = cfg.integer("problem.mesh_dim", 32, 4, 512, "between 4 and 512");
    p.mesh_nx = p.mesh_ny = static_cast<int>(dim);
    p.num_terms = static_cast<int>(cfg.integer("problem.num_terms", 32, 1,
                                               (dim + 1) * (dim + 1), "<= number of mesh nodes"));
    p.length_scale = cfg.number("problem.length_scale", 0.1, 1e-12, kInf, "> 0");
    p.smoothness = cfg.number("problem.smoothness", 2.0, 1e-12, kInf, "> 0");
  } else if (problem == "eit") {
    auto& e = run.eit;
    e.noise_level = noise;
    e.seed = run.seed;
    e.kl_cache_dir = run.kl_cache;
    e.n_rings = static_cast<int>(cfg.integer("problem.n_rings", 8, 1, 512, "between 1 and 512"));
    e.n_sectors = static_cast<int>(
        cfg.integer("problem.n_sectors", 94, 3, 4096, "between 3 and 4096"));
    e.num_terms = static_cast<int>(
        cfg.integer("problem.num_terms", 64, 1, kMaxIndex, ">= 1"));
    e.length_scale = cfg.number("problem.length_scale", 0.2, 1e-12, kInf, "> 0");
    e.smoothness = cfg.number("problem.smoothness", 1.0, 1e-12, kInf, "> 0");
    e.truth = cfg.choice("problem.truth", "three_circles", {"three_circles", "one_circle"}) ==
                      "three_circles"
                  ? EitOptions::Truth::ThreeCircles
                  : EitOptions::Truth::OneCircle;
  } else if (problem == "pat") {
    auto& p = run.pat;
    p.seed = run.seed;
    p.kl_cache_dir = run.kl_cache;
    p.data = cfg.choice("problem.data", "full", {"full", "partial"}) == "full"
                 ? PatOptions::Data::Full
                 : PatOptions::Data::Partial;
    p.n_g = static_cast<int>(cfg.integer("problem.n_g", 121, 2, 100000, "between 2 and 100000"));
    p.num_terms = static_cast<int>(cfg.integer("problem.num_terms", 100, 1, 100000, ">= 1"));
    p.length_scale = cfg.number("problem.length_scale", 0.1, 1e-12, kInf, "> 0");
    p.smoothness = cfg.number("problem.smoothness", 0.75, 1e-12, kInf, "> 0");
    p.prior_scale = cfg.number("problem.prior_scale", 15.0, 1e-12, kInf, "> 0");
    p.s_noise = cfg.number("problem.s_noise", 0.125, 0.0, kInf, ">= 0");
    p.frequency = static_cast<int>(
        cfg.integer("problem.frequency", 250, 1, 100000, "between 1 and 100000"));
    p.truth = cfg.choice("problem.truth", "prior_draw", {"prior_draw", "two_bumps"}) ==
                      "prior_draw"
                  ? PatOptions::Truth::PriorDraw
                  : PatOptions::Truth::TwoBumps;
    if (cfg.has("problem.noise_level")) {
      throw ConfigError("problem.noise_level is not used by pat; set problem.s_noise");
    }
  }

  if (run.dump_mesh && (problem == "heat1d" || problem == "pat")) {
    throw ConfigError("output.dump_mesh: problem '" + problem + "' has no mesh");
  }
  run.echo = cfg.merged();
  return run;
}

ProblemBundle build_problem(const RunConfig& config) {
  if (config.problem == "heat1d") return build_heat1d(config.heat);
  if (config.problem == "poisson2d") return build_poisson2d(config.poisson);
  if (config.problem == "eit") return build_eit(config.eit);
  if (config.problem == "pat") return build_pat(config.pat);
  throw ConfigError("unknown problem '" + config.problem + "'");
}

namespace {

struct ArtifactWriter {
  std::string dir;
  std::vector<std::string> created;

  std::ofstream open(const std::string& relative) {
    const std::string path = dir + "/" + relative;
    fs::create_directories(fs::path(path).parent_path());
    std::ofstream out(path);
    require(out.good(), "run: cannot open " + path);
    created.push_back(path);
    return out;
  }

  void note(const std::string& relative) { created.push_back(dir + "/" + relative); }

  void remove_all() {
    for (const auto& path : created) {
      std::error_code ec;
      fs::remove(path, ec);
    }
  }
};

void write_data_csv(ArtifactWriter& writer, const ProblemBundle& bundle) {
  auto out = writer.open("data.csv");
  out.precision(17);
  out << "series,index,value\n";
  for (Index i = 0; i < bundle.truth_field.size(); ++i) {
    out << "truth_field," << (i + 1) << "," << bundle.truth_field[i] << "\n";
  }
  for (Index i = 0; i < bundle.truth_parameter.size(); ++i) {
    out << "truth_parameter," << (i + 1) << "," << bundle.truth_parameter[i] << "\n";
  }
  for (std::size_t k = 0; k < bundle.y_exact.size(); ++k) {
    for (Index i = 0; i < bundle.y_exact[k].size(); ++i) {
      out << "y_exact_" << (k + 1) << "," << (i + 1) << "," << bundle.y_exact[k][i] << "\n";
    }
    for (Index i = 0; i < bundle.y_obs[k].size(); ++i) {
      out << "y_obs_" << (k + 1) << "," << (i + 1) << "," << bundle.y_obs[k][i] << "\n";
    }
  }
  require(out.good(), "run: write failed for data.csv");
}

void write_stats_csv(ArtifactWriter& writer, const Samples& parameter_samples,
                     const Samples& function_samples, const Vector& parameter_ess,
                     double ci_percent) {
  auto out = writer.open("stats.csv");
  out.precision(17);
  out << "space,index,mean,variance,ci_lower,ci_upper,ess\n";
  auto emit = [&](const char* space, const Samples& s, const Vector* ess_values) {
    const Vector m = mean(s);
    const Vector v = s.count() >= 2 ? variance(s) : Vector::Zero(s.dim());
    const CiBands bands = ci(s, ci_percent);
    for (Index d = 0; d < s.dim(); ++d) {
      out << space << "," << (d + 1) << "," << m[d] << "," << v[d] << "," << bands.lower[d]
          << "," << bands.upper[d] << ",";
      if (ess_values) out << (*ess_values)[d];
      out << "\n";
    }
  };
  emit("parameter", parameter_samples, &parameter_ess);
  emit("function", function_samples, nullptr);
  require(out.good(), "run: write failed for stats.csv");
}

void write_plots(ArtifactWriter& writer, const ProblemBundle& bundle,
                 const Samples& parameter_samples, const Samples& function_samples,
                 double ci_percent) {
  const CiBands par_bands = ci(parameter_samples, ci_percent);
  const bool has_truth_par = bundle.truth_parameter.size() > 0;
  writer.note("plots/coefficient_ci.svg");
  svgplot::write_file(
      writer.dir + "/plots/coefficient_ci.svg",
      svgplot::coefficient_ci("coefficient mean and " + std::to_string(int(ci_percent)) + "% CI",
                              par_bands.mean, par_bands.lower, par_bands.upper,
                              has_truth_par ? &bundle.truth_parameter : nullptr));

  const auto& function_geometry = *function_samples.geometry();
  const auto* nodal = dynamic_cast<const NodalGeometry*>(&function_geometry);
  const CiBands fun_bands = ci(function_samples, ci_percent);

  if (nodal && nodal->is_mesh()) {
    const TriMesh& mesh = nodal->mesh();
    writer.note("plots/truth_field.svg");
    svgplot::write_file(writer.dir + "/plots/truth_field.svg",
                        svgplot::tri_heatmap("truth field", mesh, bundle.truth_field));
    writer.note("plots/mean_field.svg");
    svgplot::write_file(writer.dir + "/plots/mean_field.svg",
                        svgplot::tri_heatmap("posterior mean field", mesh, fun_bands.mean));
    writer.note("plots/variance_field.svg");
    const Vector var = function_samples.count() >= 2 ? variance(function_samples)
                                                     : Vector::Zero(function_samples.dim());
    svgplot::write_file(writer.dir + "/plots/variance_field.svg",
                        svgplot::tri_heatmap("posterior pointwise variance", mesh, var));
  } else if (nodal && nodal->is_grid1d()) {
    const Vector& x = nodal->grid().nodes();
    std::vector<svgplot::Series> series;
    if (bundle.truth_field.size() == x.size()) {
      series.push_back({"truth", bundle.truth_field, "#ff7f0e", false});
    }
    series.push_back({"posterior mean", fun_bands.mean, "#1f77b4", false});
    writer.note("plots/mean_ci.svg");
    svgplot::write_file(
        writer.dir + "/plots/mean_ci.svg",
        svgplot::line_plot("posterior mean and " + std::to_string(int(ci_percent)) + "% CI", x,
                           series, &fun_bands.lower, &fun_bands.upper,
                           std::to_string(int(ci_percent)) + "% CI"));
  }

  // observed vs exact data
  std::vector<svgplot::Series> data_series;
  Index data_len = bundle.y_exact.empty() ? 0 : bundle.y_exact[0].size();
  for (std::size_t k = 0; k < bundle.y_exact.size(); ++k) {
    if (bundle.y_exact[k].size() != data_len) data_len = std::min(data_len, bundle.y_exact[k].size());
  }
  if (data_len > 0) {
    const Vector idx = Vector::LinSpaced(data_len, 1.0, static_cast<double>(data_len));
    for (std::size_t k = 0; k < bundle.y_exact.size(); ++k) {
      const std::string suffix = bundle.y_exact.size() > 1 ? "_" + std::to_string(k + 1) : "";
      data_series.push_back({"y_exact" + suffix, bundle.y_exact[k].head(data_len), "", false});
      data_series.push_back({"y_obs" + suffix, bundle.y_obs[k].head(data_len), "", true});
    }
    writer.note("plots/data.svg");
    svgplot::write_file(writer.dir + "/plots/data.svg",
                        svgplot::line_plot("exact and observed data", idx, data_series));
  }
}

nlohmann::json ess_summary(const Vector& ess_values) {
  Vector sorted = ess_values;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  return {{"min", sorted[0]},
          {"median", sorted[sorted.size() / 2]},
          {"max", sorted[sorted.size() - 1]}};
}

}  // namespace

void run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();

  // build + sample first; files are only written once everything succeeded
  ProblemBundle bundle = build_problem(config);
  const std::string sampler =
      config.sampler.empty() ? bundle.recommended_sampler : config.sampler;

  std::vector<ProblemBundle> chain_bundles;
  for (int c = 1; c < config.chains; ++c) chain_bundles.push_back(build_problem(config));

  std::vector<ChainResult> results(static_cast<std::size_t>(config.chains));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(config.chains));
  auto run_chain = [&](int c, const ProblemBundle& b) {
    try {
      ChainConfig chain_config;
      chain_config.n_samples = config.n_samples;
      chain_config.n_burn = config.n_burn;
      chain_config.seed = config.seed + static_cast<std::uint64_t>(c);
      if (c == 0 && !config.quiet) {
        chain_config.progress_every = std::max<Index>(1, (config.n_samples * 6 / 5) / 10);
        chain_config.progress = [&](Index it, Index total) {
          std::cerr << "[" << config.problem << "] chain 0: " << it << "/" << total << "\n";
        };
      }
      results[static_cast<std::size_t>(c)] = sample_posterior(sampler, *b.posterior, chain_config);
    } catch (...) {
      failures[static_cast<std::size_t>(c)] = std::current_exception();
    }
  };

  std::vector<std::thread> workers;
  for (int c = 1; c < config.chains; ++c) {
    workers.emplace_back(run_chain, c, std::cref(chain_bundles[static_cast<std::size_t>(c - 1)]));
  }
  run_chain(0, bundle);
  for (auto& w : workers) w.join();
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  // pooled samples across chains
  const Index dim = results[0].samples.rows();
  Matrix pooled(dim, config.n_samples * config.chains);
  for (int c = 0; c < config.chains; ++c) {
    pooled.middleCols(static_cast<Index>(c) * config.n_samples, config.n_samples) =
        results[static_cast<std::size_t>(c)].samples;
  }
  SamplesMeta meta;
  meta.sampler = sampler;
  meta.seed = config.seed;
  meta.rng = Rng::algorithm();
  meta.acceptance_rate = 0.0;
  for (const auto& r : results) meta.acceptance_rate += r.acceptance_rate;
  meta.acceptance_rate /= static_cast<double>(config.chains);
  meta.target_acceptance = results[0].target_acceptance;
  const GeometryPtr domain_geometry = bundle.models.at(0)->domain_geometry();
  Samples parameter_samples(pooled, domain_geometry, meta);
  Samples function_samples = funvals(parameter_samples);

  // per-chain ESS, summed over chains
  Vector total_ess = Vector::Zero(dim);
  for (int c = 0; c < config.chains; ++c) {
    total_ess += ess(results[static_cast<std::size_t>(c)].to_samples(domain_geometry));
  }

  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);

  ArtifactWriter writer{config.output_dir, {}};
  try {
    fs::create_directories(config.output_dir + "/plots");
    write_data_csv(writer, bundle);

    writer.note("samples.csv");
    writer.note("meta.json");
    writer.note("stats.csv");
    export_samples(parameter_samples, config.output_dir, config.ci_percent);
    write_stats_csv(writer, parameter_samples, function_samples, total_ess, config.ci_percent);

    if (config.chains > 1) {
      for (int c = 0; c < config.chains; ++c) {
        const std::string chain_dir = config.output_dir + "/chain_" + std::to_string(c);
        writer.note("chain_" + std::to_string(c) + "/samples.csv");
        writer.note("chain_" + std::to_string(c) + "/stats.csv");
        writer.note("chain_" + std::to_string(c) + "/meta.json");
        export_samples(results[static_cast<std::size_t>(c)].to_samples(domain_geometry),
                       chain_dir, config.ci_percent);
      }
    }

    if (config.dump_mesh) {
      const auto* nodal = dynamic_cast<const NodalGeometry*>(
          bundle.models.at(0)->domain_geometry()->function_geometry().get());
      require(nodal && nodal->is_mesh(), "dump_mesh: problem has no mesh");
      writer.note("mesh.txt");
      write_mesh_file(nodal->mesh(), config.output_dir + "/mesh.txt");
    }

    nlohmann::json meta_json;
    meta_json["config"] = config.echo;
    meta_json["problem"] = bundle.descriptor;
    meta_json["sampler"] = {{"algorithm", sampler},
                            {"n_samples", config.n_samples},
                            {"n_burn", config.n_burn ? *config.n_burn : config.n_samples / 5},
                            {"seed", config.seed},
                            {"chains", config.chains},
                            {"target_acceptance", results[0].target_acceptance},
                            {"rng", Rng::algorithm()}};
    nlohmann::json acceptance = nlohmann::json::array();
    for (const auto& r : results) acceptance.push_back(r.acceptance_rate);
    meta_json["acceptance_rate"] = acceptance;
    meta_json["s_noise"] = bundle.s_noise;
    meta_json["ess"] = ess_summary(total_ess);
    meta_json["runtime_seconds"] = elapsed.count();
    {
      auto out = writer.open("meta.json");
      out << meta_json.dump(2) << "\n";
      require(out.good(), "run: write failed for meta.json");
    }

    write_plots(writer, bundle, parameter_samples, function_samples, config.ci_percent);
  } catch (...) {
    writer.remove_all();
    throw;
  }
}

void run_plot(const std::string& input_dir) {
  std::ifstream meta_in(input_dir + "/meta.json");
  if (!meta_in.good()) throw ConfigError("plot: cannot open " + input_dir + "/meta.json");
  nlohmann::json meta_json = nlohmann::json::parse(meta_in, nullptr, true, true);
  if (!meta_json.contains("config") || !meta_json["config"].contains("problem.name")) {
    throw ConfigError("plot: meta.json carries no config echo");
  }
  const std::string problem = meta_json["config"]["problem.name"].get<std::string>();
  RunConfig config = validate_config(problem, nlohmann::json::object(), meta_json["config"]);

  ProblemBundle bundle = build_problem(config);
  const GeometryPtr domain_geometry = bundle.models.at(0)->domain_geometry();
  Samples parameter_samples = import_samples(input_dir, domain_geometry);
  Samples function_samples = funvals(parameter_samples);
  Vector ess_values = parameter_samples.count() >= 10
                          ? ess(parameter_samples)
                          : Vector::Ones(parameter_samples.dim());

  ArtifactWriter writer{input_dir, {}};
  fs::create_directories(input_dir + "/plots");
  write_stats_csv(writer, parameter_samples, function_samples, ess_values, config.ci_percent);
  write_plots(writer, bundle, parameter_samples, function_samples, config.ci_percent);
}

}  // namespace uqpde
