#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "uqpde/cliapp.hpp"
#include "uqpde/samples.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace uqpde;
namespace fs = std::filesystem;

namespace {

nlohmann::json flat(std::initializer_list<std::pair<std::string, nlohmann::json>> entries) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : entries) j[k] = v;
  return j;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// meta.json with the one timing field removed
nlohmann::json normalized_meta(const std::string& path) {
  nlohmann::json j = nlohmann::json::parse(slurp(path));
  j.erase("runtime_seconds");
  return j;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

RunConfig tiny_heat_config(const std::string& out_dir, std::uint64_t seed = 1) {
  return validate_config("heat1d",
                         flat({{"sampler.n_samples", 300},
                               {"sampler.seed", static_cast<std::int64_t>(seed)},
                               {"output.dir", out_dir},
                               {"output.quiet", true}}),
                         {});
}

}  // namespace

TEST_CASE("defaults mirror the reference setup") {
  const RunConfig config = validate_config("heat1d", {}, {});
  CHECK(config.heat.n_grid == 100);
  CHECK(config.heat.tau_max == 0.01);
  CHECK(config.heat.noise_level == 0.10);
  CHECK(config.heat.n_tau == 0);  // resolved to 225 by the builder
  CHECK(config.sampler.empty());
  const ProblemBundle bundle = build_problem(config);
  CHECK(bundle.descriptor.at("n_tau") == 225);
  CHECK(bundle.recommended_sampler == "cwmh");
}

TEST_CASE("config validation names the key and the allowed range") {
  CHECK_THROWS_WITH_AS(
      validate_config("heat1d", flat({{"problem.noise_level", -0.1}}), {}),
      doctest::Contains("problem.noise_level must be >= 0"), ConfigError);
  CHECK_THROWS_WITH_AS(validate_config("heat1d", flat({{"sampler.id", "nuts"}}), {}),
                       doctest::Contains("cwmh"), ConfigError);
  CHECK_THROWS_WITH_AS(validate_config("heat1d", flat({{"problem.bogus", 1}}), {}),
                       doctest::Contains("unknown key 'problem.bogus'"), ConfigError);
  CHECK_THROWS_WITH_AS(validate_config("diffusion", {}, {}),
                       doctest::Contains("unknown problem"), ConfigError);
  CHECK_THROWS_WITH_AS(
      validate_config("pat", flat({{"output.dump_mesh", true}}), {}),
      doctest::Contains("has no mesh"), ConfigError);
}

TEST_CASE("flags take precedence over the config file") {
  const nlohmann::json file = flat({{"problem.noise_level", 0.2}, {"sampler.n_samples", 777}});
  const RunConfig config =
      validate_config("heat1d", flat({{"problem.noise_level", 0.3}}), file);
  CHECK(config.heat.noise_level == 0.3);
  CHECK(config.n_samples == 777);
  CHECK(config.echo.at("problem.noise_level") == 0.3);
}

TEST_CASE("run writes the full artifact set") {
  TempDir dir("uqpde_cli_run");
  run(tiny_heat_config(dir.str()));

  for (const char* name : {"data.csv", "samples.csv", "stats.csv", "meta.json",
                           "plots/mean_ci.svg", "plots/coefficient_ci.svg", "plots/data.svg"}) {
    CHECK(fs::exists(dir.path / name));
  }

  // headers and row counts
  std::ifstream samples_csv(dir.str() + "/samples.csv");
  std::string line;
  std::getline(samples_csv, line);
  CHECK(line == "x_1,x_2,x_3");
  Index rows = 0;
  while (std::getline(samples_csv, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 300);

  std::ifstream stats_csv(dir.str() + "/stats.csv");
  std::getline(stats_csv, line);
  CHECK(line == "space,index,mean,variance,ci_lower,ci_upper,ess");
  Index stats_rows = 0;
  while (std::getline(stats_csv, line)) {
    if (!line.empty()) ++stats_rows;
  }
  CHECK(stats_rows == 3 + 100);  // parameter and function space

  const nlohmann::json meta = nlohmann::json::parse(slurp(dir.str() + "/meta.json"));
  CHECK(meta.at("config").at("sampler.seed") == 1);
  CHECK(meta.at("sampler").at("algorithm") == "cwmh");
  CHECK(meta.contains("runtime_seconds"));
  CHECK(meta.at("s_noise").size() == 1);
}

TEST_CASE("identical seeds give identical artifacts") {
  TempDir dir_a("uqpde_cli_a");
  TempDir dir_b("uqpde_cli_b");
  run(tiny_heat_config(dir_a.str(), 7));
  run(tiny_heat_config(dir_b.str(), 7));
  CHECK(slurp(dir_a.str() + "/samples.csv") == slurp(dir_b.str() + "/samples.csv"));
  CHECK(slurp(dir_a.str() + "/stats.csv") == slurp(dir_b.str() + "/stats.csv"));
  CHECK(slurp(dir_a.str() + "/data.csv") == slurp(dir_b.str() + "/data.csv"));
  CHECK(normalized_meta(dir_a.str() + "/meta.json") ==
        normalized_meta(dir_b.str() + "/meta.json"));

  TempDir dir_c("uqpde_cli_c");
  run(tiny_heat_config(dir_c.str(), 8));
  CHECK(slurp(dir_a.str() + "/samples.csv") != slurp(dir_c.str() + "/samples.csv"));
}

TEST_CASE("config echo reruns to identical outputs") {
  TempDir dir_a("uqpde_cli_echo_a");
  run(tiny_heat_config(dir_a.str(), 3));
  const nlohmann::json echo =
      nlohmann::json::parse(slurp(dir_a.str() + "/meta.json")).at("config");

  TempDir dir_b("uqpde_cli_echo_b");
  nlohmann::json file = echo;
  file.erase("problem.name");
  file["output.dir"] = dir_b.str();
  const RunConfig config = validate_config("heat1d", {}, file);
  run(config);
  CHECK(slurp(dir_a.str() + "/samples.csv") == slurp(dir_b.str() + "/samples.csv"));
}

TEST_CASE("parallel chains write per-chain directories and pooled samples") {
  TempDir dir("uqpde_cli_chains");
  RunConfig config = validate_config("heat1d",
                                     flat({{"sampler.n_samples", 120},
                                           {"sampler.chains", 2},
                                           {"sampler.seed", 5},
                                           {"output.dir", dir.str()},
                                           {"output.quiet", true}}),
                                     {});
  run(config);
  CHECK(fs::exists(dir.path / "chain_0/samples.csv"));
  CHECK(fs::exists(dir.path / "chain_1/samples.csv"));
  const Samples pooled = import_samples(dir.str());
  CHECK(pooled.count() == 240);
  // chains differ (different seeds)
  CHECK(slurp(dir.str() + "/chain_0/samples.csv") != slurp(dir.str() + "/chain_1/samples.csv"));
}

TEST_CASE("poisson2d smoke run with mesh dump") {
  TempDir dir("uqpde_cli_poisson");
  RunConfig config = validate_config("poisson2d",
                                     flat({{"problem.mesh_dim", 8},
                                           {"problem.num_terms", 8},
                                           {"sampler.n_samples", 60},
                                           {"output.dir", dir.str()},
                                           {"output.dump_mesh", true},
                                           {"output.quiet", true}}),
                                     {});
  run(config);
  CHECK(fs::exists(dir.path / "mesh.txt"));
  CHECK(fs::exists(dir.path / "plots/mean_field.svg"));
  CHECK(fs::exists(dir.path / "plots/variance_field.svg"));
  CHECK(fs::exists(dir.path / "plots/truth_field.svg"));
  const TriMesh mesh = read_mesh_file(dir.str() + "/mesh.txt");
  CHECK(mesh.num_vertices() == 81);
  mesh.validate();
}

TEST_CASE("plot subcommand re-renders from saved artifacts") {
  TempDir dir("uqpde_cli_plot");
  run(tiny_heat_config(dir.str(), 2));
  fs::remove_all(dir.path / "plots");
  CHECK_FALSE(fs::exists(dir.path / "plots/mean_ci.svg"));
  run_plot(dir.str());
  CHECK(fs::exists(dir.path / "plots/mean_ci.svg"));
  CHECK_THROWS_AS(run_plot((dir.path / "nonexistent").string()), ConfigError);
}
