#include "uqpde/problems.hpp"

#include "uqpde/rng.hpp"

#include <cmath>
#include <numbers>

namespace uqpde {

namespace {

double rms_noise_sdev(double noise_level, const Vector& y_exact) {
  return noise_level * y_exact.norm() / std::sqrt(static_cast<double>(y_exact.size()));
}

// Data densities need a positive sdev even for noiseless synthetic runs.
double density_sdev(double s_noise) { return std::max(s_noise, 1e-12); }

Vector add_noise(const Vector& y_exact, double s_noise, Rng& rng) {
  if (s_noise == 0.0) return y_exact;
  return y_exact + s_noise * rng.normal_vector(y_exact.size());
}

}  // namespace

double heat1d_custom_initial(double xi) {
  return (1.0 - std::cos(2.0 * std::numbers::pi * (1.0 - xi)) +
          std::exp(-200.0 * (xi - 0.5) * (xi - 0.5)) +
          std::exp(-200.0 * (xi - 0.8) * (xi - 0.8))) / 30.0;
}

ProblemBundle build_heat1d(const Heat1DOptions& options) {
  require(options.n_grid >= 2, "heat1d: n_grid must be >= 2");
  require(options.tau_max > 0.0, "heat1d: tau_max must be positive");
  require(options.noise_level >= 0.0, "heat1d: noise_level must be >= 0");

  const Index n = options.n_grid;
  const double h = 1.0 / static_cast<double>(n + 1);
  const Grid1D grid = Grid1D::uniform(h, 1.0 - h, n);

  // keep the reference step length (224 intervals over tau_max = 0.01)
  Index n_tau = options.n_tau;
  if (n_tau == 0) {
    n_tau = 1 + static_cast<Index>(std::llround(224.0 * options.tau_max / 0.01));
  }
  require(n_tau >= 2, "heat1d: n_tau must be >= 2");
  const Vector tau = Vector::LinSpaced(n_tau, 0.0, options.tau_max);
  const double dtau = tau[1] - tau[0];
  const double c2 = options.conductivity * options.conductivity;
  if (options.scheme == TimeScheme::ExplicitEuler) {
    const double limit = h * h / (2.0 * c2);
    require(dtau <= limit + 1e-15,
            "heat1d: CFL violation, dtau = " + std::to_string(dtau) + " exceeds h^2/(2 c^2) = " +
                std::to_string(limit) + "; increase n_tau or use the implicit scheme");
  }

  // centered-difference diffusion operator on the interior grid
  SpMatrix diffusion(n, n);
  {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(3 * n));
    for (Index i = 0; i < n; ++i) {
      triplets.emplace_back(i, i, -2.0 * c2 / (h * h));
      if (i > 0) triplets.emplace_back(i, i - 1, c2 / (h * h));
      if (i + 1 < n) triplets.emplace_back(i, i + 1, c2 / (h * h));
    }
    diffusion.setFromTriplets(triplets.begin(), triplets.end());
    diffusion.makeCompressed();
  }
  const Vector source = Vector::Zero(n);
  PdeForm form = [diffusion, source](const Vector& g, double) {
    return TimeStepComponents{diffusion, source, g};
  };

  const bool half = options.obs == Heat1DOptions::Observation::Half;
  const Grid1D grid_obs = half ? Grid1D(grid.nodes().head(n / 2)) : grid;
  auto pde = std::make_shared<TimeDependentLinearPDE>(
      form, tau, grid, grid_obs, options.scheme, /*time_invariant_form=*/true);

  GeometryPtr domain_geometry;
  Vector truth_parameter, truth_field;
  if (options.variant == Heat1DOptions::Variant::Step3) {
    auto step = std::make_shared<StepExpansionGeometry>(grid, 3);
    truth_parameter = Vector(3);
    truth_parameter << 0.0, 1.0, 0.5;
    truth_field = step->par2fun(truth_parameter);
    domain_geometry = step;
  } else {
    auto kl = std::make_shared<KLExpansionGeometry>(grid, 1.5, 10.0, 20);
    truth_field.resize(n);
    for (Index i = 0; i < n; ++i) truth_field[i] = heat1d_custom_initial(grid[i]);
    truth_parameter = kl->fun2par(truth_field);
    domain_geometry = kl;
  }
  auto range_geometry = std::make_shared<NodalGeometry>(grid_obs);
  auto model = std::make_shared<const ForwardModel>(pde, domain_geometry, range_geometry);

  ProblemBundle bundle;
  bundle.name = "heat1d";
  bundle.models = {model};
  bundle.truth_parameter = truth_parameter;
  bundle.truth_field = truth_field;

  const Vector y_exact = model->forward(truth_parameter);
  const double s_noise = rms_noise_sdev(options.noise_level, y_exact);
  Rng noise_rng(options.seed + 1);
  bundle.y_exact = {y_exact};
  bundle.y_obs = {add_noise(y_exact, s_noise, noise_rng)};
  bundle.s_noise = {s_noise};

  bundle.prior = std::make_shared<GaussianIID>(
      "x", Vector::Zero(domain_geometry->par_dim()), 1.0, domain_geometry);
  bundle.data_densities = {std::make_shared<GaussianIID>("y", model, "x",
                                                         density_sdev(s_noise), range_geometry)};
  bundle.joint = std::make_shared<JointDensity>(
      std::vector<std::shared_ptr<const GaussianIID>>{bundle.prior, bundle.data_densities[0]});
  bundle.posterior = std::make_shared<Posterior>(bundle.joint->condition({{"y", bundle.y_obs[0]}}));
  bundle.recommended_sampler = "cwmh";

  bundle.descriptor = {
      {"problem", "heat1d"},
      {"variant", options.variant == Heat1DOptions::Variant::Step3 ? "step3" : "kl20"},
      {"tau_max", options.tau_max},
      {"n_grid", n},
      {"n_tau", n_tau},
      {"conductivity", options.conductivity},
      {"obs", half ? "half" : "full"},
      {"noise_level", options.noise_level},
      {"s_noise", s_noise},
      {"seed", options.seed},
      {"scheme", options.scheme == TimeScheme::ExplicitEuler ? "explicit_euler"
                                                             : "implicit_euler"},
      {"domain_geometry", domain_geometry->describe()},
  };
  return bundle;
}

ProblemBundle build_poisson2d(const Poisson2DOptions& options) {
  require(options.mesh_nx >= 4 && options.mesh_ny >= 4, "poisson2d: mesh must be >= 4x4");
  require(options.noise_level >= 0.0, "poisson2d: noise_level must be >= 0");

  auto mesh = std::make_shared<const TriMesh>(mesh_unit_square(options.mesh_nx, options.mesh_ny));
  auto nodal = std::make_shared<const NodalGeometry>(mesh);
  auto matern = build_matern_kl(nodal, options.length_scale, options.smoothness,
                                options.num_terms, options.kl_cache_dir);
  // conductivity = exp(log-conductivity field)
  GeometryPtr domain_geometry = MappedGeometry::exp_map(matern);

  auto kernel = std::make_shared<const P1StiffnessKernel>(*mesh);
  const std::vector<int> dirichlet_nodes = mesh->nodes_with_marker({"left", "right"});
  SteadyMatrixAssembler matrix_assembler = [kernel, dirichlet_nodes](const Vector& sigma) {
    SteadySystem system;
    system.matrix = kernel->pattern();
    kernel->fill(sigma, system.matrix);
    for (int node : dirichlet_nodes) system.dirichlet.emplace_back(node, 0.0);
    return system;
  };
  // unit source, conductivity-independent
  const Vector load = assemble_p1(*mesh, Vector::Ones(mesh->num_vertices()),
                                  LoadDensity{Vector::Ones(mesh->num_vertices())}).load;
  SteadyRhsAssembler rhs_assembler = [load](const Vector&) { return load; };
  SteadyObserver observer = [](const Vector&, const Vector& u) { return u; };

  auto pde = std::make_shared<SteadyStateLinearPDE>(matrix_assembler, rhs_assembler, observer,
                                                    SteadySolver::SparseCholesky);
  auto model = std::make_shared<const ForwardModel>(pde, domain_geometry, nodal);

  ProblemBundle bundle;
  bundle.name = "poisson2d";
  bundle.models = {model};

  Rng truth_rng(options.seed);
  bundle.truth_parameter = truth_rng.normal_vector(domain_geometry->par_dim());
  bundle.truth_field = domain_geometry->par2fun(bundle.truth_parameter);

  const Vector y_exact = model->forward(bundle.truth_parameter);
  const double s_noise = rms_noise_sdev(options.noise_level, y_exact);
  Rng noise_rng(options.seed + 1);
  bundle.y_exact = {y_exact};
  bundle.y_obs = {add_noise(y_exact, s_noise, noise_rng)};
  bundle.s_noise = {s_noise};

  bundle.prior = std::make_shared<GaussianIID>(
      "x", Vector::Zero(domain_geometry->par_dim()), 1.0, domain_geometry);
  bundle.data_densities = {std::make_shared<GaussianIID>("y", model, "x",
                                                         density_sdev(s_noise), nodal)};
  bundle.joint = std::make_shared<JointDensity>(
      std::vector<std::shared_ptr<const GaussianIID>>{bundle.prior, bundle.data_densities[0]});
  bundle.posterior = std::make_shared<Posterior>(bundle.joint->condition({{"y", bundle.y_obs[0]}}));
  bundle.recommended_sampler = "pcn";

  bundle.descriptor = {
      {"problem", "poisson2d"},
      {"mesh", {options.mesh_nx, options.mesh_ny}},
      {"num_terms", options.num_terms},
      {"length_scale", options.length_scale},
      {"smoothness", options.smoothness},
      {"noise_level", options.noise_level},
      {"s_noise", s_noise},
      {"seed", options.seed},
      {"domain_geometry", domain_geometry->describe()},
  };
  return bundle;
}

ProblemBundle build_eit(const EitOptions& options) {
  require(options.noise_level >= 0.0, "eit: noise_level must be >= 0");
  require(options.sigma_low < options.sigma_high, "eit: need sigma_low < sigma_high");
  require(options.num_frequencies >= 1, "eit: need at least one boundary frequency");

  auto mesh = std::make_shared<const TriMesh>(mesh_unit_disk(options.n_rings, options.n_sectors));
  auto nodal = std::make_shared<const NodalGeometry>(mesh);
  auto matern = build_matern_kl(nodal, options.length_scale, options.smoothness,
                                options.num_terms, options.kl_cache_dir);
  GeometryPtr domain_geometry =
      MappedGeometry::heaviside_map(matern, options.sigma_low, options.sigma_high);

  auto kernel = std::make_shared<const P1StiffnessKernel>(*mesh);
  auto flux_kernel = std::make_shared<const BoundaryFluxKernel>(*mesh);
  const std::vector<int> boundary(mesh->boundary_nodes.begin(), mesh->boundary_nodes.end());
  SteadyMatrixAssembler matrix_assembler = [kernel, boundary](const Vector& sigma) {
    SteadySystem system;
    system.matrix = kernel->pattern();
    kernel->fill(sigma, system.matrix);
    for (int node : boundary) system.dirichlet.emplace_back(node, 0.0);
    return system;
  };

  // boundary angles label the measurement axis
  Vector angles(options.n_sectors);
  for (int s = 0; s < options.n_sectors; ++s) {
    angles[s] = 2.0 * std::numbers::pi * s / options.n_sectors;
  }
  auto range_geometry = std::make_shared<const NodalGeometry>(Grid1D(angles));

  ProblemBundle bundle;
  bundle.name = "eit";

  std::shared_ptr<SteadyStateLinearPDE> base_pde;
  std::vector<std::shared_ptr<const ForwardModel>> models;
  for (int k = 1; k <= options.num_frequencies; ++k) {
    const Vector lift = harmonic_lift(k, *mesh);
    const Vector rhs = -(kernel->unit_stiffness() * lift);
    SteadyRhsAssembler rhs_assembler = [rhs](const Vector&) { return rhs; };
    SteadyObserver observer = [flux_kernel, lift](const Vector& sigma, const Vector& v) {
      return flux_kernel->apply(sigma, v + lift);
    };
    std::shared_ptr<SteadyStateLinearPDE> pde;
    if (!base_pde) {
      pde = std::make_shared<SteadyStateLinearPDE>(matrix_assembler, rhs_assembler, observer,
                                                   SteadySolver::SparseCholesky);
      base_pde = pde;
    } else {
      pde = std::make_shared<SteadyStateLinearPDE>(
          base_pde->with_updated_rhs(rhs_assembler, observer));
    }
    models.push_back(std::make_shared<const ForwardModel>(pde, domain_geometry, range_geometry));
  }
  bundle.models = models;

  // truth: circular inclusions projected to nodal values (not a prior draw)
  struct Circle { double cx, cy, r; };
  std::vector<Circle> circles;
  if (options.truth == EitOptions::Truth::ThreeCircles) {
    circles = {{0.5, 0.5, 0.2}, {-0.5, 0.6, 0.1}, {-0.3, -0.3, 0.3}};
  } else {
    circles = {{0.3, 0.3, 0.3}};
  }
  Vector sigma_true = Vector::Constant(mesh->num_vertices(), options.sigma_low);
  for (Index v = 0; v < mesh->num_vertices(); ++v) {
    for (const Circle& c : circles) {
      const double dx = mesh->vertices(v, 0) - c.cx;
      const double dy = mesh->vertices(v, 1) - c.cy;
      if (dx * dx + dy * dy <= c.r * c.r) sigma_true[v] = options.sigma_high;
    }
  }
  bundle.truth_field = sigma_true;  // no coefficient-space truth exists

  Rng noise_rng(options.seed + 1);
  std::vector<std::shared_ptr<const GaussianIID>> factors;
  bundle.prior = std::make_shared<GaussianIID>(
      "x", Vector::Zero(domain_geometry->par_dim()), 1.0, domain_geometry);
  factors.push_back(bundle.prior);
  Bindings observed;
  for (std::size_t k = 0; k < models.size(); ++k) {
    const Vector y_exact = models[k]->forward_fun(sigma_true);
    const double s_noise = rms_noise_sdev(options.noise_level, y_exact);
    bundle.y_exact.push_back(y_exact);
    bundle.y_obs.push_back(add_noise(y_exact, s_noise, noise_rng));
    bundle.s_noise.push_back(s_noise);
    const std::string name = "y" + std::to_string(k + 1);
    auto density = std::make_shared<GaussianIID>(name, models[k], "x",
                                                 density_sdev(s_noise), range_geometry);
    bundle.data_densities.push_back(density);
    factors.push_back(density);
    observed[name] = bundle.y_obs[k];
  }
  bundle.joint = std::make_shared<JointDensity>(factors);
  bundle.posterior = std::make_shared<Posterior>(bundle.joint->condition(observed));
  bundle.recommended_sampler = "mh";

  bundle.descriptor = {
      {"problem", "eit"},
      {"n_rings", options.n_rings},
      {"n_sectors", options.n_sectors},
      {"num_terms", options.num_terms},
      {"length_scale", options.length_scale},
      {"smoothness", options.smoothness},
      {"noise_level", options.noise_level},
      {"s_noise", bundle.s_noise},
      {"sigma_low", options.sigma_low},
      {"sigma_high", options.sigma_high},
      {"num_frequencies", options.num_frequencies},
      {"truth", options.truth == EitOptions::Truth::ThreeCircles ? "three_circles"
                                                                 : "one_circle"},
      {"seed", options.seed},
      {"domain_geometry", domain_geometry->describe()},
  };
  return bundle;
}

Vector pat_forward(const Vector& g_nodal, int n_g, int frequency, bool full_data) {
  require_dim(n_g, g_nodal.size(), "pat_forward initial pressure");
  // leapfrog on [-1, 2]: waves from [0, 1] cannot reach the artificial
  // boundary within tau <= 1, so the zero extension stands in for free space
  constexpr Index kRefine = 500;              // solver nodes per unit length
  constexpr double dx = 1.0 / kRefine;
  constexpr double dt = dx;                   // Courant number 1 (CFL bound dt <= dx)
  const Index n_solver = 3 * kRefine + 1;
  const Index n_steps = static_cast<Index>(std::llround(1.0 / dt));

  // interpolate the nodal field onto the solver grid, zero outside [0, 1]
  const Grid1D data_grid = Grid1D::uniform(0.0, 1.0, n_g);
  const Vector support_nodes = Vector::LinSpaced(kRefine + 1, 0.0, 1.0);
  Vector u = Vector::Zero(n_solver);
  u.segment(kRefine, kRefine + 1) = data_grid.interpolate(g_nodal, support_nodes);

  const double lambda2 = (dt / dx) * (dt / dx);
  const Index inner = n_solver - 2;

  // sensors at xi = 0 and xi = 1 (solver indices kRefine and 2*kRefine)
  const Index sensor_left = kRefine, sensor_right = 2 * kRefine;
  Vector left_series(n_steps + 1), right_series(n_steps + 1);
  left_series[0] = u[sensor_left];
  right_series[0] = u[sensor_right];

  // first step from zero initial velocity
  Vector u_prev = u;
  Vector u_curr = u;
  u_curr.segment(1, inner) =
      u.segment(1, inner) +
      0.5 * lambda2 *
          (u.segment(2, inner) - 2.0 * u.segment(1, inner) + u.segment(0, inner));
  left_series[1] = u_curr[sensor_left];
  right_series[1] = u_curr[sensor_right];

  Vector u_next = Vector::Zero(n_solver);
  for (Index step = 2; step <= n_steps; ++step) {
    u_next.segment(1, inner) =
        2.0 * u_curr.segment(1, inner) - u_prev.segment(1, inner) +
        lambda2 * (u_curr.segment(2, inner) - 2.0 * u_curr.segment(1, inner) +
                   u_curr.segment(0, inner));
    std::swap(u_prev, u_curr);
    std::swap(u_curr, u_next);
    left_series[step] = u_curr[sensor_left];
    right_series[step] = u_curr[sensor_right];
  }

  // linear interpolation of the sensor series at times i / frequency
  const Grid1D time_grid = Grid1D::uniform(0.0, 1.0, n_steps + 1);
  Vector obs_times(frequency);
  for (int i = 1; i <= frequency; ++i) obs_times[i - 1] = static_cast<double>(i) / frequency;
  const Vector left = time_grid.interpolate(left_series, obs_times);
  if (!full_data) return left;
  const Vector right = time_grid.interpolate(right_series, obs_times);
  Vector y(2 * frequency);
  y << left, right;
  return y;
}

ProblemBundle build_pat(const PatOptions& options) {
  require(options.n_g >= 2, "pat: n_g must be >= 2");
  require(options.s_noise >= 0.0, "pat: s_noise must be >= 0");
  require(options.frequency >= 1, "pat: frequency must be >= 1");

  const bool full = options.data == PatOptions::Data::Full;
  const Grid1D grid = Grid1D::uniform(0.0, 1.0, options.n_g);
  auto nodal = std::make_shared<const NodalGeometry>(grid);
  auto matern = build_matern_kl(nodal, options.length_scale, options.smoothness,
                                options.num_terms, options.kl_cache_dir);
  GeometryPtr domain_geometry = MappedGeometry::scale_map(matern, options.prior_scale);

  const int n_g = options.n_g;
  const int frequency = options.frequency;
  ForwardModel::Callable solver = [n_g, frequency, full](const Vector& g) {
    return pat_forward(g, n_g, frequency, full);
  };

  const Grid1D obs_times = Grid1D::uniform(1.0 / frequency, 1.0, frequency);
  std::shared_ptr<const NodalGeometry> range_geometry;
  if (full) {
    Vector sensors(2);
    sensors << 0.0, 1.0;
    range_geometry = std::make_shared<const NodalGeometry>(Grid2D(Grid1D(sensors), obs_times));
  } else {
    range_geometry = std::make_shared<const NodalGeometry>(obs_times);
  }
  auto model = std::make_shared<const ForwardModel>(
      ForwardModel::blackbox(solver, domain_geometry, range_geometry));

  ProblemBundle bundle;
  bundle.name = "pat";
  bundle.models = {model};

  if (options.truth == PatOptions::Truth::PriorDraw) {
    Rng truth_rng(options.seed);
    bundle.truth_parameter = truth_rng.normal_vector(domain_geometry->par_dim());
  } else {
    Vector field(options.n_g);
    for (Index i = 0; i < options.n_g; ++i) {
      const double xi = grid[i];
      field[i] = 1.5 * std::exp(-150.0 * (xi - 0.3) * (xi - 0.3)) +
                 std::exp(-250.0 * (xi - 0.75) * (xi - 0.75));
    }
    bundle.truth_parameter = domain_geometry->fun2par(field);
  }
  bundle.truth_field = domain_geometry->par2fun(bundle.truth_parameter);

  const Vector y_exact = model->forward(bundle.truth_parameter);
  Rng noise_rng(options.seed + 1);
  bundle.y_exact = {y_exact};
  bundle.y_obs = {add_noise(y_exact, options.s_noise, noise_rng)};
  bundle.s_noise = {options.s_noise};

  bundle.prior = std::make_shared<GaussianIID>(
      "x", Vector::Zero(domain_geometry->par_dim()), 1.0, domain_geometry);
  bundle.data_densities = {std::make_shared<GaussianIID>(
      "y", model, "x", density_sdev(options.s_noise), range_geometry)};
  bundle.joint = std::make_shared<JointDensity>(
      std::vector<std::shared_ptr<const GaussianIID>>{bundle.prior, bundle.data_densities[0]});
  bundle.posterior = std::make_shared<Posterior>(bundle.joint->condition({{"y", bundle.y_obs[0]}}));
  bundle.recommended_sampler = "pcn";

  bundle.descriptor = {
      {"problem", "pat"},
      {"data", full ? "full" : "partial"},
      {"n_g", options.n_g},
      {"num_terms", options.num_terms},
      {"length_scale", options.length_scale},
      {"smoothness", options.smoothness},
      {"prior_scale", options.prior_scale},
      {"s_noise", options.s_noise},
      {"frequency", options.frequency},
      {"truth", options.truth == PatOptions::Truth::PriorDraw ? "prior_draw" : "two_bumps"},
      {"seed", options.seed},
      {"domain_geometry", domain_geometry->describe()},
  };
  return bundle;
}

}  // namespace uqpde
