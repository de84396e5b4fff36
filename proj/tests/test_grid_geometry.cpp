#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "uqpde/geometry.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>

using namespace uqpde;

namespace {

Grid1D interior_grid(Index n) {
  const double h = 1.0 / static_cast<double>(n + 1);
  return Grid1D::uniform(h, 1.0 - h, n);
}

}  // namespace

TEST_CASE("Grid1D validates and interpolates") {
  CHECK_THROWS_AS(Grid1D{Vector::Zero(1)}, Error);
  Vector decreasing(3);
  decreasing << 0.0, 0.5, 0.4;
  CHECK_THROWS_AS(Grid1D{decreasing}, Error);

  const Grid1D grid = Grid1D::uniform(0.0, 1.0, 11);
  Vector values = grid.nodes();
  Vector query(3);
  query << 0.0, 0.55, 1.0;
  const Vector out = grid.interpolate(values, query);
  CHECK(out[0] == doctest::Approx(0.0));
  CHECK(out[1] == doctest::Approx(0.55));
  CHECK(out[2] == doctest::Approx(1.0));
  CHECK_THROWS_WITH_AS(grid.interpolate(values, Vector::Constant(1, 1.5)),
                       doctest::Contains("outside grid hull"), Error);
}

TEST_CASE("step expansion maps coefficients to half-open intervals") {
  const Grid1D grid = Grid1D::uniform(0.0, 1.0, 301);
  StepExpansionGeometry step(grid, 3);
  Vector x(3);
  x << 0.0, 1.0, 0.5;
  const Vector f = step.par2fun(x);
  for (Index k = 0; k < grid.size(); ++k) {
    const double xi = grid[k];
    double expected;
    if (xi < 1.0 / 3.0) expected = 0.0;
    else if (xi < 2.0 / 3.0) expected = 1.0;
    else expected = 0.5;
    CHECK(f[k] == expected);
  }
  // internal breakpoints land in the right interval
  CHECK(f[100] == 1.0);   // xi = 1/3
  CHECK(f[200] == 0.5);   // xi = 2/3
  CHECK(f[300] == 0.5);   // last interval closed

  CHECK(step.fun2par(f).isApprox(x, 1e-14));
  CHECK(step.par2fun(Vector::Zero(3)).isZero());
  CHECK_THROWS_WITH_AS(step.par2fun(Vector::Zero(4)), doctest::Contains("expected size 3"),
                       Error);
}

TEST_CASE("step expansion needs a node in every interval") {
  CHECK_THROWS_WITH_AS(StepExpansionGeometry(Grid1D::uniform(0.0, 1.0, 2), 3),
                       doctest::Contains("contains no grid nodes"), Error);
}

TEST_CASE("KL expansion basis against the direct formula") {
  const Grid1D grid = interior_grid(100);
  KLExpansionGeometry kl(grid, 1.5, 10.0, 20);

  // x = e_1: field is (1/10) * 1 * sqrt(2) sin(pi t) on the rescaled grid
  Vector e1 = Vector::Zero(20);
  e1[0] = 1.0;
  const Vector field = kl.par2fun(e1);
  const double span = grid.max() - grid.min();
  for (Index k = 0; k < grid.size(); ++k) {
    const double t = (grid[k] - grid.min()) / span;
    const double expected = 0.1 * std::numbers::sqrt2 * std::sin(std::numbers::pi * t);
    CHECK(field[k] == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(kl.par2fun(Vector::Zero(20)).isZero());
}

TEST_CASE("KL expansion projection inverts the synthesis") {
  const Grid1D grid = interior_grid(100);
  KLExpansionGeometry kl(grid, 1.5, 10.0, 20);
  Vector e2 = Vector::Zero(20);
  e2[1] = 1.0;
  CHECK((kl.fun2par(kl.par2fun(e2)) - e2).cwiseAbs().maxCoeff() < 1e-8);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector x = oracles::random_vector(20, 100 + trial);
    CHECK((kl.fun2par(kl.par2fun(x)) - x).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("KL basis orthonormal under the grid quadrature") {
  const Grid1D grid = interior_grid(150);
  KLExpansionGeometry kl(grid, 1.5, 10.0, 20);
  const Vector w = grid.trapezoid_weights() / (grid.max() - grid.min());
  for (int i = 1; i <= 20; ++i) {
    for (int j = i; j <= 20; ++j) {
      const double inner = (kl.basis(i).cwiseProduct(w)).dot(kl.basis(j));
      CHECK(std::abs(inner - (i == j ? 1.0 : 0.0)) < 1e-6);
    }
  }
}

TEST_CASE("par2fun is linear for expansion geometries") {
  const Grid1D grid = interior_grid(80);
  const auto nodal = std::make_shared<NodalGeometry>(grid);
  std::vector<GeometryPtr> geometries = {
      std::make_shared<StepExpansionGeometry>(grid, 4),
      std::make_shared<KLExpansionGeometry>(grid, 1.5, 10.0, 12),
      nodal,
      build_matern_kl(nodal, 0.2, 1.0, 10),
  };
  for (const auto& g : geometries) {
    const Vector x = oracles::random_vector(g->par_dim(), 7);
    const Vector z = oracles::random_vector(g->par_dim(), 8);
    const Vector lhs = g->par2fun(0.3 * x + 1.7 * z);
    const Vector rhs = 0.3 * g->par2fun(x) + 1.7 * g->par2fun(z);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("fun2par round trip for invertible geometries") {
  const Grid1D grid = interior_grid(80);
  const auto nodal = std::make_shared<NodalGeometry>(grid);
  const auto matern = build_matern_kl(nodal, 0.2, 1.0, 10);
  std::vector<GeometryPtr> geometries = {
      std::make_shared<StepExpansionGeometry>(grid, 4),
      std::make_shared<KLExpansionGeometry>(grid, 1.5, 10.0, 12),
      nodal,
      matern,
      MappedGeometry::scale_map(matern, 15.0),
      MappedGeometry::exp_map(matern),
  };
  for (const auto& g : geometries) {
    CHECK(g->invertible());
    for (int trial = 0; trial < 100; ++trial) {
      const Vector x = oracles::random_vector(g->par_dim(), 1000 + trial);
      CHECK((g->fun2par(g->par2fun(x)) - x).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("heaviside levels and conventions") {
  Vector r(3);
  r << -1.0, 1.0, 0.0;
  const Vector mapped = heaviside(r, 1.0, 10.0);
  CHECK(mapped[0] == 10.0);
  CHECK(mapped[1] == 1.0);
  CHECK(mapped[2] == 5.5);
  CHECK_THROWS_AS(heaviside(r, 10.0, 1.0), Error);

  // image and monotonicity
  const Vector random = oracles::random_vector(200, 3);
  const Vector image = heaviside(random, 1.0, 10.0);
  for (Index i = 0; i < image.size(); ++i) {
    CHECK((image[i] == 1.0 || image[i] == 5.5 || image[i] == 10.0));
  }
  Vector sorted = random;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  const Vector mono = heaviside(sorted, 1.0, 10.0);
  for (Index i = 1; i < mono.size(); ++i) CHECK(mono[i] <= mono[i - 1] + 1e-15);
}

TEST_CASE("heaviside-mapped geometry is not invertible") {
  const Grid1D grid = interior_grid(40);
  const auto kl = std::make_shared<KLExpansionGeometry>(grid, 1.5, 10.0, 8);
  const auto mapped = MappedGeometry::heaviside_map(kl, 1.0, 10.0);
  CHECK_FALSE(mapped->invertible());
  const Vector f = mapped->par2fun(oracles::random_vector(8, 4));
  CHECK_THROWS_WITH_AS(mapped->fun2par(f), doctest::Contains("non-invertible map"), Error);
}

TEST_CASE("matern eigenvalues match the 1D Neumann Laplacian") {
  // oracle: mu_i = 1/l^2 + (pi (i-1))^2 on the unit interval
  const double length_scale = 0.3;
  const auto nodal = std::make_shared<NodalGeometry>(Grid1D::uniform(0.0, 1.0, 200));
  const auto matern = build_matern_kl(nodal, length_scale, 1.0, 5);
  // recover mu_i from sqrt(lambda_i) = (mu_i / mu_1)^(-(nu + 1/2)/2)
  const double exponent = -(1.0 + 0.5) / 2.0;
  const double mu1_exact = 1.0 / (length_scale * length_scale);
  for (int i = 1; i <= 5; ++i) {
    const double mu_exact = mu1_exact + std::pow(std::numbers::pi * (i - 1), 2);
    const double ratio = std::pow(matern->sqrt_lambda()[i - 1], 1.0 / exponent);
    const double mu_computed = ratio * mu1_exact;  // mu_1 is exact for the constant mode
    CHECK(std::abs(mu_computed - mu_exact) / mu_exact < 0.02);
  }
  CHECK(matern->sqrt_lambda()[0] == doctest::Approx(1.0));
}

TEST_CASE("matern exponent convention") {
  // nu = 0.75, d = 1, mu_2/mu_1 = 4 requires l = sqrt(3)/pi so that
  // mu_2 = 1/l^2 + pi^2 = 4/l^2
  const double length_scale = std::sqrt(3.0) / std::numbers::pi;
  const auto nodal = std::make_shared<NodalGeometry>(Grid1D::uniform(0.0, 1.0, 400));
  const auto matern = build_matern_kl(nodal, length_scale, 0.75, 2);
  CHECK(matern->sqrt_lambda()[0] == doctest::Approx(1.0));
  CHECK(matern->sqrt_lambda()[1] ==
        doctest::Approx(std::pow(4.0, -0.625)).epsilon(5e-3));
}

TEST_CASE("matern basis is mass-orthonormal with decaying amplitudes") {
  const auto nodal = std::make_shared<NodalGeometry>(Grid1D::uniform(0.0, 1.0, 120));
  const auto matern = build_matern_kl(nodal, 0.1, 0.75, 30);
  const Matrix gram = matern->basis().transpose() * matern->mass() * matern->basis();
  CHECK((gram - Matrix::Identity(30, 30)).cwiseAbs().maxCoeff() < 1e-8);
  for (Index i = 1; i < 30; ++i) {
    CHECK(matern->sqrt_lambda()[i] <= matern->sqrt_lambda()[i - 1] + 1e-12);
    CHECK(matern->sqrt_lambda()[i] > 0.0);
  }
  CHECK_THROWS_AS(build_matern_kl(nodal, 0.1, 0.75, 121), Error);
}

TEST_CASE("matern eigenbasis file cache round trip") {
  const auto nodal = std::make_shared<NodalGeometry>(Grid1D::uniform(0.0, 1.0, 60));
  const std::string dir = "matern_cache_test";
  const auto fresh = build_matern_kl(nodal, 0.2, 1.0, 6, dir);
  const auto cached = build_matern_kl(nodal, 0.2, 1.0, 6, dir);
  CHECK(fresh->sqrt_lambda() == cached->sqrt_lambda());
  CHECK(fresh->basis() == cached->basis());
}

TEST_CASE("mapped geometries compose with the base parameterization") {
  const Grid1D grid = interior_grid(50);
  const auto kl = std::make_shared<KLExpansionGeometry>(grid, 1.5, 10.0, 6);
  const Vector x = oracles::random_vector(6, 11);
  const Vector base = kl->par2fun(x);

  const auto scaled = MappedGeometry::scale_map(kl, 15.0);
  CHECK((scaled->par2fun(x) - 15.0 * base).cwiseAbs().maxCoeff() < 1e-13);
  const auto exped = MappedGeometry::exp_map(kl);
  CHECK((exped->par2fun(x) - base.array().exp().matrix()).cwiseAbs().maxCoeff() < 1e-13);
  const auto heavi = MappedGeometry::heaviside_map(kl, 1.0, 10.0);
  CHECK(heavi->par2fun(x) == heaviside(base, 1.0, 10.0));
}

TEST_CASE("geometry descriptors serialize kind and hyperparameters") {
  const Grid1D grid = interior_grid(30);
  KLExpansionGeometry kl(grid, 1.5, 10.0, 6);
  const auto j = kl.describe();
  CHECK(j.at("kind") == "kl_expansion");
  CHECK(j.at("decay_rate") == 1.5);
  CHECK(j.at("normalizer") == 10.0);
  CHECK(j.at("num_modes") == 6);
}
