// Test-only oracles, independent of the library implementation paths they
// check: closed-form PDE solutions, quadrature, conjugate Gaussian algebra
// and basic statistics.
#ifndef UQPDE_TESTS_ORACLES_HPP
#define UQPDE_TESTS_ORACLES_HPP

#include "uqpde/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracles {

using uqpde::Index;
using uqpde::Matrix;
using uqpde::Vector;

// heat equation on (0,1), zero Dirichlet, initial sin(pi xi):
// u(xi, tau) = exp(-pi^2 c^2 tau) sin(pi xi)
inline Vector heat_sine_solution(const Vector& grid, double c, double tau) {
  Vector u(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    u[i] = std::exp(-std::numbers::pi * std::numbers::pi * c * c * tau) *
           std::sin(std::numbers::pi * grid[i]);
  }
  return u;
}

// d'Alembert solution for the infinite-line wave equation with zero initial
// velocity and initial displacement g supported on [0, 1]:
// u(xi, tau) = (g(xi - tau) + g(xi + tau)) / 2 with zero extension.
inline double dalembert(const std::function<double(double)>& g, double xi, double tau) {
  auto extended = [&](double s) { return (s < 0.0 || s > 1.0) ? 0.0 : g(s); };
  return 0.5 * (extended(xi - tau) + extended(xi + tau));
}

// composite Simpson quadrature
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 200) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

// exact Gaussian posterior for prior N(0, I), data y ~ N(A x + c, s^2 I):
// cov = (I + A^T A / s^2)^-1, mean = cov A^T (y - c) / s^2
struct ConjugatePosterior {
  Vector mean;
  Matrix cov;
};

inline ConjugatePosterior conjugate_posterior(const Matrix& a, const Vector& offset,
                                              const Vector& y_obs, double sdev) {
  const Index n = a.cols();
  const Matrix precision =
      Matrix::Identity(n, n) + a.transpose() * a / (sdev * sdev);
  ConjugatePosterior post;
  post.cov = precision.llt().solve(Matrix::Identity(n, n));
  post.mean = post.cov * (a.transpose() * (y_obs - offset)) / (sdev * sdev);
  return post;
}

// two-sample Kolmogorov-Smirnov statistic
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i; else ++j;
    const double fa = static_cast<double>(i) / a.size();
    const double fb = static_cast<double>(j) / b.size();
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

inline Vector random_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(gen);
  return v;
}

inline double rel_l2(const Vector& approx, const Vector& exact) {
  return (approx - exact).norm() / exact.norm();
}

}  // namespace oracles

#endif
