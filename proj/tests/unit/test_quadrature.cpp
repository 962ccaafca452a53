#include <doctest.h>

#include <cmath>
#include <numeric>

#include "vmb/quadrature.hpp"

using namespace vmb;

namespace {
double double_factorial(int n) { return n <= 1 ? 1.0 : n * double_factorial(n - 2); }
}  // namespace

TEST_CASE("gauss-hermite integrates Gaussian moments exactly up to degree 2n-1") {
  for (int n : {4, 6, 9, 12}) {
    const Rule1D r = gauss_hermite(n);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0.0, mag = 0.0;
      for (int q = 0; q < n; ++q) {
        s += r.weights[q] * std::pow(r.nodes[q], p);
        mag += r.weights[q] * std::pow(std::abs(r.nodes[q]), p);
      }
      const double exact = p % 2 ? 0.0 : double_factorial(p - 1);
      CHECK(std::abs(s - exact) <= 1e-12 * mag);
    }
  }
}

TEST_CASE("gauss-hermite nodes are symmetric") {
  const Rule1D r = gauss_hermite(7);
  for (int q = 0; q < 7; ++q) {
    CHECK(r.nodes[q] == doctest::Approx(-r.nodes[6 - q]).epsilon(1e-14));
    CHECK(r.weights[q] == doctest::Approx(r.weights[6 - q]).epsilon(1e-14));
  }
}

TEST_CASE("gauss-laguerre moments are Gamma values") {
  for (double alpha : {0.0, 1.0, 0.5}) {
    const Rule1D r = gauss_laguerre(8, alpha);
    for (int p = 0; p <= 15; ++p) {
      double s = 0.0;
      for (int q = 0; q < 8; ++q) s += r.weights[q] * std::pow(r.nodes[q], p);
      CHECK(s == doctest::Approx(std::tgamma(alpha + p + 1)).epsilon(1e-10));
    }
  }
}

TEST_CASE("gauss-legendre integrates polynomials on [-1,1]") {
  const Rule1D r = gauss_legendre(5);
  for (int p = 0; p <= 9; ++p) {
    double s = 0.0;
    for (int q = 0; q < 5; ++q) s += r.weights[q] * std::pow(r.nodes[q], p);
    CHECK(s == doctest::Approx(p % 2 ? 0.0 : 2.0 / (p + 1)).scale(1.0).epsilon(1e-13));
  }
}

TEST_CASE("sphere rule: total area, second moments, antipodal symmetry") {
  const SphereRule s = product_sphere_rule(8, 16);
  const double area = std::accumulate(s.weights.begin(), s.weights.end(), 0.0);
  CHECK(area == doctest::Approx(4.0 * M_PI).epsilon(1e-13));
  for (int a = 0; a < 3; ++a) {
    double m2 = 0.0, m1 = 0.0;
    for (std::size_t q = 0; q < s.dirs.size(); ++q) {
      m1 += s.weights[q] * s.dirs[q][a];
      m2 += s.weights[q] * s.dirs[q][a] * s.dirs[q][a];
    }
    CHECK(std::abs(m1) < 1e-13);
    CHECK(m2 == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-13));
  }
  // every direction has its antipode in the rule
  for (const auto& d : s.dirs) {
    bool found = false;
    for (const auto& e : s.dirs)
      if (std::abs(d[0] + e[0]) + std::abs(d[1] + e[1]) + std::abs(d[2] + e[2]) < 1e-12) found = true;
    CHECK(found);
  }
}
