#include <doctest.h>

#include <cmath>
#include <random>

#include "vmb/errors.hpp"
#include "vmb/phi_functions.hpp"
#include "vmb/spatial_grid.hpp"

using namespace vmb;

TEST_CASE("grid layout") {
  const SpatialGrid g1(1, 16);
  CHECK(g1.num_points() == 16);
  CHECK(g1.num_modes() == 9);
  CHECK(g1.volume() == doctest::Approx(2 * M_PI));  // active directions only
  const SpatialGrid g3(3, 8);
  CHECK(g3.num_points() == 512);
  CHECK(g3.volume() == doctest::Approx(8 * M_PI * M_PI * M_PI));
  CHECK(g3.num_modes() == 8 * 8 * 5);
  CHECK(g3.mode_of(1, -2, 3) >= 0);
  const Vec3 k = g3.wavevector(g3.mode_of(1, -2, 3));
  CHECK(k[0] == 1.0);
  CHECK(k[1] == -2.0);
  CHECK(k[2] == 3.0);
  CHECK(g3.mode_of(-1, 0, 0) == -1);
}

TEST_CASE("forward/backward round trip and zero mode is the mean") {
  for (int d : {1, 2, 3}) {
    const SpatialGrid g(d, 8);
    PhysField p(g.num_points(), 2);
    for (int q = 0; q < g.num_points(); ++q) {
      const Vec3 x = g.point(q);
      p(q, 0) = 0.3 + std::sin(x[0]) + (d > 1 ? std::cos(2 * x[1]) : 0.0);
      p(q, 1) = std::cos(x[0] + (d > 2 ? x[2] : 0.0));
    }
    const SpecField s = g.forward(p);
    CHECK(std::abs(s(0, 0) - cplx(0.3)) < 1e-14);
    CHECK((g.backward(s) - p).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("two-thirds truncation drops high modes") {
  const SpatialGrid g(1, 16);
  PhysField p(16, 1);
  for (int q = 0; q < 16; ++q) p(q, 0) = std::cos(7 * g.point(q)[0]);
  CHECK(g.forward(p).cwiseAbs().maxCoeff() < 1e-14);
  for (int q = 0; q < 16; ++q) p(q, 0) = std::cos(5 * g.point(q)[0]);
  CHECK(g.forward(p).cwiseAbs().maxCoeff() == doctest::Approx(0.5));
}

TEST_CASE("norms and calculus") {
  const SpatialGrid g(2, 16);
  PhysField p(g.num_points(), 3);
  for (int q = 0; q < g.num_points(); ++q) {
    const Vec3 x = g.point(q);
    p(q, 0) = std::sin(x[1]);
    p(q, 1) = std::sin(x[0]);
    p(q, 2) = std::cos(x[0] + x[1]);
  }
  const SpecField w = g.forward(p);
  // L2 norm by quadrature
  CHECK(l2_norm_sq(g, w) == doctest::Approx(p.squaredNorm() * g.volume() / g.num_points()).epsilon(1e-12));
  // each component has |k|^2 in {1, 2}
  const double l2 = l2_norm_sq(g, w);
  const double h1 = sobolev_norm_sq(g, w, 1);
  CHECK(h1 == doctest::Approx(l2 + g.volume() / 2 * (1 + 1 + 2)).epsilon(1e-12));
  CHECK(divergence(g, w).cwiseAbs().maxCoeff() < 1e-14);
  // curl of (sin y, sin x, 0) = (0, 0, cos x - cos y)
  const PhysField c = g.backward(curl(g, w));
  for (int q = 0; q < g.num_points(); ++q) {
    const Vec3 x = g.point(q);
    CHECK(c(q, 2) == doctest::Approx(std::cos(x[0]) - std::cos(x[1])).scale(1.0).epsilon(1e-12));
  }
  // div of a gradient is minus |k|^2
  const SpecField lap = divergence(g, gradient(g, w.col(2)));
  CHECK((lap + 2.0 * w.col(2)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(integral(g, w)(0) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("phi functions") {
  Eigen::MatrixXcd Z(2, 2);
  Z << cplx(-3.0, 0.5), cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(-0.2, 0.0);
  const PhiFunctions p = phi_functions(Z);
  // upper triangular: diagonal entries are scalar phi values
  auto phi1 = [](cplx z) { return (std::exp(z) - 1.0) / z; };
  auto phi2 = [](cplx z) { return (std::exp(z) - 1.0 - z) / (z * z); };
  CHECK(std::abs(p.phi0(0, 0) - std::exp(Z(0, 0))) < 1e-13);
  CHECK(std::abs(p.phi1(1, 1) - phi1(Z(1, 1))) < 1e-13);
  CHECK(std::abs(p.phi2(0, 0) - phi2(Z(0, 0))) < 1e-13);
  // identities Z phi1 = phi0 - I and Z phi2 = phi1 - I
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(2, 2);
  CHECK((Z * p.phi1 - (p.phi0 - I)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((Z * p.phi2 - (p.phi1 - I)).cwiseAbs().maxCoeff() < 1e-13);
  // large stiff entries stay finite and accurate
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(1, 1);
  S(0, 0) = -4000.0;
  const PhiFunctions q = phi_functions(S);
  CHECK(std::abs(q.phi1(0, 0) - phi1(S(0, 0))) < 1e-15);
  CHECK(std::abs(q.phi0(0, 0)) < 1e-300);
}
