#pragma once
// Gauss rules via Golub-Welsch, plus a product rule on the unit sphere.
#include <array>
#include <vector>

namespace vmb {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// weight (2 pi)^{-1/2} exp(-x^2/2); weights sum to 1
Rule1D gauss_hermite(int n);
// weight x^alpha exp(-x) on (0, inf); weights sum to Gamma(alpha+1)
Rule1D gauss_laguerre(int n, double alpha);
// weight 1 on [-1, 1]
Rule1D gauss_legendre(int n);

struct SphereRule {
  std::vector<std::array<double, 3>> dirs;
  std::vector<double> weights;  // sum to 4 pi
};

// Gauss-Legendre in cos(theta) times uniform azimuth. Antipodally symmetric
// when n_azimuth is even.
SphereRule product_sphere_rule(int n_polar, int n_azimuth);

}  // namespace vmb
