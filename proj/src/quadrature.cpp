#include "vmb/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "vmb/errors.hpp"

namespace vmb {
namespace {

// Jacobi matrix with diagonal a, off-diagonal b; mu0 total mass of the weight.
Rule1D golub_welsch(const std::vector<double>& a, const std::vector<double>& b, double mu0) {
  const int n = static_cast<int>(a.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) J(i, i) = a[i];
  for (int i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = b[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Rule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = es.eigenvalues()(i);
    const double q = es.eigenvectors()(0, i);
    r.weights[i] = mu0 * q * q;
  }
  return r;
}

void symmetrize(Rule1D& r) {
  // exact antipodal symmetry for symmetric weights
  const std::size_t n = r.nodes.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t j = n - 1 - i;
    const double x = 0.5 * (r.nodes[j] - r.nodes[i]);
    const double w = 0.5 * (r.weights[i] + r.weights[j]);
    r.nodes[i] = -x;
    r.nodes[j] = x;
    r.weights[i] = r.weights[j] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
}

}  // namespace

Rule1D gauss_hermite(int n) {
  if (n < 1) throw InvalidArgument("gauss_hermite needs n >= 1");
  std::vector<double> a(n, 0.0), b(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) b[k - 1] = std::sqrt(static_cast<double>(k));
  Rule1D r = golub_welsch(a, b, 1.0);
  symmetrize(r);
  return r;
}

Rule1D gauss_laguerre(int n, double alpha) {
  if (n < 1) throw InvalidArgument("gauss_laguerre needs n >= 1");
  if (alpha <= -1.0) throw InvalidArgument("gauss_laguerre needs alpha > -1");
  std::vector<double> a(n), b(n > 1 ? n - 1 : 0);
  for (int k = 0; k < n; ++k) a[k] = 2.0 * k + alpha + 1.0;
  for (int k = 1; k < n; ++k) b[k - 1] = std::sqrt(k * (k + alpha));
  return golub_welsch(a, b, std::tgamma(alpha + 1.0));
}

Rule1D gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("gauss_legendre needs n >= 1");
  std::vector<double> a(n, 0.0), b(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) b[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  Rule1D r = golub_welsch(a, b, 2.0);
  symmetrize(r);
  return r;
}

SphereRule product_sphere_rule(int n_polar, int n_azimuth) {
  if (n_polar < 1 || n_azimuth < 1) throw InvalidArgument("sphere rule needs positive sizes");
  const Rule1D gl = gauss_legendre(n_polar);
  SphereRule s;
  const double dphi = 2.0 * std::numbers::pi / n_azimuth;
  for (int i = 0; i < n_polar; ++i) {
    const double c = gl.nodes[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int j = 0; j < n_azimuth; ++j) {
      const double phi = (j + 0.5) * dphi;
      s.dirs.push_back({st * std::cos(phi), st * std::sin(phi), c});
      s.weights.push_back(gl.weights[i] * dphi);
    }
  }
  return s;
}

}  // namespace vmb
