#include "vmb/phi_functions.hpp"

#include <cmath>

namespace vmb {

PhiFunctions phi_functions(const Eigen::MatrixXcd& Z) {
  const Eigen::Index n = Z.rows();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
  const double norm1 = Z.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > 0.25) s = static_cast<int>(std::ceil(std::log2(norm1 / 0.25)));
  const Eigen::MatrixXcd X = Z / std::ldexp(1.0, s);

  // phi2(X) = sum_i X^i / (i+2)!, Horner
  constexpr int m = 14;
  std::vector<double> inv_fact(m + 3);
  inv_fact[0] = 1.0;
  for (int i = 1; i <= m + 2; ++i) inv_fact[i] = inv_fact[i - 1] / i;
  Eigen::MatrixXcd p2 = inv_fact[m + 2] * I;
  for (int i = m - 1; i >= 0; --i) p2 = X * p2 + inv_fact[i + 2] * I;

  PhiFunctions r;
  r.phi2 = std::move(p2);
  r.phi1 = I + X * r.phi2;
  r.phi0 = I + X * r.phi1;
  // phi_k(2z) = 2^{-k} [e^z phi_k(z) + sum_{j=1..k} phi_j(z)/(k-j)!]
  for (int i = 0; i < s; ++i) {
    Eigen::MatrixXcd e_phi2 = r.phi0 * r.phi2;
    Eigen::MatrixXcd e_phi1 = r.phi0 * r.phi1;
    r.phi2 = 0.25 * (e_phi2 + r.phi1 + r.phi2);
    r.phi1 = 0.5 * (e_phi1 + r.phi1);
    r.phi0 = r.phi0 * r.phi0;
  }
  return r;
}

}  // namespace vmb
