#include "vmb/transport.hpp"

#include "vmb/errors.hpp"

namespace vmb {

VelocityFunction viscous_source(const VelocityBasis& basis, int i, int j) {
  return basis.project([i, j](const Vec3& v) {
    const double s = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    return v[i] * v[j] - (i == j ? s / 3.0 : 0.0);
  });
}

VelocityFunction heat_source(const VelocityBasis& basis, int i) {
  return basis.project([i](const Vec3& v) {
    const double s = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    return v[i] * (0.5 * s - 2.5);
  });
}

TransportCoefficients compute_coefficients(const CollisionBackend& backend) {
  const VelocityBasis& basis = backend.basis();
  TransportCoefficients tc;
  double nu = 0.0, shear = 0.0, kappa = 0.0, sigma = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const VelocityFunction A = viscous_source(basis, i, j);
      tc.A_hat[i][j] = backend.solve_on_orthogonal(Species::sum, A);
      const double a = A.coeffs.dot(tc.A_hat[i][j].coeffs);
      nu += a;
      if (i != j) shear += a / 6.0;
    }
  for (int i = 0; i < 3; ++i) {
    const VelocityFunction B = heat_source(basis, i);
    tc.B_hat[i] = backend.solve_on_orthogonal(Species::sum, B);
    kappa += B.coeffs.dot(tc.B_hat[i].coeffs);
    const VelocityFunction v = basis.velocity(i);
    tc.v_tilde[i] = backend.solve_on_orthogonal(Species::difference, v);
    sigma += v.coeffs.dot(tc.v_tilde[i].coeffs);
  }
  tc.nu = nu / 15.0;
  tc.kappa = 2.0 * kappa / 15.0;
  tc.sigma = sigma / 3.0;
  tc.nu_shear = shear;
  if (!(tc.nu > 0.0 && tc.kappa > 0.0 && tc.sigma > 0.0 && tc.nu_shear > 0.0))
    throw SingularOperator("transport coefficients are not positive");
  return tc;
}

}  // namespace vmb
