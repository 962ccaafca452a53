#pragma once
// Transport coefficients nu, kappa, sigma from the cell problems
// L A_hat = A, L B_hat = B, Ls v_tilde = v.
#include <array>

#include "vmb/collision.hpp"

namespace vmb {

struct TransportCoefficients {
  double nu = 0.0;
  double kappa = 0.0;
  double sigma = 0.0;
  // shear viscosity seen by the fluid limit: mean of <A_ij, A_hat_ij> over i != j.
  // Equals (3/2) nu for a rotation-invariant operator.
  double nu_shear = 0.0;
  std::array<std::array<VelocityFunction, 3>, 3> A_hat;
  std::array<VelocityFunction, 3> B_hat;
  std::array<VelocityFunction, 3> v_tilde;
};

// A_ij = v_i v_j - |v|^2/3 delta_ij and B_i = v_i (|v|^2/2 - 5/2)
VelocityFunction viscous_source(const VelocityBasis& basis, int i, int j);
VelocityFunction heat_source(const VelocityBasis& basis, int i);

TransportCoefficients compute_coefficients(const CollisionBackend& backend);

}  // namespace vmb
