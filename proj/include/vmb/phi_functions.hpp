#pragma once
// phi-functions of a complex matrix for exponential integrators:
// phi0 = e^Z, phi1 = (e^Z - I)/Z, phi2 = (e^Z - I - Z)/Z^2.
#include <Eigen/Dense>

namespace vmb {

struct PhiFunctions {
  Eigen::MatrixXcd phi0, phi1, phi2;
};

// scaling and squaring on a truncated Taylor series
PhiFunctions phi_functions(const Eigen::MatrixXcd& Z);

}  // namespace vmb
