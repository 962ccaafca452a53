#pragma once
// Shared macroscopic initial data (u0, theta0, B0) on a grid.
#include "vmb/spatial_grid.hpp"

namespace vmb {

struct FluidData {
  PhysField u;      // points x 3
  PhysField theta;  // points x 1
  PhysField B;      // points x 3
};

struct SingleModeSpec {
  double u_amp = 0.01;
  double theta_amp = 0.01;
  double b_amp = 0.01;
  int wavenumber = 1;
};

// u0 = (0, a cos kx1, 0), theta0 = b cos kx1, B0 = (0, 0, c sin kx1);
// all solenoidal and mean-zero.
FluidData single_mode_data(const SpatialGrid& grid, const SingleModeSpec& spec);
FluidData zero_data(const SpatialGrid& grid);

// max |div w| over the spectrum of a 3-component physical field
double divergence_residual(const SpatialGrid& grid, const PhysField& w);

}  // namespace vmb
