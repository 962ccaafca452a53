#include "vmb/fluid_data.hpp"

#include <cmath>

#include "vmb/errors.hpp"

namespace vmb {

FluidData zero_data(const SpatialGrid& grid) {
  const int np = grid.num_points();
  return {PhysField::Zero(np, 3), PhysField::Zero(np, 1), PhysField::Zero(np, 3)};
}

FluidData single_mode_data(const SpatialGrid& grid, const SingleModeSpec& spec) {
  if (spec.wavenumber < 1 || 3 * spec.wavenumber >= grid.modes())
    throw InvalidArgument("data wavenumber must lie inside the retained spectrum");
  FluidData d = zero_data(grid);
  for (int p = 0; p < grid.num_points(); ++p) {
    const double x = spec.wavenumber * grid.point(p)[0];
    d.u(p, 1) = spec.u_amp * std::cos(x);
    d.theta(p, 0) = spec.theta_amp * std::cos(x);
    d.B(p, 2) = spec.b_amp * std::sin(x);
  }
  return d;
}

double divergence_residual(const SpatialGrid& grid, const PhysField& w) {
  const SpecField d = divergence(grid, grid.forward(w));
  return d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace vmb
