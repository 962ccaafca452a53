#pragma once
// Incompressible resistive MHD with a passive temperature:
//   u_t + u.grad u - nu lap u + grad P = (curl B) x B,  div u = 0
//   theta_t + u.grad theta - kappa lap theta = 0
//   B_t - lap B / sigma = curl(u x B),  div B = 0
// Pseudo-spectral; diffusion by integrating factor, nonlinear terms by SSP-RK2.
#include <functional>
#include <vector>

#include "vmb/fluid_data.hpp"
#include "vmb/spatial_grid.hpp"
#include "vmb/transport.hpp"

namespace vmb {

struct FluidCoefficients {
  double nu = 1.0, kappa = 1.0, sigma = 1.0;
};
FluidCoefficients fluid_coefficients(const TransportCoefficients& tc);

struct FluidState {
  double t = 0.0;
  SpecField u;      // modes x 3
  SpecField theta;  // modes x 1
  SpecField B;      // modes x 3
  FluidCoefficients coeffs;
};

struct MhdDiagnostics {
  double t = 0.0;
  double kinetic_energy = 0.0;   // |u|^2 / 2
  double magnetic_energy = 0.0;  // |B|^2 / 2
  double theta_mean = 0.0;
  Vec3 b_mean{};
  double div_u = 0.0;
  double div_b = 0.0;
  double dissipation = 0.0;  // nu |grad u|^2 + |grad B|^2 / sigma
};

SpecField leray_project(const SpatialGrid& grid, const SpecField& w);

class MhdSolver {
 public:
  explicit MhdSolver(const SpatialGrid& grid, double cfl = 0.5);

  const SpatialGrid& grid() const { return grid_; }
  FluidState make_state(const FluidData& data, const FluidCoefficients& c) const;
  FluidState step(const FluidState& s, double dt) const;
  MhdDiagnostics diagnostics(const FluidState& s) const;

  // nonlinear tendencies (Leray-projected for u)
  void nonlinear(const FluidState& s, SpecField& nu, SpecField& nt, SpecField& nb) const;

  using Observer = std::function<void(const FluidState&)>;
  struct Trajectory {
    FluidState final_state;
    std::vector<FluidState> samples;
    std::vector<MhdDiagnostics> records;
  };
  // samples the initial state and every sample_every-th step
  Trajectory run(FluidState s, double t_end, double dt, int sample_every, int diag_every = 1) const;

 private:
  const SpatialGrid& grid_;
  double cfl_;
};

}  // namespace vmb
