#pragma once
// Fluctuation system of the two-species Vlasov-Maxwell-Boltzmann equations
// on a periodic box:
//   f_t + v.grad f / eps + L f / eps^2 = (E.v) h - (E + v x B/eps).grad_v h + Gamma(f,f)/eps
//   h_t + v.grad h / eps - E.v / eps + Ls h / eps^2 = (E.v) f - (E + v x B/eps).grad_v f + Gamma(h,f)/eps
//   eps E_t - curl B = -j,  B_t + curl E = 0,  j = (1/eps) int h v M dv.
// The linear part is propagated exactly per Fourier mode; the Lorentz and
// Gamma terms use second-order exponential time differencing.
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "vmb/collision.hpp"
#include "vmb/fluid_data.hpp"
#include "vmb/spatial_grid.hpp"
#include "vmb/transport.hpp"

namespace vmb {

enum class InitKind { well_prepared, general };
InitKind parse_init_kind(const std::string& s);

struct KineticState {
  double t = 0.0;
  double eps = 1.0;
  SpecField f, h;  // modes x velocity modes
  SpecField E, B;  // modes x 3
};

struct KineticOptions {
  bool collision = true;
  bool fields = true;    // Maxwell, E.v coupling and Lorentz terms
  bool bilinear = true;  // Gamma terms
  int gauss_projection_every = 0;
  double cfl = 0.5;
  int sobolev_s = 2;
};

struct InitOptions {
  double micro_amp = 0.0;  // general data only
  std::uint64_t seed = 0;
  bool energy_compensation = true;  // theta mean balances the magnetic energy
  // start E and h on the Ohm's-law manifold: E = curl B / sigma, h = eps sum_d E_d v_tilde_d
  bool ohmic_fields = false;
  const TransportCoefficients* coeffs = nullptr;  // required with ohmic_fields
};

struct StateDerivative {
  SpecField f, h, E, B;
};

struct RhsSplit {
  StateDerivative stiff_collision;
  StateDerivative stiff_maxwell;  // curl terms, -j/eps and the E.v/eps source
  StateDerivative nonstiff;       // free streaming and the nonlinear terms
  StateDerivative total() const;
};

struct StepInfo {
  double continuity_residual = 0.0;  // |n_new - n_old + div(int j dt)| / dt
  double rate = 0.0;                 // explicit rate used in the CFL test
};

struct DiagnosticsRecord {
  double t = 0.0;
  Vec3 momentum{};  // int (u + eps E x B)
  double energy = 0.0;  // int (theta + eps (eps |E|^2 + |B|^2)/3)
  double mass = 0.0;
  double charge = 0.0;
  Vec3 b_mean{};  // int B
  double div_b = 0.0;
  double gauss_residual = 0.0;
  double energy_H = 0.0;
  double dissipation_D = 0.0;
  double continuity_residual = 0.0;
};

struct RunResult {
  KineticState final_state;
  std::vector<DiagnosticsRecord> records;
};

class KineticSolver {
 public:
  KineticSolver(const SpatialGrid& grid, const CollisionBackend& backend, KineticOptions options = {});

  const SpatialGrid& grid() const { return grid_; }
  const CollisionBackend& backend() const { return backend_; }
  const KineticOptions& options() const { return opt_; }

  KineticState zero_state(double eps) const;
  KineticState init_state(InitKind kind, const FluidData& data, double eps, const InitOptions& io = {}) const;

  RhsSplit rhs_eval(const KineticState& s) const;
  // nonlinear forcing of the f and h equations
  void nonlinear(const KineticState& s, SpecField& nf, SpecField& nh) const;

  KineticState step(const KineticState& s, double dt, StepInfo* info = nullptr) const;

  using Observer = std::function<void(const KineticState&)>;
  // observer sees the initial state and every observe_every-th step
  RunResult run(KineticState s, double t_end, double dt, int diag_every, const Observer& observer = {},
                int observe_every = 1) const;

  DiagnosticsRecord diagnostics(const KineticState& s, double continuity = 0.0) const;

  // macroscopic fields (modes x components)
  SpecField density(const KineticState& s) const;      // rho
  SpecField velocity(const KineticState& s) const;     // u
  SpecField temperature(const KineticState& s) const;  // theta
  SpecField charge(const KineticState& s) const;       // n
  SpecField current(const KineticState& s) const;      // j

  void project_gauss(KineticState& s) const;

 private:
  struct Propagator {
    std::vector<Eigen::MatrixXcd> E, P1, P2;  // per retained mode
  };
  std::shared_ptr<const Propagator> propagator(double eps, double dt) const;
  Eigen::MatrixXcd linear_operator(int mode, double eps) const;
  double explicit_rate(const KineticState& s) const;

  const SpatialGrid& grid_;
  const CollisionBackend& backend_;
  KineticOptions opt_;
  int M_;
  std::array<Eigen::MatrixXd, 3> V_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<double, double>, std::shared_ptr<Propagator>> cache_;
};

}  // namespace vmb
