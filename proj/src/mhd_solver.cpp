#include "vmb/mhd_solver.hpp"

#include <cmath>
#include <sstream>

#include "vmb/errors.hpp"

namespace vmb {

FluidCoefficients fluid_coefficients(const TransportCoefficients& tc) { return {tc.nu_shear, tc.kappa, tc.sigma}; }

SpecField leray_project(const SpatialGrid& grid, const SpecField& w) {
  SpecField out = w;
  for (int m = 0; m < grid.num_modes(); ++m) {
    const double k2 = grid.k2(m);
    if (k2 == 0.0) continue;
    const Vec3 k = grid.wavevector(m);
    const cplx kw = k[0] * w(m, 0) + k[1] * w(m, 1) + k[2] * w(m, 2);
    for (int d = 0; d < 3; ++d) out(m, d) -= k[d] * kw / k2;
  }
  return out;
}

MhdSolver::MhdSolver(const SpatialGrid& grid, double cfl) : grid_(grid), cfl_(cfl) {
  if (cfl_ <= 0.0) throw InvalidArgument("cfl must be positive");
}

FluidState MhdSolver::make_state(const FluidData& data, const FluidCoefficients& c) const {
  if (!(c.nu > 0.0 && c.kappa > 0.0 && c.sigma > 0.0)) throw InvalidArgument("fluid coefficients must be positive");
  const double du = divergence_residual(grid_, data.u);
  const double db = divergence_residual(grid_, data.B);
  if (du > 1e-10 || db > 1e-10) throw InvalidArgument("fluid data are not solenoidal");
  FluidState s;
  s.u = grid_.forward(data.u);
  s.theta = grid_.forward(data.theta);
  s.B = grid_.forward(data.B);
  s.coeffs = c;
  return s;
}

namespace {
PhysField cross(const PhysField& a, const PhysField& b) {
  PhysField c(a.rows(), 3);
  c.col(0) = a.col(1).cwiseProduct(b.col(2)) - a.col(2).cwiseProduct(b.col(1));
  c.col(1) = a.col(2).cwiseProduct(b.col(0)) - a.col(0).cwiseProduct(b.col(2));
  c.col(2) = a.col(0).cwiseProduct(b.col(1)) - a.col(1).cwiseProduct(b.col(0));
  return c;
}
}  // namespace

void MhdSolver::nonlinear(const FluidState& s, SpecField& nu, SpecField& nt, SpecField& nb) const {
  const PhysField u = grid_.backward(s.u);
  const PhysField B = grid_.backward(s.B);
  const PhysField J = grid_.backward(curl(grid_, s.B));
  const PhysField gt = grid_.backward(gradient(grid_, s.theta));
  // u.grad u for each component
  PhysField adv(u.rows(), 3);
  for (int c = 0; c < 3; ++c) {
    const PhysField g = grid_.backward(gradient(grid_, s.u.col(c)));
    adv.col(c) = (u.array() * g.array()).rowwise().sum();
  }
  const PhysField lorentz = cross(J, B);
  nu = leray_project(grid_, grid_.forward(PhysField(lorentz - adv)));
  PhysField ta = -(u.array() * gt.array()).rowwise().sum();
  nt = grid_.forward(ta);
  nb = curl(grid_, grid_.forward(cross(u, B)));
}

FluidState MhdSolver::step(const FluidState& s, double dt) const {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  const PhysField u = grid_.backward(s.u);
  const PhysField B = grid_.backward(s.B);
  const double speed = (u.rows() ? u.rowwise().norm().maxCoeff() : 0.0) + (B.rows() ? B.rowwise().norm().maxCoeff() : 0.0);
  if (dt * speed > cfl_ * grid_.dx()) {
    std::ostringstream os;
    os << "dt = " << dt << " exceeds advective bound " << cfl_ * grid_.dx() / speed;
    throw CFLViolation(os.str());
  }
  const FluidCoefficients& c = s.coeffs;
  const int nk = grid_.num_modes();
  Eigen::VectorXd gu(nk), gt(nk), gb(nk);
  for (int m = 0; m < nk; ++m) {
    const double k2 = grid_.k2(m);
    gu(m) = std::exp(-c.nu * k2 * dt);
    gt(m) = std::exp(-c.kappa * k2 * dt);
    gb(m) = std::exp(-k2 * dt / c.sigma);
  }
  auto decay = [](const SpecField& a, const Eigen::VectorXd& g) {
    SpecField r = a;
    for (Eigen::Index m = 0; m < a.rows(); ++m) r.row(m) *= g(m);
    return r;
  };
  SpecField nu0, nt0, nb0;
  nonlinear(s, nu0, nt0, nb0);
  FluidState a = s;
  a.u = leray_project(grid_, decay(SpecField(s.u + dt * nu0), gu));
  a.theta = decay(SpecField(s.theta + dt * nt0), gt);
  a.B = leray_project(grid_, decay(SpecField(s.B + dt * nb0), gb));
  SpecField nu1, nt1, nb1;
  nonlinear(a, nu1, nt1, nb1);
  FluidState out = s;
  out.t = s.t + dt;
  out.u = leray_project(grid_, SpecField(0.5 * decay(s.u, gu) + 0.5 * (a.u + dt * nu1)));
  out.theta = 0.5 * decay(s.theta, gt) + 0.5 * (a.theta + dt * nt1);
  out.B = leray_project(grid_, SpecField(0.5 * decay(s.B, gb) + 0.5 * (a.B + dt * nb1)));
  if (!out.u.allFinite() || !out.theta.allFinite() || !out.B.allFinite())
    throw NonFinite("fluid state left the finite range at t = " + std::to_string(out.t));
  return out;
}

MhdDiagnostics MhdSolver::diagnostics(const FluidState& s) const {
  MhdDiagnostics d;
  d.t = s.t;
  d.kinetic_energy = 0.5 * l2_norm_sq(grid_, s.u);
  d.magnetic_energy = 0.5 * l2_norm_sq(grid_, s.B);
  d.theta_mean = s.theta(0, 0).real();
  for (int i = 0; i < 3; ++i) d.b_mean[i] = grid_.volume() * s.B(0, i).real();
  d.div_u = divergence(grid_, s.u).cwiseAbs().maxCoeff();
  d.div_b = divergence(grid_, s.B).cwiseAbs().maxCoeff();
  d.dissipation = s.coeffs.nu * (sobolev_norm_sq(grid_, s.u, 1) - l2_norm_sq(grid_, s.u)) +
                  (sobolev_norm_sq(grid_, s.B, 1) - l2_norm_sq(grid_, s.B)) / s.coeffs.sigma;
  return d;
}

MhdSolver::Trajectory MhdSolver::run(FluidState s, double t_end, double dt, int sample_every, int diag_every) const {
  if (!(t_end >= s.t)) throw InvalidArgument("t_end precedes the state time");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (sample_every < 1 || diag_every < 1) throw InvalidArgument("sampling cadence must be >= 1");
  const double span = t_end - s.t;
  const long long nsteps = std::max<long long>(0, std::llround(std::ceil(span / dt - 1e-9)));
  const double h = nsteps > 0 ? span / nsteps : dt;
  const double t0 = s.t;
  Trajectory tr;
  tr.samples.push_back(s);
  tr.records.push_back(diagnostics(s));
  for (long long i = 1; i <= nsteps; ++i) {
    try {
      s = step(s, h);
    } catch (const CFLViolation& e) {
      throw CFLViolation(std::string(e.what()) + " [at t = " + std::to_string(s.t) + "]");
    } catch (const NonFinite& e) {
      throw NonFinite(std::string(e.what()) + " [at t = " + std::to_string(s.t) + "]");
    }
    s.t = t0 + i * h;
    if (i % sample_every == 0) tr.samples.push_back(s);
    if (i % diag_every == 0 || i == nsteps) tr.records.push_back(diagnostics(s));
  }
  tr.final_state = std::move(s);
  return tr;
}

}  // namespace vmb
