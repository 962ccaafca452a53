#include <doctest.h>

#include <cmath>
#include <random>

#include "vmb/errors.hpp"
#include "vmb/kinetic_solver.hpp"

using namespace vmb;

namespace {

const cplx I1(0.0, 1.0);

std::shared_ptr<const VelocityBasis> basis(int N) { return std::make_shared<const VelocityBasis>(N); }

const CollisionBackend& relaxation6() {
  static const CollisionBackend c = CollisionBackend::build(BackendKind::relaxation, basis(6));
  return c;
}

// random admissible state on a 1D grid: div B = 0 and eps div E = n
KineticState random_state(const KineticSolver& solver, double eps, double amp, std::uint64_t seed) {
  const SpatialGrid& g = solver.grid();
  const int M = solver.backend().basis().size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  KineticState s = solver.zero_state(eps);
  for (int m : g.retained_modes()) {
    auto z = [&]() { return m == 0 ? cplx(nd(rng), 0.0) : cplx(nd(rng), nd(rng)); };
    for (int a = 0; a < M; ++a) {
      s.f(m, a) = amp * z() / (1.0 + solver.backend().basis().mode(a).degree());
      s.h(m, a) = amp * z() / (1.0 + solver.backend().basis().mode(a).degree());
    }
    for (int d = 0; d < 3; ++d) {
      s.E(m, d) = amp * z();
      s.B(m, d) = amp * z();
    }
    if (m != 0) s.B(m, 0) = 0.0;
    const double k = g.wavevector(m)[0];
    s.h(m, 0) = eps * I1 * k * s.E(m, 0);
  }
  s.B(0, 0) = 0.0;
  return s;
}

}  // namespace

TEST_CASE("init examples") {
  const SpatialGrid g(1, 16);
  const KineticSolver solver(g, relaxation6());
  const KineticState z = solver.init_state(InitKind::well_prepared, zero_data(g), 0.3);
  CHECK(z.f.cwiseAbs().maxCoeff() == 0.0);
  CHECK(z.h.cwiseAbs().maxCoeff() == 0.0);
  CHECK(z.E.cwiseAbs().maxCoeff() == 0.0);

  SingleModeSpec spec;
  spec.theta_amp = 0.0;
  spec.b_amp = 0.0;
  const FluidData data = single_mode_data(g, spec);
  const KineticState s = solver.init_state(InitKind::well_prepared, data, 0.3);
  // f = u0 . v: only the v2 coefficient at k = +-1
  const SpecField u = g.forward(data.u);
  for (int m = 0; m < g.num_modes(); ++m)
    for (int a = 0; a < s.f.cols(); ++a) {
      const cplx want = a == 2 ? u(m, 1) : cplx(0.0);
      CHECK(std::abs(s.f(m, a) - want) < 1e-15);
    }
  CHECK(s.h.cwiseAbs().maxCoeff() == 0.0);
  CHECK(solver.diagnostics(s).gauss_residual == 0.0);

  const KineticState full = solver.init_state(InitKind::well_prepared, single_mode_data(g, {}), 0.3);
  const DiagnosticsRecord d = solver.diagnostics(full);
  CHECK(std::abs(d.mass) < 1e-15);
  CHECK(std::abs(d.charge) < 1e-15);
  // theta mean compensates the magnetic energy so the conserved energy is zero
  CHECK(std::abs(d.energy) < 1e-15);
  // rho + theta = 0 away from the mean
  const SpecField rt = solver.density(full) + solver.temperature(full);
  CHECK(rt.bottomRows(rt.rows() - 1).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("init rejects non-solenoidal data and bad eps") {
  const SpatialGrid g(1, 16);
  const KineticSolver solver(g, relaxation6());
  FluidData d = zero_data(g);
  for (int q = 0; q < g.num_points(); ++q) d.u(q, 0) = std::sin(g.point(q)[0]);
  CHECK_THROWS_AS(solver.init_state(InitKind::well_prepared, d, 0.5), InvalidArgument);
  d = zero_data(g);
  for (int q = 0; q < g.num_points(); ++q) d.B(q, 0) = std::cos(g.point(q)[0]);
  CHECK_THROWS_AS(solver.init_state(InitKind::well_prepared, d, 0.5), InvalidArgument);
  CHECK_THROWS_AS(solver.zero_state(0.0), InvalidArgument);
  CHECK_THROWS_AS(solver.zero_state(1.5), InvalidArgument);
}

TEST_CASE("general init perturbs only the microscopic part") {
  const SpatialGrid g(1, 16);
  const KineticSolver solver(g, relaxation6());
  InitOptions io;
  io.micro_amp = 0.01;
  io.seed = 4;
  const FluidData data = single_mode_data(g, {});
  const KineticState a = solver.init_state(InitKind::well_prepared, data, 0.3, io);
  const KineticState b = solver.init_state(InitKind::general, data, 0.3, io);
  const Eigen::MatrixXd K = relaxation6().basis().hydro_kernel();
  const SpecField df = b.f - a.f;
  CHECK(df.cwiseAbs().maxCoeff() > 1e-4);
  CHECK((df * K.cast<cplx>()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(b.h.col(0).cwiseAbs().maxCoeff() == 0.0);
  const KineticState c = solver.init_state(InitKind::general, data, 0.3, io);
  CHECK((c.f - b.f).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rhs: trivial states") {
  const SpatialGrid g(1, 16);
  const KineticSolver solver(g, relaxation6());
  const StateDerivative d0 = solver.rhs_eval(solver.zero_state(0.5)).total();
  CHECK(d0.f.cwiseAbs().maxCoeff() == 0.0);
  CHECK(d0.h.cwiseAbs().maxCoeff() == 0.0);
  CHECK(d0.E.cwiseAbs().maxCoeff() == 0.0);
  KineticState c = solver.zero_state(0.5);
  c.f(0, 0) = 2.5;
  const StateDerivative d1 = solver.rhs_eval(c).total();
  CHECK(d1.f.cwiseAbs().maxCoeff() < 1e-13);
  CHECK(d1.h.cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("rhs: charge moment identity and streaming against a dense reference") {
  const SpatialGrid g(1, 16);
  const KineticSolver solver(g, relaxation6());
  const VelocityBasis& b = relaxation6().basis();
  for (double eps : {1.0, 0.3}) {
    const KineticState s = random_state(solver, eps, 0.01, 17);
    const RhsSplit r = solver.rhs_eval(s);
    const StateDerivative t = r.total();
    const SpecField j = solver.current(s);
    const SpecField divj = divergence(g, j);
    CHECK((t.h.col(0) + divj).cwiseAbs().maxCoeff() < 1e-14);
    // streaming part alone equals -(i k / eps) V1 f with V1 from quadrature
    KineticOptions off;
    off.collision = false;
    off.fields = false;
    off.bilinear = false;
    const KineticSolver free(g, relaxation6(), off);
    const StateDerivative st = free.rhs_eval(s).total();
    Eigen::MatrixXd V1(b.size(), b.size());
    const Eigen::MatrixXd& P = b.values_at_nodes();
    V1 = P.transpose() * (b.weights().array() * b.nodes().col(0).array()).matrix().asDiagonal() * P;
    for (int m : g.retained_modes()) {
      const double k = g.wavevector(m)[0];
      const Eigen::VectorXcd ref = -(I1 * k / eps) * (V1.cast<cplx>() * s.f.row(m).transpose());
      CHECK((st.f.row(m).transpose() - ref).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("step: zero state stays zero") {
  const SpatialGrid g(1, 16);
  const KineticSolver solver(g, relaxation6());
  const KineticState s = solver.step(solver.zero_state(0.2), 0.01);
  CHECK(s.f.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.E.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.t == doctest::Approx(0.01));
  const RunResult r = solver.run(solver.zero_state(0.2), 0.05, 0.01, 1);
  for (const auto& d : r.records) {
    CHECK(d.energy_H == 0.0);
    CHECK(d.dissipation_D == 0.0);
    CHECK(d.mass == 0.0);
  }
}

TEST_CASE("step: uniform microscopic mode relaxes exactly") {
  const SpatialGrid g(1, 8);
  KineticOptions o;
  o.fields = false;
  o.bilinear = false;
  const KineticSolver solver(g, relaxation6(), o);
  const VelocityBasis& b = relaxation6().basis();
  const double eps = 0.1, dt = 0.003;
  KineticState s = solver.zero_state(eps);
  const int a12 = b.index_of(1, 1, 0);
  s.f(0, a12) = 1.0;
  const KineticState n = solver.step(s, dt);
  CHECK(n.f(0, a12).real() == doctest::Approx(std::exp(-dt / (eps * eps))).epsilon(1e-12));
  CHECK(std::abs(n.f(0, 0)) < 1e-15);
}

TEST_CASE("step: a magnetic mode drives the electric field by its curl") {
  const SpatialGrid g(1, 8);
  const KineticSolver solver(g, relaxation6());
  const double eps = 0.5, dt = 1e-4;
  KineticState s = solver.zero_state(eps);
  const int m1 = g.mode_of(1, 0, 0);
  s.B(m1, 2) = 1e-3;  // B = (0, 0, 2e-3 cos x)
  const KineticState n = solver.step(s, dt);
  // eps dE/dt = curl B = (0, -i k B3, 0) at leading order
  const cplx expect = -I1 * 1e-3 * dt / eps;
  CHECK(std::abs(n.E(m1, 1) - expect) < 1e-3 * std::abs(expect));
  CHECK(std::abs(n.E(m1, 0)) + std::abs(n.E(m1, 2)) < 1e-18);
}

TEST_CASE("step: CFL violation and run context") {
  const SpatialGrid g(1, 8);
  const KineticSolver solver(g, relaxation6());
  SingleModeSpec big{0.5, 0.5, 0.5, 1};
  const KineticState s = solver.init_state(InitKind::well_prepared, single_mode_data(g, big), 0.1);
  CHECK_THROWS_AS(solver.step(s, 1.0), CFLViolation);
  try {
    solver.run(s, 10.0, 1.0, 1);
    FAIL("expected CFLViolation");
  } catch (const CFLViolation& e) {
    CHECK(std::string(e.what()).find("at t =") != std::string::npos);
  }
}

TEST_CASE("constraints and continuity propagate") {
  const SpatialGrid g(1, 16);
  const KineticSolver solver(g, relaxation6());
  KineticState s = random_state(solver, 0.3, 1e-3, 23);
  double worst_cont = 0.0;
  for (int i = 0; i < 200; ++i) {
    StepInfo info;
    s = solver.step(s, 0.002, &info);
    worst_cont = std::max(worst_cont, info.continuity_residual);
  }
  const DiagnosticsRecord d = solver.diagnostics(s);
  CHECK(d.div_b < 1e-10);
  CHECK(d.gauss_residual < 1e-8);
  CHECK(worst_cont < 1e-10);
  CHECK(std::abs(d.charge) < 1e-12);

  KineticOptions o;
  o.gauss_projection_every = 1;
  const KineticSolver proj(g, relaxation6(), o);
  KineticState p = random_state(proj, 0.3, 1e-3, 23);
  p.E(g.mode_of(1, 0, 0), 0) += 1e-4;  // break Gauss, then project
  p = proj.step(p, 0.002);
  CHECK(proj.diagnostics(p).gauss_residual < 1e-12);
}

TEST_CASE("pure transport and collision dissipate the L2 norm") {
  const SpatialGrid g(1, 16);
  KineticOptions o;
  o.fields = false;
  o.bilinear = false;
  const KineticSolver solver(g, relaxation6(), o);
  KineticState s = random_state(solver, 0.5, 1e-2, 31);
  double prev = l2_norm_sq(g, s.f);
  for (int i = 0; i < 50; ++i) {
    s = solver.step(s, 0.01);
    const double now = l2_norm_sq(g, s.f);
    CHECK(now <= prev * (1 + 1e-13));
    prev = now;
  }
}

TEST_CASE("free streaming matches the characteristic solution") {
  // f0 = cos(x1): f(t) = cos(x1 - v1 t / eps), whose Hermite coefficients at
  // k = 1 are (1/2) (-i tau)^n exp(-tau^2/2) / sqrt(n!) on psi_{n00}, tau = t / eps.
  const SpatialGrid g(1, 8);
  const auto b10 = std::make_shared<const VelocityBasis>(10);
  const auto be = CollisionBackend::build(BackendKind::relaxation, b10);
  KineticOptions o;
  o.collision = false;
  o.fields = false;
  o.bilinear = false;
  const KineticSolver solver(g, be, o);
  const double eps = 0.5;
  KineticState s = solver.zero_state(eps);
  const int m1 = g.mode_of(1, 0, 0);
  s.f(m1, 0) = 0.5;
  const double t_end = 0.5 * eps;  // tau = 0.5
  const RunResult r = solver.run(s, t_end, t_end / 20, 20);
  const double tau = t_end / eps;
  double err = 0.0;
  double fact = 1.0;
  for (int n = 0; n <= 10; ++n) {
    if (n > 0) fact *= n;
    const cplx want = 0.5 * std::pow(-I1 * tau, n) * std::exp(-tau * tau / 2) / std::sqrt(fact);
    err = std::max(err, std::abs(r.final_state.f(m1, b10->index_of(n, 0, 0)) - want));
  }
  CHECK(err < 1e-6);
}

TEST_CASE("energy functional of a well-prepared run stays bounded") {
  const SpatialGrid g(1, 16);
  const KineticSolver solver(g, relaxation6());
  const KineticState s = solver.init_state(InitKind::well_prepared, single_mode_data(g, {}), 0.2);
  const RunResult r = solver.run(s, 0.2, 0.001, 20);
  const double h0 = r.records.front().energy_H;
  CHECK(h0 > 0.0);
  for (const auto& d : r.records) {
    CHECK(d.energy_H <= 2.0 * h0);
    CHECK(d.dissipation_D >= 0.0);
  }
}
