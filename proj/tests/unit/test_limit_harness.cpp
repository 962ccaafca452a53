#include <doctest.h>

#include <cmath>

#include "vmb/errors.hpp"
#include "vmb/io.hpp"
#include "vmb/limit_harness.hpp"

using namespace vmb;

namespace {

ConvergenceReport two_rows(double e0, double e1) {
  ConvergenceReport r;
  for (auto [eps, err] : {std::pair{0.4, e0}, std::pair{0.2, e1}}) {
    ConvergenceRow row;
    row.eps = eps;
    for (const auto& n : metric_names()) row.set(n, err);
    r.rows.push_back(row);
  }
  return r;
}

const CollisionBackend& relaxation6() {
  static const CollisionBackend c =
      CollisionBackend::build(BackendKind::relaxation, std::make_shared<const VelocityBasis>(6));
  return c;
}

// kinetic state carrying exactly the hydrodynamic part of an MHD state
KineticState lift(const KineticSolver& solver, const FluidState& m, double eps) {
  KineticState s = solver.zero_state(eps);
  s.t = m.t;
  const Eigen::VectorXd tm = solver.backend().basis().temperature_mode().coeffs;
  for (int k = 0; k < solver.grid().num_modes(); ++k) {
    s.f(k, 0) = -m.theta(k, 0);
    for (int d = 0; d < 3; ++d) s.f(k, 1 + d) = m.u(k, d);
    for (int a = 0; a < tm.size(); ++a)
      if (tm(a) != 0.0) s.f(k, a) += tm(a) * m.theta(k, 0);
  }
  s.B = m.B;
  return s;
}

}  // namespace

TEST_CASE("empirical orders") {
  const ConvergenceReport r = two_rows(0.4, 0.1);
  const auto p = empirical_orders(r, "err_u");
  REQUIRE(p.size() == 1);
  CHECK(p[0] == doctest::Approx(2.0).epsilon(1e-14));
  const ConvergenceReport s = two_rows(0.4 * 7.3, 0.1 * 7.3);
  CHECK(empirical_orders(s, "err_B")[0] == doctest::Approx(p[0]).epsilon(1e-14));
  CHECK(strictly_decreasing(r, "err_u"));
  CHECK_FALSE(strictly_decreasing(two_rows(0.1, 0.1), "err_u"));
  CHECK(std::isnan(empirical_orders(two_rows(0.0, 0.0), "err_u")[0]));
}

TEST_CASE("report CSV: empty, round trip, summary") {
  const ConvergenceReport empty;
  const std::string header = report_csv(empty);
  CHECK(header == "eps,metric,value\n");
  CHECK(parse_report_csv(header).rows.empty());

  ConvergenceReport r = two_rows(0.1 / 3.0, 1e-300);
  r.rows[0].set("err_theta", 0.1 + 0.2);
  const std::string text = report_csv(r);
  const ConvergenceReport back = parse_report_csv(text);
  REQUIRE(back.rows.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.rows[i].eps == r.rows[i].eps);
    CHECK(back.rows[i].values == r.rows[i].values);
  }
  CHECK(report_csv(back) == text);
  CHECK_THROWS_AS(parse_report_csv("eps,metric,value\n0.1,err_u,abc\n"), TypeMismatch);

  const std::string js = report_summary_json(r, SweepConfig{});
  CHECK(js.find("\"orders\"") != std::string::npos);
  CHECK(js.find("trapezoidal") != std::string::npos);
}

TEST_CASE("emit_report surfaces path errors") {
  const std::string blocker = "vmb_blocker_file";
  write_text_file(blocker, "x");
  CHECK_THROWS_AS(emit_report(two_rows(1, 0.5), SweepConfig{}, blocker + "/sub"), IoError);
  std::remove(blocker.c_str());
}

TEST_CASE("compute_errors: manufactured states") {
  const SpatialGrid g(1, 16);
  const KineticSolver solver(g, relaxation6());
  const TransportCoefficients tc = compute_coefficients(relaxation6());
  const MhdSolver mhd(g);
  SingleModeSpec spec;
  spec.b_amp = 0.0;
  const auto tr = mhd.run(mhd.make_state(single_mode_data(g, spec), fluid_coefficients(tc)), 0.05, 0.01, 1);
  const double eps = 0.1;
  std::vector<KineticState> kin;
  for (const auto& m : tr.samples) kin.push_back(lift(solver, m, eps));
  ErrorContext ctx{&g, &solver, &tc, 2, 0.0};
  const ConvergenceRow zero = compute_errors(kin, tr.samples, ctx);
  for (const char* n : {"err_u", "err_theta", "err_B", "err_f", "err_h", "err_n", "ohm_residual", "ampere_residual"})
    CHECK(zero.get(n) < 1e-15);

  // j = sigma (E + u x B) + delta e2 cos(x1); with B = 0 that is E + delta e2 cos x1
  const double delta = 1e-3;
  const int m1 = g.mode_of(1, 0, 0);
  std::vector<KineticState> off = kin;
  for (auto& s : off) {
    s.E(m1, 0) = 0.0;
    s.E(m1, 2) = cplx(2e-3, 1e-3);
    s.h(m1, 3) = eps * tc.sigma * s.E(m1, 2);
    s.h(m1, 2) = eps * 0.5 * delta;
  }
  const ConvergenceRow row = compute_errors(off, tr.samples, ctx);
  // ||delta cos x1||^2_{H^1} = delta^2 * vol / 2 * (1 + 1), constant over [0, 0.05]
  const double expect = std::sqrt(0.05 * delta * delta * g.volume());
  CHECK(row.get("ohm_residual") == doctest::Approx(expect).epsilon(1e-12));
  CHECK(row.get("err_u") < 1e-15);

  std::vector<FluidState> shorter(tr.samples.begin(), tr.samples.end() - 1);
  CHECK_THROWS_AS(compute_errors(kin, shorter, ctx), SamplingMismatch);
  std::vector<KineticState> shifted = kin;
  shifted[2].t += 1e-3;
  CHECK_THROWS_AS(compute_errors(shifted, tr.samples, ctx), SamplingMismatch);
}

TEST_CASE("sweep with zero data reports zero errors and is deterministic") {
  const SpatialGrid g(1, 8);
  const TransportCoefficients tc = compute_coefficients(relaxation6());
  SweepConfig cfg;
  cfg.eps_list = {0.4, 0.2};
  cfg.data = {0.0, 0.0, 0.0, 1};
  cfg.t_end = 0.01;
  cfg.dt = 0.001;
  const SweepResult r = run_sweep(cfg, g, relaxation6(), tc);
  for (const auto& row : r.report.rows)
    for (double v : row.values) CHECK(v == 0.0);

  cfg.data = {};
  cfg.t_end = 0.02;
  const std::string a = report_csv(run_sweep(cfg, g, relaxation6(), tc).report);
  cfg.jobs = 2;
  const std::string b = report_csv(run_sweep(cfg, g, relaxation6(), tc).report);
  CHECK(a == b);

  cfg.eps_list = {0.2, 0.4};
  CHECK_THROWS_AS(run_sweep(cfg, g, relaxation6(), tc), InvalidArgument);
}

TEST_CASE("conservation drift and energy ratio") {
  std::vector<DiagnosticsRecord> rec(3);
  rec[0].energy_H = 2.0;
  rec[1].energy_H = 3.0;
  rec[2].energy_H = 1.0;
  rec[1].mass = 1e-9;
  rec[2].momentum[1] = -4e-9;
  CHECK(energy_ratio(rec) == doctest::Approx(1.5));
  CHECK(conservation_drift(rec, 2.0) == doctest::Approx(2e-9));
  CHECK(energy_ratio({}) == 0.0);
}
