// Acceptance checks 1-9. One PASS/FAIL line per criterion; exit status is
// nonzero when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "vmb/cli.hpp"
#include "vmb/collision.hpp"
#include "vmb/io.hpp"
#include "vmb/kinetic_solver.hpp"
#include "vmb/limit_harness.hpp"
#include "vmb/mhd_solver.hpp"
#include "vmb/transport.hpp"

using namespace vmb;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%.1f s)", secs);
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " | " << o.detail << buf
            << std::endl;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

int cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"vmbl"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (rc != 0) std::cerr << err.str();
  return rc;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "vmb_acceptance";
  fs::create_directories(work);
  const std::string cache = (work / "cache").string();

  report(1, "relaxation transport coefficients", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto be = CollisionBackend::build(BackendKind::relaxation, std::make_shared<const VelocityBasis>(6));
    const TransportCoefficients tc = compute_coefficients(be);
    const double secs = seconds_since(t0);
    const double err = std::max({std::abs(tc.nu - 2.0 / 3.0), std::abs(tc.kappa - 1.0), std::abs(tc.sigma - 1.0)});
    return Outcome{err <= 1e-10 && secs < 1.0,
                   "nu=" + format_double(tc.nu) + " kappa=" + format_double(tc.kappa) + " sigma=" +
                       format_double(tc.sigma) + " max err " + sci(err) + " (tol 1e-10), " + sci(secs) + " s"};
  });

  report(2, "hard-sphere backend", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    ensure_directory(cache);
    auto make = [&](int N) {
      auto b = std::make_shared<const VelocityBasis>(N);
      return CollisionBackend::build_cached(BackendKind::hard_sphere, b,
                                            cache + "/hs_N" + std::to_string(N) + ".bin");
    };
    const CollisionBackend h6 = make(6), h8 = make(8);
    const CoercivityCertificate c = verify_assumptions(h6, 0);
    const TransportCoefficients a = compute_coefficients(h6), b = compute_coefficients(h8);
    const double drift = std::max({std::abs(a.nu - b.nu) / b.nu, std::abs(a.kappa - b.kappa) / b.kappa,
                                   std::abs(a.sigma - b.sigma) / b.sigma});
    const double secs = seconds_since(t0);
    const bool ok = c.kernel_residual <= 1e-6 && c.symmetry_residual <= 1e-10 && c.lambda_est > 0.0 &&
                    c.lambda_est_charge > 0.0 && a.nu > 0 && a.kappa > 0 && a.sigma > 0 && drift <= 0.01 &&
                    secs < 300.0;
    return Outcome{ok, "kernel " + sci(c.kernel_residual) + " (tol 1e-6), symmetry " + sci(c.symmetry_residual) +
                           " (tol 1e-10), lambda_est " + sci(c.lambda_est) + "/" + sci(c.lambda_est_charge) +
                           ", nu kappa sigma = " + sci(a.nu) + " " + sci(a.kappa) + " " + sci(a.sigma) +
                           ", 6->8 change " + sci(100 * drift) + "% (tol 1%)"};
  });

  report(3, "assumption suite (idempotence, coercivity, Gamma orthogonality)", [&] {
    std::string detail;
    bool ok = true;
    for (BackendKind k : {BackendKind::relaxation, BackendKind::hard_sphere}) {
      const auto be = CollisionBackend::build_cached(k, std::make_shared<const VelocityBasis>(6),
                                                     k == BackendKind::hard_sphere ? cache + "/hs_N6.bin" : "");
      const CoercivityCertificate c = verify_assumptions(be, 100, 2024);
      ok = ok && c.projector_idempotence <= 1e-12 && c.coercivity_margin >= -1e-12 &&
           c.gamma_orth_residual <= 1e-10 && c.lambda_est > 0.0;
      detail += to_string(k) + ": idempotence " + sci(c.projector_idempotence) + ", coercivity margin " +
                sci(c.coercivity_margin) + ", Gamma residual " + sci(c.gamma_orth_residual) + "; ";
    }
    return Outcome{ok, detail + "100 random pairs, tol 1e-10"};
  });

  // criteria 4 and 5 share one run
  Outcome c4, c5;
  {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const SpatialGrid grid(1, 32);
      const auto be = CollisionBackend::build(BackendKind::relaxation, std::make_shared<const VelocityBasis>(6));
      const KineticSolver solver(grid, be);
      KineticState s = solver.init_state(InitKind::well_prepared, single_mode_data(grid, {}), 0.2);
      const double scale = std::sqrt(grid.volume() * (l2_norm_sq(grid, s.f) + l2_norm_sq(grid, s.B)));
      std::vector<DiagnosticsRecord> rec{solver.diagnostics(s)};
      double cont = 0.0, divb = 0.0, gauss = 0.0;
      for (int i = 1; i <= 2000; ++i) {
        StepInfo info;
        s = solver.step(s, 0.0005, &info);
        cont = std::max(cont, info.continuity_residual);
        if (i % 50 == 0) {
          rec.push_back(solver.diagnostics(s));
          divb = std::max(divb, rec.back().div_b);
          gauss = std::max(gauss, rec.back().gauss_residual);
        }
      }
      const double drift = conservation_drift(rec, scale);
      const double secs = seconds_since(t0);
      c4 = {drift <= 1e-8 && divb <= 1e-10 && gauss <= 1e-8 && secs < 120.0,
            "eps 0.2, 32 modes x Hermite-6, 2000 steps: drift " + sci(drift) + " (tol 1e-8), div B " + sci(divb) +
                " (tol 1e-10), Gauss " + sci(gauss) + " (tol 1e-8), " + sci(secs) + " s"};
      c5 = {cont <= 1e-10, "max per-step |dn/dt + div j| " + sci(cont) + " (tol 1e-10) over 2000 steps"};
    } catch (const std::exception& e) {
      c4 = c5 = {false, std::string("exception: ") + e.what()};
    }
  }
  report(4, "global conservation laws", [&] { return c4; });
  report(5, "discrete continuity", [&] { return c5; });

  report(6, "MHD solver exactness", [] {
    const SpatialGrid grid(1, 32);
    const MhdSolver solver(grid);
    const FluidCoefficients c{1.0, 1.0, 1.0};
    double worst = 0.0;
    bool monotone = true;
    // magnetic decay over one diffusion time sigma / |k|^2
    {
      const FluidState s0 = solver.make_state(single_mode_data(grid, {0.0, 0.0, 0.05, 1}), c);
      const auto tr = solver.run(s0, c.sigma, 0.001, 1000);
      worst = std::max(worst, (tr.final_state.B - s0.B * std::exp(-1.0 / c.sigma)).cwiseAbs().maxCoeff() /
                                  s0.B.cwiseAbs().maxCoeff());
    }
    // viscous decay over one diffusion time
    {
      const FluidState s0 = solver.make_state(single_mode_data(grid, {0.05, 0.0, 0.0, 1}), c);
      const auto tr = solver.run(s0, 1.0 / c.nu, 0.001, 1000);
      worst = std::max(worst, (tr.final_state.u - s0.u * std::exp(-c.nu)).cwiseAbs().maxCoeff() /
                                  s0.u.cwiseAbs().maxCoeff());
    }
    // energy law with all couplings on
    {
      const FluidState s0 = solver.make_state(single_mode_data(grid, {0.3, 0.3, 0.3, 1}), c);
      const auto tr = solver.run(s0, 1.0, 0.001, 1000, 1);
      for (std::size_t i = 1; i < tr.records.size(); ++i) {
        const double e0 = tr.records[i - 1].kinetic_energy + tr.records[i - 1].magnetic_energy;
        const double e1 = tr.records[i].kinetic_energy + tr.records[i].magnetic_energy;
        monotone = monotone && e1 <= e0 * (1 + 1e-14);
      }
    }
    return Outcome{worst <= 1e-6 && monotone, "max relative mode error " + sci(worst) +
                                                  " (tol 1e-6), energy non-increasing: " + (monotone ? "yes" : "no")};
  });

  // criteria 7 and 8 read the same sweep; 9 repeats it
  const fs::path run_a = work / "converge_a", run_b = work / "converge_b";
  fs::remove_all(run_a);
  fs::remove_all(run_b);
  const auto t_sweep = std::chrono::steady_clock::now();
  const int rc_a = cli({"converge", "--out", run_a.string()});
  const double sweep_secs = seconds_since(t_sweep);

  report(7, "eps-sweep convergence to MHD", [&] {
    if (rc_a != 0) return Outcome{false, "converge exited with " + std::to_string(rc_a)};
    const ConvergenceReport r = parse_report_csv(read_text_file((run_a / "report.csv").string()));
    bool ok = sweep_secs < 1800.0;
    std::string detail;
    for (const char* m : {"err_u", "err_theta", "err_B", "err_h", "err_n", "ohm_residual", "ampere_residual"}) {
      const bool dec = strictly_decreasing(r, m);
      ok = ok && dec;
      if (!dec) detail += std::string(m) + " not decreasing; ";
    }
    for (const char* m : {"err_u", "err_theta", "err_B", "ohm_residual"}) {
      const auto p = empirical_orders(r, m);
      double lo = INFINITY;
      std::string ps;
      for (double x : p) {
        lo = std::min(lo, x);
        ps += (ps.empty() ? "" : ",") + sci(x);
      }
      const bool good = lo >= 0.8;
      ok = ok && good;
      detail += std::string(m) + " orders [" + ps + "]" + (good ? "" : " < 0.8") + "; ";
    }
    return Outcome{ok, detail + "eps 0.4..0.05, " + sci(sweep_secs) + " s"};
  });

  report(8, "energy functional bounded by twice its initial value", [&] {
    if (rc_a != 0) return Outcome{false, "converge exited with " + std::to_string(rc_a)};
    const ConvergenceReport r = parse_report_csv(read_text_file((run_a / "report.csv").string()));
    double worst = 0.0;
    for (const auto& row : r.rows) worst = std::max(worst, row.get("energy_ratio_max"));
    return Outcome{worst <= 2.0 && worst > 0.0, "max H(t)/H(0) over all runs " + format_double(worst)};
  });

  report(9, "determinism of converge output", [&] {
    const int rc_b = cli({"converge", "--out", run_b.string()});
    if (rc_a != 0 || rc_b != 0) return Outcome{false, "converge failed"};
    const std::string a = read_text_file((run_a / "report.csv").string());
    const std::string b = read_text_file((run_b / "report.csv").string());
    return Outcome{a == b, std::string("report.csv ") + (a == b ? "byte-identical" : "differs") + " across runs (" +
                               std::to_string(a.size()) + " bytes)"};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
