#pragma once
// eps-sweep: kinetic runs at decreasing eps against one MHD reference run,
// with time-integrated Sobolev error norms.
#include <string>
#include <vector>

#include "vmb/kinetic_solver.hpp"
#include "vmb/mhd_solver.hpp"
#include "vmb/transport.hpp"

namespace vmb {

struct SweepConfig {
  std::vector<double> eps_list{0.4, 0.2, 0.1, 0.05};
  SingleModeSpec data;
  double t_end = 0.5;
  double dt = 0.0005;
  int sample_every = 1;
  int diag_every = 10;
  int sobolev_s = 2;  // errors in L2(0,T; H^{s-1})
  InitKind init = InitKind::well_prepared;
  InitOptions init_options;
  KineticOptions kinetic;
  int jobs = 1;
};

// metric names in report order
const std::vector<std::string>& metric_names();

struct ConvergenceRow {
  double eps = 0.0;
  std::vector<double> values;  // aligned with metric_names()
  double get(const std::string& name) const;
  void set(const std::string& name, double v);
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
};

// empirical orders between consecutive rows for one metric (NaN when undefined)
std::vector<double> empirical_orders(const ConvergenceReport& r, const std::string& metric);
bool strictly_decreasing(const ConvergenceReport& r, const std::string& metric);

struct ErrorContext {
  const SpatialGrid* grid = nullptr;
  const KineticSolver* solver = nullptr;
  const TransportCoefficients* coeffs = nullptr;
  int sobolev_s = 2;
  double tau = 0.0;  // errors integrated over [tau, t_end]
};

// pre: matching sample times
ConvergenceRow compute_errors(const std::vector<KineticState>& kinetic, const std::vector<FluidState>& mhd,
                              const ErrorContext& ctx);

struct SweepRun {
  double eps = 0.0;
  std::vector<DiagnosticsRecord> records;
};

struct SweepResult {
  ConvergenceReport report;
  std::vector<SweepRun> runs;
};

SweepResult run_sweep(const SweepConfig& cfg, const SpatialGrid& grid, const CollisionBackend& backend,
                      const TransportCoefficients& coeffs);

// max relative drift of the conserved quantities over a run
double conservation_drift(const std::vector<DiagnosticsRecord>& records, double scale);
// max H(t)/H(0) (0 when H vanishes identically)
double energy_ratio(const std::vector<DiagnosticsRecord>& records);

std::string report_csv(const ConvergenceReport& r);
ConvergenceReport parse_report_csv(const std::string& text);
std::string report_summary_json(const ConvergenceReport& r, const SweepConfig& cfg);
void emit_report(const ConvergenceReport& r, const SweepConfig& cfg, const std::string& dir);

}  // namespace vmb
