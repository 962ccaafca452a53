#include "vmb/limit_harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "vmb/errors.hpp"
#include "vmb/io.hpp"

namespace vmb {

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {
      "err_u",           "err_theta",        "err_B",                      "err_f",
      "err_h",           "err_n",            "ohm_residual",               "ampere_residual",
      "jtilde_residual", "jtilde_residual_alt_sign", "energy_ratio_max", "conservation_drift",
      "gauss_residual_max"};
  return names;
}

namespace {
int metric_index(const std::string& name) {
  const auto& n = metric_names();
  auto it = std::find(n.begin(), n.end(), name);
  if (it == n.end()) throw InvalidArgument("unknown metric " + name);
  return static_cast<int>(it - n.begin());
}
const cplx I1(0.0, 1.0);
}  // namespace

double ConvergenceRow::get(const std::string& name) const { return values.at(metric_index(name)); }

void ConvergenceRow::set(const std::string& name, double v) {
  if (values.size() != metric_names().size()) values.assign(metric_names().size(), 0.0);
  values[metric_index(name)] = v;
}

std::vector<double> empirical_orders(const ConvergenceReport& r, const std::string& metric) {
  std::vector<double> p;
  for (std::size_t k = 0; k + 1 < r.rows.size(); ++k) {
    const double e0 = r.rows[k].get(metric), e1 = r.rows[k + 1].get(metric);
    const double x0 = r.rows[k].eps, x1 = r.rows[k + 1].eps;
    if (e0 > 0.0 && e1 > 0.0 && x0 != x1)
      p.push_back(std::log(e0 / e1) / std::log(x0 / x1));
    else
      p.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  return p;
}

bool strictly_decreasing(const ConvergenceReport& r, const std::string& metric) {
  for (std::size_t k = 0; k + 1 < r.rows.size(); ++k)
    if (!(r.rows[k + 1].get(metric) < r.rows[k].get(metric))) return false;
  return true;
}

namespace {

// reference distribution rho + u.v + (|v|^2-3)/2 theta with rho = -theta
SpecField hydro_reference(const SpatialGrid& grid, const VelocityBasis& basis, const FluidState& m) {
  SpecField ref = grid.zeros(basis.size());
  const Eigen::VectorXd tm = basis.temperature_mode().coeffs;
  for (int k = 0; k < grid.num_modes(); ++k) {
    ref(k, 0) = -m.theta(k, 0);
    for (int d = 0; d < 3; ++d) ref(k, 1 + d) = m.u(k, d);
    for (int a = 0; a < basis.size(); ++a)
      if (tm(a) != 0.0) ref(k, a) += tm(a) * m.theta(k, 0);
  }
  return ref;
}

SpecField cross_product(const SpatialGrid& grid, const SpecField& a, const SpecField& b) {
  const PhysField pa = grid.backward(a), pb = grid.backward(b);
  PhysField c(pa.rows(), 3);
  c.col(0) = pa.col(1).cwiseProduct(pb.col(2)) - pa.col(2).cwiseProduct(pb.col(1));
  c.col(1) = pa.col(2).cwiseProduct(pb.col(0)) - pa.col(0).cwiseProduct(pb.col(2));
  c.col(2) = pa.col(0).cwiseProduct(pb.col(1)) - pa.col(1).cwiseProduct(pb.col(0));
  return grid.forward(c);
}

// residuals of the current-flux identity in both sign conventions
std::pair<SpecField, SpecField> jtilde_residuals(const KineticSolver& solver, const TransportCoefficients& tc,
                                                 const KineticState& s) {
  const SpatialGrid& grid = solver.grid();
  const VelocityBasis& basis = solver.backend().basis();
  const double e = s.eps;
  const StateDerivative dt = solver.rhs_eval(s).total();
  SpecField nf, nh;
  solver.nonlinear(s, nf, nh);
  Eigen::MatrixXd vt(basis.size(), 3);
  for (int i = 0; i < 3; ++i) vt.col(i) = tc.v_tilde[i].coeffs;
  // flux vectors: v_k * v_tilde_i
  std::array<Eigen::MatrixXd, 3> flux;
  for (int k = 0; k < 3; ++k) flux[k] = Eigen::MatrixXd(basis.multiply(k)) * vt;
  const Eigen::Matrix3d S = vt.middleRows(1, 3).transpose();  // S(i,k) = <v_tilde_i, v_k>
  const SpecField j = solver.current(s);
  SpecField r1 = grid.zeros(3), r2 = grid.zeros(3);
  for (int m : grid.retained_modes()) {
    const Vec3 k = grid.wavevector(m);
    const Eigen::RowVectorXcd hm = s.h.row(m);
    for (int i = 0; i < 3; ++i) {
      const cplx lhs = e * (dt.h.row(m) * vt.col(i).cast<cplx>())(0, 0);
      cplx div = 0.0;
      for (int q = 0; q < 3; ++q) div += I1 * k[q] * (hm * flux[q].col(i).cast<cplx>())(0, 0);
      cplx se = 0.0;
      for (int q = 0; q < 3; ++q) se += S(i, q) * s.E(m, q);
      const cplx n2 = e * (nh.row(m) * vt.col(i).cast<cplx>())(0, 0);
      const cplx n1 = e * (nf.row(m) * vt.col(i).cast<cplx>())(0, 0);
      r1(m, i) = lhs + div - se + j(m, i) - n2;
      r2(m, i) = lhs + div - se - j(m, i) - n1;
    }
  }
  return {r1, r2};
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& y, double tau) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (t[i] < tau - 1e-12) continue;
    acc += 0.5 * (t[i + 1] - t[i]) * (y[i] + y[i + 1]);
  }
  return acc;
}

}  // namespace

ConvergenceRow compute_errors(const std::vector<KineticState>& kin, const std::vector<FluidState>& mhd,
                              const ErrorContext& ctx) {
  if (!ctx.grid || !ctx.solver || !ctx.coeffs) throw InvalidArgument("incomplete error context");
  if (kin.size() != mhd.size()) throw SamplingMismatch("kinetic and MHD sample counts differ");
  for (std::size_t i = 0; i < kin.size(); ++i)
    if (std::abs(kin[i].t - mhd[i].t) > 1e-9 * std::max(1.0, std::abs(kin[i].t)))
      throw SamplingMismatch("sample " + std::to_string(i) + " at t = " + std::to_string(kin[i].t) +
                             " does not match MHD time " + std::to_string(mhd[i].t));
  const SpatialGrid& grid = *ctx.grid;
  const KineticSolver& solver = *ctx.solver;
  const VelocityBasis& basis = solver.backend().basis();
  const int r = ctx.sobolev_s - 1;
  const double sigma = ctx.coeffs->sigma;

  static const std::vector<std::string> integrated = {
      "err_u", "err_theta", "err_B", "err_f", "err_h", "err_n", "ohm_residual", "ampere_residual",
      "jtilde_residual", "jtilde_residual_alt_sign"};
  std::map<std::string, std::vector<double>> sq;
  std::vector<double> times;
  double gauss = 0.0;
  for (std::size_t i = 0; i < kin.size(); ++i) {
    const KineticState& s = kin[i];
    const FluidState& m = mhd[i];
    times.push_back(s.t);
    const SpecField u = solver.velocity(s);
    const SpecField theta = solver.temperature(s);
    const SpecField rho = solver.density(s);
    const SpecField j = solver.current(s);
    sq["err_u"].push_back(sobolev_norm_sq(grid, SpecField(leray_project(grid, u) - m.u), r));
    sq["err_theta"].push_back(sobolev_norm_sq(grid, SpecField(0.6 * theta - 0.4 * rho - m.theta), r));
    sq["err_B"].push_back(sobolev_norm_sq(grid, SpecField(s.B - m.B), r));
    sq["err_f"].push_back(sobolev_norm_sq(grid, SpecField(s.f - hydro_reference(grid, basis, m)), r));
    sq["err_h"].push_back(sobolev_norm_sq(grid, s.h, r));
    sq["err_n"].push_back(sobolev_norm_sq(grid, solver.charge(s), r));
    const SpecField ohm = j - sigma * (s.E + cross_product(grid, u, s.B));
    sq["ohm_residual"].push_back(sobolev_norm_sq(grid, ohm, r));
    sq["ampere_residual"].push_back(sobolev_norm_sq(grid, SpecField(curl(grid, s.B) - j), r));
    const auto [r1, r2] = jtilde_residuals(solver, *ctx.coeffs, s);
    sq["jtilde_residual"].push_back(sobolev_norm_sq(grid, r1, r));
    sq["jtilde_residual_alt_sign"].push_back(sobolev_norm_sq(grid, r2, r));
    const SpecField g = s.eps * divergence(grid, s.E) - solver.charge(s);
    if (s.t >= ctx.tau - 1e-12) gauss = std::max(gauss, g.cwiseAbs().maxCoeff());
  }
  ConvergenceRow row;
  row.eps = kin.empty() ? 0.0 : kin.front().eps;
  row.values.assign(metric_names().size(), 0.0);
  for (const auto& name : integrated) row.set(name, std::sqrt(std::max(0.0, trapezoid(times, sq[name], ctx.tau))));
  row.set("gauss_residual_max", gauss);
  return row;
}

double conservation_drift(const std::vector<DiagnosticsRecord>& rec, double scale) {
  if (rec.empty()) return 0.0;
  auto flat = [](const DiagnosticsRecord& d) {
    return std::array<double, 9>{d.momentum[0], d.momentum[1], d.momentum[2], d.energy, d.mass, d.charge,
                                 d.b_mean[0],   d.b_mean[1],   d.b_mean[2]};
  };
  const auto q0 = flat(rec.front());
  double drift = 0.0;
  for (const auto& d : rec) {
    const auto q = flat(d);
    for (int i = 0; i < 9; ++i) drift = std::max(drift, std::abs(q[i] - q0[i]));
  }
  return scale > 0.0 ? drift / scale : drift;
}

double energy_ratio(const std::vector<DiagnosticsRecord>& rec) {
  if (rec.empty() || rec.front().energy_H <= 0.0) return 0.0;
  double m = 0.0;
  for (const auto& d : rec) m = std::max(m, d.energy_H / rec.front().energy_H);
  return m;
}

namespace {
double state_scale(const SpatialGrid& grid, const KineticState& s) {
  const double n2 = l2_norm_sq(grid, s.f) + l2_norm_sq(grid, s.h) + l2_norm_sq(grid, s.E) + l2_norm_sq(grid, s.B);
  return std::sqrt(grid.volume() * n2);
}
}  // namespace

SweepResult run_sweep(const SweepConfig& cfg, const SpatialGrid& grid, const CollisionBackend& backend,
                      const TransportCoefficients& coeffs) {
  if (cfg.eps_list.empty()) throw InvalidArgument("eps_list is empty");
  for (std::size_t i = 0; i + 1 < cfg.eps_list.size(); ++i)
    if (!(cfg.eps_list[i + 1] < cfg.eps_list[i])) throw InvalidArgument("eps_list must be strictly decreasing");
  for (double e : cfg.eps_list)
    if (!(e > 0.0 && e <= 1.0)) throw InvalidArgument("eps values must lie in (0, 1]");
  const FluidData data = single_mode_data(grid, cfg.data);
  const MhdSolver mhd(grid);
  const auto traj = mhd.run(mhd.make_state(data, fluid_coefficients(coeffs)), cfg.t_end, cfg.dt, cfg.sample_every);
  const double tau = cfg.init == InitKind::general ? 0.1 * cfg.t_end : 0.0;

  InitOptions init_opts = cfg.init_options;
  if (init_opts.ohmic_fields) init_opts.coeffs = &coeffs;
  KineticOptions kopt = cfg.kinetic;
  kopt.sobolev_s = cfg.sobolev_s;
  auto one = [&](double eps) {
    const KineticSolver solver(grid, backend, kopt);
    std::vector<KineticState> samples;
    const KineticState s0 = solver.init_state(cfg.init, data, eps, init_opts);
    const double scale = state_scale(grid, s0);
    const RunResult rr = solver.run(
        s0, cfg.t_end, cfg.dt, cfg.diag_every, [&](const KineticState& s) { samples.push_back(s); },
        cfg.sample_every);
    ErrorContext ctx{&grid, &solver, &coeffs, cfg.sobolev_s, tau};
    ConvergenceRow row = compute_errors(samples, traj.samples, ctx);
    row.eps = eps;
    row.set("energy_ratio_max", energy_ratio(rr.records));
    row.set("conservation_drift", conservation_drift(rr.records, scale));
    return std::make_pair(row, SweepRun{eps, rr.records});
  };

  SweepResult out;
  std::vector<std::pair<ConvergenceRow, SweepRun>> res(cfg.eps_list.size());
  if (cfg.jobs > 1) {
    std::vector<std::future<std::pair<ConvergenceRow, SweepRun>>> fut;
    std::size_t next = 0;
    while (next < cfg.eps_list.size() || !fut.empty()) {
      // simple bounded pool: launch up to jobs, then drain in order
      std::size_t first = next;
      for (; next < cfg.eps_list.size() && next - first < static_cast<std::size_t>(cfg.jobs); ++next)
        fut.push_back(std::async(std::launch::async, one, cfg.eps_list[next]));
      for (std::size_t i = 0; i < fut.size(); ++i) res[first + i] = fut[i].get();
      fut.clear();
    }
  } else {
    for (std::size_t i = 0; i < cfg.eps_list.size(); ++i) res[i] = one(cfg.eps_list[i]);
  }
  for (auto& [row, run] : res) {
    out.report.rows.push_back(std::move(row));
    out.runs.push_back(std::move(run));
  }
  return out;
}

std::string report_csv(const ConvergenceReport& r) {
  std::ostringstream os;
  os << "eps,metric,value\n";
  for (const auto& row : r.rows)
    for (std::size_t i = 0; i < metric_names().size(); ++i)
      os << format_double(row.eps) << ',' << metric_names()[i] << ',' << format_double(row.values[i]) << '\n';
  return os.str();
}

ConvergenceReport parse_report_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "eps,metric,value") throw IoError("report CSV has an unexpected header");
  ConvergenceReport r;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(','), c2 = line.rfind(',');
    if (c1 == std::string::npos || c1 == c2) throw IoError("malformed report line: " + line);
    const double eps = parse_double(line.substr(0, c1));
    const std::string metric = line.substr(c1 + 1, c2 - c1 - 1);
    const double v = parse_double(line.substr(c2 + 1));
    if (r.rows.empty() || r.rows.back().eps != eps) {
      r.rows.emplace_back();
      r.rows.back().eps = eps;
      r.rows.back().values.assign(metric_names().size(), 0.0);
    }
    r.rows.back().set(metric, v);
  }
  return r;
}

std::string report_summary_json(const ConvergenceReport& r, const SweepConfig& cfg) {
  using nlohmann::json;
  json j;
  json eps = json::array();
  for (const auto& row : r.rows) eps.push_back(row.eps);
  j["eps"] = eps;
  json metrics = json::object();
  for (const auto& name : metric_names()) {
    json m;
    json vals = json::array(), ords = json::array();
    for (const auto& row : r.rows) vals.push_back(row.get(name));
    for (double p : empirical_orders(r, name)) ords.push_back(std::isfinite(p) ? json(p) : json(nullptr));
    m["values"] = vals;
    m["orders"] = ords;
    m["strictly_decreasing"] = strictly_decreasing(r, name);
    metrics[name] = m;
  }
  j["metrics"] = metrics;
  j["metadata"] = {{"time_quadrature", "trapezoidal over samples"},
                   {"norm", "L2(0,T; H^" + std::to_string(cfg.sobolev_s - 1) + "_x)"},
                   {"t_end", cfg.t_end},
                   {"dt", cfg.dt},
                   {"sample_every", cfg.sample_every},
                   {"init", cfg.init == InitKind::general ? "general" : "well_prepared"},
                   {"ohmic_fields", cfg.init_options.ohmic_fields},
                   {"window_start", cfg.init == InitKind::general ? 0.1 * cfg.t_end : 0.0}};
  return j.dump(2) + "\n";
}

void emit_report(const ConvergenceReport& r, const SweepConfig& cfg, const std::string& dir) {
  ensure_directory(dir);
  write_text_file(dir + "/report.csv", report_csv(r));
  write_text_file(dir + "/summary.json", report_summary_json(r, cfg));
}

}  // namespace vmb
