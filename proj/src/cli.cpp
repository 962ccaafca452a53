#include "vmb/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <map>
#include <optional>

#include "vmb/collision.hpp"
#include "vmb/config.hpp"
#include "vmb/errors.hpp"
#include "vmb/io.hpp"
#include "vmb/kinetic_solver.hpp"
#include "vmb/limit_harness.hpp"
#include "vmb/mhd_solver.hpp"
#include "vmb/snapshot.hpp"
#include "vmb/transport.hpp"

#ifndef VMB_VERSION
#define VMB_VERSION "0.0.0"
#endif

namespace vmb {

namespace {

using json = nlohmann::json;

struct Outputs {
  std::string dir;
  std::vector<std::string> files;

  void text(const std::string& name, const std::string& content) {
    write_text_file(dir + "/" + name, content);
    files.push_back(name);
  }
  void added(const std::string& name) { files.push_back(name); }
};

std::shared_ptr<const VelocityBasis> make_basis(const RunConfig& c) {
  return std::make_shared<const VelocityBasis>(c.degree, c.quad_points);
}

CollisionBackend make_backend(const RunConfig& c) {
  auto basis = make_basis(c);
  if (c.cache_dir.empty()) return CollisionBackend::build(c.backend, basis);
  ensure_directory(c.cache_dir);
  const std::string path = c.cache_dir + "/collision_" + to_string(c.backend) + "_N" + std::to_string(c.degree) +
                           "_Q" + std::to_string(basis->quad_points_per_axis()) + ".bin";
  return CollisionBackend::build_cached(c.backend, basis, path);
}

json coeffs_json(const TransportCoefficients& tc, const RunConfig& c) {
  return json{{"backend", to_string(c.backend)}, {"degree", c.degree},
              {"nu", tc.nu},                     {"nu_shear", tc.nu_shear},
              {"kappa", tc.kappa},               {"sigma", tc.sigma}};
}

void cmd_coeffs(const RunConfig& c, Outputs& o, std::ostream& out) {
  const CollisionBackend backend = make_backend(c);
  const TransportCoefficients tc = compute_coefficients(backend);
  out << std::setprecision(12) << "backend " << to_string(c.backend) << "  N = " << c.degree << "\n"
      << "nu    = " << tc.nu << "\nnu_shear = " << tc.nu_shear << "\nkappa = " << tc.kappa << "\nsigma = " << tc.sigma << "\n";
  o.text("coeffs.json", coeffs_json(tc, c).dump(2) + "\n");
}

void cmd_check_operator(const RunConfig& c, Outputs& o, std::ostream& out) {
  const CollisionBackend backend = make_backend(c);
  const CoercivityCertificate cert = verify_assumptions(backend, c.samples, c.seed);
  json j{{"backend", to_string(c.backend)},
         {"degree", c.degree},
         {"samples", c.samples},
         {"lambda_est", cert.lambda_est},
         {"lambda_est_charge", cert.lambda_est_charge},
         {"gamma_orth_residual", cert.gamma_orth_residual},
         {"symmetry_residual", cert.symmetry_residual},
         {"kernel_residual", cert.kernel_residual},
         {"projector_idempotence", cert.projector_idempotence},
         {"coercivity_margin", cert.coercivity_margin}};
  out << std::setprecision(6) << "lambda_est            " << cert.lambda_est << "\n"
      << "lambda_est_charge     " << cert.lambda_est_charge << "\n"
      << "gamma_orth_residual   " << cert.gamma_orth_residual << "\n"
      << "symmetry_residual     " << cert.symmetry_residual << "\n"
      << "kernel_residual       " << cert.kernel_residual << "\n"
      << "projector_idempotence " << cert.projector_idempotence << "\n"
      << "coercivity_margin     " << cert.coercivity_margin << "\n";
  if (!(cert.lambda_est > 0.0) || !(cert.lambda_est_charge > 0.0))
    out << "warning: nonpositive coercivity estimate\n";
  o.text("certificate.json", j.dump(2) + "\n");
}

void cmd_simulate_kinetic(const RunConfig& c, Outputs& o, std::ostream& out) {
  const CollisionBackend backend = make_backend(c);
  const SpatialGrid grid(c.grid_dims, c.grid_modes);
  const KineticSolver solver(grid, backend, kinetic_options(c));
  const FluidData data = single_mode_data(grid, single_mode_spec(c));
  InitOptions io = init_options(c);
  TransportCoefficients tc;
  if (io.ohmic_fields) {
    tc = compute_coefficients(backend);
    io.coeffs = &tc;
  }
  const KineticState s0 = solver.init_state(c.init, data, c.eps, io);
  const RunResult r = solver.run(s0, c.t_end, c.dt, c.diag_every);
  o.text("diagnostics.csv", diagnostics_csv(r.records));
  write_kinetic_snapshot(o.dir + "/kinetic_final.snap", grid, backend.basis(), r.final_state);
  o.added("kinetic_final.snap");
  const auto& last = r.records.back();
  out << std::setprecision(8) << "t = " << last.t << "  H = " << last.energy_H << "  D = " << last.dissipation_D
      << "  gauss = " << last.gauss_residual << "\n";
}

void cmd_simulate_mhd(const RunConfig& c, Outputs& o, std::ostream& out) {
  const CollisionBackend backend = make_backend(c);
  const TransportCoefficients tc = compute_coefficients(backend);
  const SpatialGrid grid(c.grid_dims, c.grid_modes);
  const MhdSolver solver(grid, c.cfl);
  const FluidState s0 = solver.make_state(single_mode_data(grid, single_mode_spec(c)), fluid_coefficients(tc));
  const auto traj = solver.run(s0, c.t_end, c.dt, std::numeric_limits<int>::max(), c.diag_every);
  o.text("mhd_diagnostics.csv", mhd_diagnostics_csv(traj.records));
  o.text("coeffs.json", coeffs_json(tc, c).dump(2) + "\n");
  write_mhd_snapshot(o.dir + "/mhd_final.snap", grid, traj.final_state);
  o.added("mhd_final.snap");
  const auto& last = traj.records.back();
  out << std::setprecision(8) << "t = " << last.t << "  |u|^2/2 = " << last.kinetic_energy
      << "  |B|^2/2 = " << last.magnetic_energy << "\n";
}

void cmd_converge(const RunConfig& c, Outputs& o, std::ostream& out) {
  const CollisionBackend backend = make_backend(c);
  const TransportCoefficients tc = compute_coefficients(backend);
  const SpatialGrid grid(c.grid_dims, c.grid_modes);
  const SweepConfig sweep = sweep_config(c);
  const SweepResult res = run_sweep(sweep, grid, backend, tc);
  emit_report(res.report, sweep, o.dir);
  o.added("report.csv");
  o.added("summary.json");
  for (std::size_t i = 0; i < res.runs.size(); ++i)
    o.text("diagnostics_eps" + std::to_string(i) + ".csv", diagnostics_csv(res.runs[i].records));
  out << std::setprecision(4) << std::left << std::setw(10) << "eps";
  for (const char* m : {"err_u", "err_theta", "err_B", "ohm_residual"}) out << std::setw(14) << m;
  out << "\n";
  for (const auto& row : res.report.rows) {
    out << std::setw(10) << row.eps;
    for (const char* m : {"err_u", "err_theta", "err_B", "ohm_residual"}) out << std::setw(14) << row.get(m);
    out << "\n";
  }
}

std::string file_hash(const std::string& path) {
  const std::string content = read_text_file(path);
  return hex64(fnv1a(content.data(), content.size()));
}

void write_manifest(const std::string& command, const RunConfig& c, const std::string& cfg_text, double wall,
                    const Outputs& o) {
  json files = json::object();
  for (const auto& f : o.files) files[f] = file_hash(o.dir + "/" + f);
  json j{{"command", command},
         {"version", VMB_VERSION},
         {"schema_version", c.schema_version},
         {"config_hash", hex64(fnv1a(cfg_text.data(), cfg_text.size()))},
         {"seed", c.seed},
         {"wall_time_s", wall},
         {"outputs", files}};
  write_text_file(o.dir + "/manifest.json", j.dump(2) + "\n");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vlasov-Maxwell-Boltzmann incompressible-limit toolkit", "vmbl"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", VMB_VERSION);

  std::optional<std::string> config_path;
  std::optional<std::string> out_dir;
  bool echo = false;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (same as --output_dir)");
  app.add_flag("--echo-config", echo, "print the resolved configuration and exit");
  app.add_option("--set", sets, "override key=value (repeatable)");

  std::map<std::string, std::string> key_values;
  std::map<std::string, CLI::Option*> key_opts;
  for (const auto& k : config_keys()) {
    if (k.name == "schema_version") continue;
    key_opts[k.name] = app.add_option("--" + k.name, key_values[k.name], k.doc)->group("Configuration keys");
  }

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"coeffs", "transport coefficients nu, kappa, sigma"},
      {"check-operator", "coercivity certificate of the collision operator"},
      {"simulate-kinetic", "kinetic run at one eps"},
      {"simulate-mhd", "limiting MHD run"},
      {"converge", "eps sweep against the MHD reference"},
  };
  for (const auto& [name, doc] : commands) app.add_subcommand(name, doc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    std::map<std::string, std::string> overrides;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw TypeMismatch("--set expects key=value, got '" + s + "'");
      overrides[s.substr(0, eq)] = s.substr(eq + 1);
    }
    for (const auto& [name, opt] : key_opts)
      if (opt->count() > 0) overrides[name] = key_values[name];
    if (out_dir) overrides["output_dir"] = *out_dir;

    const RunConfig cfg = parse_config(config_path, overrides);
    const std::string cfg_text = config_text(cfg);
    if (echo) {
      out << cfg_text;
      return 0;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    Outputs o{cfg.output_dir, {}};
    ensure_directory(o.dir);
    o.text("config.txt", cfg_text);
    const auto t0 = std::chrono::steady_clock::now();
    if (command == "coeffs") cmd_coeffs(cfg, o, out);
    else if (command == "check-operator") cmd_check_operator(cfg, o, out);
    else if (command == "simulate-kinetic") cmd_simulate_kinetic(cfg, o, out);
    else if (command == "simulate-mhd") cmd_simulate_mhd(cfg, o, out);
    else cmd_converge(cfg, o, out);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(command, cfg, cfg_text, wall, o);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace vmb
