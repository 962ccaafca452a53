#include "vmb/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "vmb/errors.hpp"
#include "vmb/io.hpp"

namespace vmb {

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"schema_version", "config schema version (1)"},
      {"backend", "collision backend: relaxation | hard_sphere"},
      {"degree", "velocity total-degree cutoff N >= 4"},
      {"quad_points", "Gauss-Hermite points per axis (0 = ceil((3N+1)/2))"},
      {"grid_dims", "active torus directions 1..3"},
      {"grid_modes", "Fourier modes per active direction (power of two)"},
      {"eps", "Knudsen number in (0, 1] for simulate-kinetic"},
      {"eps_list", "comma-separated decreasing eps values for converge"},
      {"dt", "time step"},
      {"t_end", "final time"},
      {"diag_every", "steps between diagnostics records"},
      {"sample_every", "steps between error samples in converge"},
      {"init", "initial data: well_prepared | general"},
      {"u_amp", "amplitude of u0 = (0, a cos kx, 0)"},
      {"theta_amp", "amplitude of theta0 = b cos kx"},
      {"b_amp", "amplitude of B0 = (0, 0, c sin kx)"},
      {"wavenumber", "data wavenumber k"},
      {"micro_amp", "microscopic perturbation amplitude for general data"},
      {"energy_compensation", "set the theta mean from the magnetic energy (true | false)"},
      {"ohmic_fields", "start E and h on the Ohm's-law manifold instead of zero (true | false)"},
      {"sobolev_s", "Sobolev order s of the energy functional; errors use s-1"},
      {"gauss_projection_every", "steps between Gauss-law projections (0 = off)"},
      {"cfl", "bound on dt times the explicit nonlinear rate"},
      {"collision", "include collision operators (true | false)"},
      {"fields", "include Maxwell coupling and Lorentz terms (true | false)"},
      {"bilinear", "include the Gamma terms (true | false)"},
      {"output_dir", "output directory"},
      {"seed", "random seed"},
      {"cache_dir", "directory for assembled collision matrices (empty = none)"},
      {"jobs", "concurrent eps runs in converge"},
      {"samples", "random samples for check-operator"},
  };
  return keys;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::map<std::string, std::string> parse_pairs(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw TypeMismatch("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (kv.count(key)) throw TypeMismatch("key '" + key + "' given twice");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

double as_double(const std::string& key, const std::string& v) {
  try {
    return parse_double(v);
  } catch (const TypeMismatch&) {
    throw TypeMismatch(key + ": expected a number, got '" + v + "'");
  }
}

long long as_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &pos);
  } catch (...) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) throw TypeMismatch(key + ": expected an integer, got '" + v + "'");
  return x;
}

bool as_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw TypeMismatch(key + ": expected true or false, got '" + v + "'");
}

int positive_int(const std::string& key, const std::string& v, int lo) {
  const long long x = as_int(key, v);
  if (x < lo || x > 1 << 20) throw TypeMismatch(key + ": must be an integer >= " + std::to_string(lo));
  return static_cast<int>(x);
}

double positive_double(const std::string& key, const std::string& v) {
  const double x = as_double(key, v);
  if (!(x > 0.0) || !std::isfinite(x)) throw TypeMismatch(key + ": must be positive");
  return x;
}

double eps_value(const std::string& key, const std::string& v) {
  const double x = as_double(key, v);
  if (!(x > 0.0 && x <= 1.0)) throw TypeMismatch(key + ": must lie in (0, 1], got " + v);
  return x;
}

void apply(RunConfig& c, const std::string& key, const std::string& v) {
  if (key == "schema_version") {
    const long long s = as_int(key, v);
    if (s != kSchemaVersion) throw SchemaVersion("expected schema_version = " + std::to_string(kSchemaVersion) + ", got " + v);
    c.schema_version = static_cast<int>(s);
  } else if (key == "backend") {
    c.backend = parse_backend(v);
  } else if (key == "degree") {
    c.degree = positive_int(key, v, 4);
  } else if (key == "quad_points") {
    c.quad_points = positive_int(key, v, 0);
  } else if (key == "grid_dims") {
    c.grid_dims = positive_int(key, v, 1);
    if (c.grid_dims > 3) throw TypeMismatch("grid_dims: must be 1, 2 or 3");
  } else if (key == "grid_modes") {
    c.grid_modes = positive_int(key, v, 4);
    if (c.grid_modes & (c.grid_modes - 1)) throw TypeMismatch("grid_modes: must be a power of two");
  } else if (key == "eps") {
    c.eps = eps_value(key, v);
  } else if (key == "eps_list") {
    c.eps_list.clear();
    std::istringstream is(v);
    std::string item;
    while (std::getline(is, item, ',')) c.eps_list.push_back(eps_value(key, trim(item)));
    if (c.eps_list.empty()) throw TypeMismatch("eps_list: empty");
    for (std::size_t i = 0; i + 1 < c.eps_list.size(); ++i)
      if (!(c.eps_list[i + 1] < c.eps_list[i])) throw TypeMismatch("eps_list: must be strictly decreasing");
  } else if (key == "dt") {
    c.dt = positive_double(key, v);
  } else if (key == "t_end") {
    c.t_end = as_double(key, v);
    if (!(c.t_end >= 0.0)) throw TypeMismatch("t_end: must be nonnegative");
  } else if (key == "diag_every") {
    c.diag_every = positive_int(key, v, 1);
  } else if (key == "sample_every") {
    c.sample_every = positive_int(key, v, 1);
  } else if (key == "init") {
    c.init = parse_init_kind(v);
  } else if (key == "u_amp") {
    c.u_amp = as_double(key, v);
  } else if (key == "theta_amp") {
    c.theta_amp = as_double(key, v);
  } else if (key == "b_amp") {
    c.b_amp = as_double(key, v);
  } else if (key == "wavenumber") {
    c.wavenumber = positive_int(key, v, 1);
  } else if (key == "micro_amp") {
    c.micro_amp = as_double(key, v);
  } else if (key == "energy_compensation") {
    c.energy_compensation = as_bool(key, v);
  } else if (key == "ohmic_fields") {
    c.ohmic_fields = as_bool(key, v);
  } else if (key == "sobolev_s") {
    c.sobolev_s = positive_int(key, v, 1);
  } else if (key == "gauss_projection_every") {
    c.gauss_projection_every = positive_int(key, v, 0);
  } else if (key == "cfl") {
    c.cfl = positive_double(key, v);
  } else if (key == "collision") {
    c.collision = as_bool(key, v);
  } else if (key == "fields") {
    c.fields = as_bool(key, v);
  } else if (key == "bilinear") {
    c.bilinear = as_bool(key, v);
  } else if (key == "output_dir") {
    if (v.empty()) throw TypeMismatch("output_dir: empty");
    c.output_dir = v;
  } else if (key == "seed") {
    const long long s = as_int(key, v);
    if (s < 0) throw TypeMismatch("seed: must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "cache_dir") {
    c.cache_dir = v;
  } else if (key == "jobs") {
    c.jobs = positive_int(key, v, 1);
  } else if (key == "samples") {
    c.samples = positive_int(key, v, 0);
  } else {
    throw UnknownKey("'" + key + "' is not a configuration key");
  }
}

RunConfig build(const std::map<std::string, std::string>& file, bool from_file,
                const std::map<std::string, std::string>& overrides) {
  RunConfig c;
  if (from_file && !file.count("schema_version")) throw MissingKey("schema_version");
  for (const auto& [k, v] : file) apply(c, k, v);
  for (const auto& [k, v] : overrides) apply(c, k, v);
  if (c.quad_points != 0 && c.quad_points < c.degree) throw TypeMismatch("quad_points: must be >= degree");
  if (3 * c.wavenumber >= c.grid_modes) throw TypeMismatch("wavenumber: outside the retained spectrum");
  return c;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::map<std::string, std::string>& overrides) {
  return build(parse_pairs(text), true, overrides);
}

RunConfig parse_config(const std::optional<std::string>& path, const std::map<std::string, std::string>& overrides) {
  if (!path) return build({}, false, overrides);
  if (!std::filesystem::exists(*path)) throw IoError("config file not found: " + *path);
  return parse_config_text(read_text_file(*path), overrides);
}

std::string config_text(const RunConfig& c) {
  std::ostringstream os;
  std::string eps_list;
  for (std::size_t i = 0; i < c.eps_list.size(); ++i) eps_list += (i ? "," : "") + format_double(c.eps_list[i]);
  os << "schema_version = " << c.schema_version << "\n"
     << "backend = " << to_string(c.backend) << "\n"
     << "degree = " << c.degree << "\n"
     << "quad_points = " << c.quad_points << "\n"
     << "grid_dims = " << c.grid_dims << "\n"
     << "grid_modes = " << c.grid_modes << "\n"
     << "eps = " << format_double(c.eps) << "\n"
     << "eps_list = " << eps_list << "\n"
     << "dt = " << format_double(c.dt) << "\n"
     << "t_end = " << format_double(c.t_end) << "\n"
     << "diag_every = " << c.diag_every << "\n"
     << "sample_every = " << c.sample_every << "\n"
     << "init = " << (c.init == InitKind::well_prepared ? "well_prepared" : "general") << "\n"
     << "u_amp = " << format_double(c.u_amp) << "\n"
     << "theta_amp = " << format_double(c.theta_amp) << "\n"
     << "b_amp = " << format_double(c.b_amp) << "\n"
     << "wavenumber = " << c.wavenumber << "\n"
     << "micro_amp = " << format_double(c.micro_amp) << "\n"
     << "energy_compensation = " << bool_text(c.energy_compensation) << "\n"
     << "ohmic_fields = " << bool_text(c.ohmic_fields) << "\n"
     << "sobolev_s = " << c.sobolev_s << "\n"
     << "gauss_projection_every = " << c.gauss_projection_every << "\n"
     << "cfl = " << format_double(c.cfl) << "\n"
     << "collision = " << bool_text(c.collision) << "\n"
     << "fields = " << bool_text(c.fields) << "\n"
     << "bilinear = " << bool_text(c.bilinear) << "\n"
     << "output_dir = " << c.output_dir << "\n"
     << "seed = " << c.seed << "\n"
     << "cache_dir = " << c.cache_dir << "\n"
     << "jobs = " << c.jobs << "\n"
     << "samples = " << c.samples << "\n";
  return os.str();
}

KineticOptions kinetic_options(const RunConfig& c) {
  KineticOptions o;
  o.collision = c.collision;
  o.fields = c.fields;
  o.bilinear = c.bilinear;
  o.gauss_projection_every = c.gauss_projection_every;
  o.cfl = c.cfl;
  o.sobolev_s = c.sobolev_s;
  return o;
}

InitOptions init_options(const RunConfig& c) {
  InitOptions o;
  o.micro_amp = c.micro_amp;
  o.seed = c.seed;
  o.energy_compensation = c.energy_compensation;
  o.ohmic_fields = c.ohmic_fields;
  return o;
}

SingleModeSpec single_mode_spec(const RunConfig& c) { return {c.u_amp, c.theta_amp, c.b_amp, c.wavenumber}; }

SweepConfig sweep_config(const RunConfig& c) {
  SweepConfig s;
  s.eps_list = c.eps_list;
  s.data = single_mode_spec(c);
  s.t_end = c.t_end;
  s.dt = c.dt;
  s.sample_every = c.sample_every;
  s.diag_every = c.diag_every;
  s.sobolev_s = c.sobolev_s;
  s.init = c.init;
  s.init_options = init_options(c);
  s.kinetic = kinetic_options(c);
  s.jobs = c.jobs;
  return s;
}

}  // namespace vmb
