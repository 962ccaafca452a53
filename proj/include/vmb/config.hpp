#pragma once
// Key-value run configuration ("key = value", '#' comments), schema version 1.
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vmb/collision.hpp"
#include "vmb/kinetic_solver.hpp"
#include "vmb/limit_harness.hpp"

namespace vmb {

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
  int schema_version = kSchemaVersion;
  BackendKind backend = BackendKind::relaxation;
  int degree = 6;
  int quad_points = 0;  // 0: automatic
  int grid_dims = 1;
  int grid_modes = 32;
  double eps = 0.2;
  std::vector<double> eps_list{0.4, 0.2, 0.1, 0.05};
  double dt = 0.0005;
  double t_end = 0.5;
  int diag_every = 10;
  int sample_every = 1;
  InitKind init = InitKind::well_prepared;
  double u_amp = 0.01;
  double theta_amp = 0.01;
  double b_amp = 0.01;
  int wavenumber = 1;
  double micro_amp = 0.0;
  bool energy_compensation = true;
  bool ohmic_fields = false;
  int sobolev_s = 2;
  int gauss_projection_every = 0;
  double cfl = 0.5;
  bool collision = true;
  bool fields = true;
  bool bilinear = true;
  std::string output_dir = "vmb_out";
  std::uint64_t seed = 0;
  std::string cache_dir;
  int jobs = 1;
  int samples = 100;
};

struct ConfigKey {
  std::string name;
  std::string doc;
};
const std::vector<ConfigKey>& config_keys();

// file (optional) then overrides; validation errors name the key
RunConfig parse_config(const std::optional<std::string>& path,
                       const std::map<std::string, std::string>& overrides = {});
RunConfig parse_config_text(const std::string& text, const std::map<std::string, std::string>& overrides = {});
std::string config_text(const RunConfig& c);  // canonical echo, parses back to the same config

SweepConfig sweep_config(const RunConfig& c);
KineticOptions kinetic_options(const RunConfig& c);
InitOptions init_options(const RunConfig& c);
SingleModeSpec single_mode_spec(const RunConfig& c);

}  // namespace vmb
