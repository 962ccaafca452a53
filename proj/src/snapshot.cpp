#include "vmb/snapshot.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vmb/errors.hpp"
#include "vmb/io.hpp"

namespace vmb {

namespace {

constexpr char kMagic[8] = {'V', 'M', 'B', 'S', 'N', 'A', 'P', '1'};

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw IoError("truncated snapshot");
  return v;
}

void put_header(std::ostream& os, const SnapshotHeader& h) {
  os.write(kMagic, 8);
  put(os, h.version);
  put(os, static_cast<std::uint32_t>(h.type));
  put(os, h.dims_active);
  put(os, h.modes);
  put(os, h.velocity_modes);
  put(os, h.degree);
  put(os, h.eps);
  put(os, h.t);
  put(os, h.nu);
  put(os, h.kappa);
  put(os, h.sigma);
}

SnapshotHeader get_header(std::istream& is) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0) throw IoError("not a snapshot file");
  SnapshotHeader h;
  h.version = get<std::uint32_t>(is);
  if (h.version != 1) throw IoError("unsupported snapshot version " + std::to_string(h.version));
  h.type = static_cast<SnapshotType>(get<std::uint32_t>(is));
  h.dims_active = get<std::uint32_t>(is);
  h.modes = get<std::uint32_t>(is);
  h.velocity_modes = get<std::uint32_t>(is);
  h.degree = get<std::uint32_t>(is);
  h.eps = get<double>(is);
  h.t = get<double>(is);
  h.nu = get<double>(is);
  h.kappa = get<double>(is);
  h.sigma = get<double>(is);
  return h;
}

void put_field(std::ostream& os, const SpatialGrid& grid, const SpecField& f) {
  const PhysField p = grid.backward(f);
  os.write(reinterpret_cast<const char*>(p.data()), static_cast<std::streamsize>(p.size() * sizeof(double)));
}

SpecField get_field(std::istream& is, const SpatialGrid& grid, int components) {
  PhysField p(grid.num_points(), components);
  is.read(reinterpret_cast<char*>(p.data()), static_cast<std::streamsize>(p.size() * sizeof(double)));
  if (!is) throw IoError("truncated snapshot");
  return grid.forward(p);
}

std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) ensure_directory(parent.string());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path);
  return is;
}

void check_grid(const SnapshotHeader& h, const SpatialGrid& grid) {
  if (static_cast<int>(h.dims_active) != grid.dims_active() || static_cast<int>(h.modes) != grid.modes())
    throw IoError("snapshot grid does not match");
}

}  // namespace

void write_kinetic_snapshot(const std::string& path, const SpatialGrid& grid, const VelocityBasis& basis,
                            const KineticState& s) {
  SnapshotHeader h;
  h.type = SnapshotType::kinetic;
  h.dims_active = grid.dims_active();
  h.modes = grid.modes();
  h.velocity_modes = basis.size();
  h.degree = basis.max_degree();
  h.eps = s.eps;
  h.t = s.t;
  auto os = open_out(path);
  put_header(os, h);
  put_field(os, grid, s.f);
  put_field(os, grid, s.h);
  put_field(os, grid, s.E);
  put_field(os, grid, s.B);
  if (!os) throw IoError("write failed: " + path);
}

KineticState read_kinetic_snapshot(const std::string& path, const SpatialGrid& grid, const VelocityBasis& basis) {
  auto is = open_in(path);
  const SnapshotHeader h = get_header(is);
  if (h.type != SnapshotType::kinetic) throw IoError("not a kinetic snapshot: " + path);
  check_grid(h, grid);
  if (static_cast<int>(h.velocity_modes) != basis.size()) throw IoError("snapshot velocity basis does not match");
  KineticState s;
  s.t = h.t;
  s.eps = h.eps;
  s.f = get_field(is, grid, basis.size());
  s.h = get_field(is, grid, basis.size());
  s.E = get_field(is, grid, 3);
  s.B = get_field(is, grid, 3);
  return s;
}

void write_mhd_snapshot(const std::string& path, const SpatialGrid& grid, const FluidState& s) {
  SnapshotHeader h;
  h.type = SnapshotType::mhd;
  h.dims_active = grid.dims_active();
  h.modes = grid.modes();
  h.t = s.t;
  h.nu = s.coeffs.nu;
  h.kappa = s.coeffs.kappa;
  h.sigma = s.coeffs.sigma;
  auto os = open_out(path);
  put_header(os, h);
  put_field(os, grid, s.u);
  put_field(os, grid, s.theta);
  put_field(os, grid, s.B);
  if (!os) throw IoError("write failed: " + path);
}

FluidState read_mhd_snapshot(const std::string& path, const SpatialGrid& grid) {
  auto is = open_in(path);
  const SnapshotHeader h = get_header(is);
  if (h.type != SnapshotType::mhd) throw IoError("not an MHD snapshot: " + path);
  check_grid(h, grid);
  FluidState s;
  s.t = h.t;
  s.coeffs = {h.nu, h.kappa, h.sigma};
  s.u = get_field(is, grid, 3);
  s.theta = get_field(is, grid, 1);
  s.B = get_field(is, grid, 3);
  return s;
}

SnapshotHeader read_snapshot_header(const std::string& path) {
  auto is = open_in(path);
  return get_header(is);
}

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records) {
  std::ostringstream os;
  os << "t,momentum_1,momentum_2,momentum_3,energy,mass,charge,b_mean_1,b_mean_2,b_mean_3,div_b,"
        "gauss_residual,energy_H,dissipation_D,continuity_residual\n";
  for (const auto& r : records) {
    os << format_double(r.t);
    for (double m : r.momentum) os << ',' << format_double(m);
    os << ',' << format_double(r.energy) << ',' << format_double(r.mass) << ',' << format_double(r.charge);
    for (double b : r.b_mean) os << ',' << format_double(b);
    os << ',' << format_double(r.div_b) << ',' << format_double(r.gauss_residual) << ','
       << format_double(r.energy_H) << ',' << format_double(r.dissipation_D) << ','
       << format_double(r.continuity_residual) << '\n';
  }
  return os.str();
}

std::string mhd_diagnostics_csv(const std::vector<MhdDiagnostics>& records) {
  std::ostringstream os;
  os << "t,kinetic_energy,magnetic_energy,theta_mean,b_mean_1,b_mean_2,b_mean_3,div_u,div_b,dissipation\n";
  for (const auto& r : records) {
    os << format_double(r.t) << ',' << format_double(r.kinetic_energy) << ',' << format_double(r.magnetic_energy)
       << ',' << format_double(r.theta_mean);
    for (double b : r.b_mean) os << ',' << format_double(b);
    os << ',' << format_double(r.div_u) << ',' << format_double(r.div_b) << ',' << format_double(r.dissipation)
       << '\n';
  }
  return os.str();
}

}  // namespace vmb
