#pragma once
// Binary snapshots (versioned header, physical-space row-major doubles) and
// diagnostics tables.
#include <string>
#include <vector>

#include "vmb/kinetic_solver.hpp"
#include "vmb/mhd_solver.hpp"

namespace vmb {

enum class SnapshotType : std::uint32_t { kinetic = 1, mhd = 2 };

struct SnapshotHeader {
  std::uint32_t version = 1;
  SnapshotType type = SnapshotType::kinetic;
  std::uint32_t dims_active = 1;
  std::uint32_t modes = 0;
  std::uint32_t velocity_modes = 0;  // 0 for MHD
  std::uint32_t degree = 0;
  double eps = 0.0;
  double t = 0.0;
  double nu = 0.0, kappa = 0.0, sigma = 0.0;
};

void write_kinetic_snapshot(const std::string& path, const SpatialGrid& grid, const VelocityBasis& basis,
                            const KineticState& s);
KineticState read_kinetic_snapshot(const std::string& path, const SpatialGrid& grid, const VelocityBasis& basis);

void write_mhd_snapshot(const std::string& path, const SpatialGrid& grid, const FluidState& s);
FluidState read_mhd_snapshot(const std::string& path, const SpatialGrid& grid);

SnapshotHeader read_snapshot_header(const std::string& path);

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records);
std::string mhd_diagnostics_csv(const std::vector<MhdDiagnostics>& records);

}  // namespace vmb
