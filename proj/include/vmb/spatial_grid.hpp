#pragma once
// Periodic box [0, 2pi)^d with real FFTs. Arrays are point-major with
// interleaved components; x1 varies fastest. Spectral coefficients are
// normalized so that g(x) = sum_k g_k e^{ikx} (the zero mode is the mean).
#include <Eigen/Dense>
#include <array>
#include <complex>
#include <map>
#include <memory>
#include <mutex>

#include "vmb/velocity_space.hpp"

namespace vmb {

using cplx = std::complex<double>;
using SpecField = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using PhysField = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class SpatialGrid {
 public:
  SpatialGrid(int dims_active, int modes);
  ~SpatialGrid();
  SpatialGrid(const SpatialGrid&) = delete;
  SpatialGrid& operator=(const SpatialGrid&) = delete;

  int dims_active() const { return dims_; }
  int modes() const { return modes_; }
  const std::array<int, 3>& n() const { return n_; }  // per direction x1, x2, x3
  int num_points() const { return np_; }
  int num_modes() const { return nk_; }
  double volume() const;
  double dx() const;

  Vec3 point(int p) const;
  Vec3 wavevector(int m) const { return k_[m]; }
  double k2(int m) const { return k_[m][0] * k_[m][0] + k_[m][1] * k_[m][1] + k_[m][2] * k_[m][2]; }
  bool retained(int m) const { return retained_[m]; }
  const std::vector<int>& retained_modes() const { return kept_; }
  double parseval_weight(int m) const { return pw_[m]; }
  int mode_of(int k1, int k2, int k3) const;  // -1 if not stored in the half spectrum

  // forward applies 1/N normalization and the 2/3 truncation
  SpecField forward(const PhysField& phys) const;
  PhysField backward(const SpecField& spec) const;
  void forward(const double* phys, cplx* spec, int components) const;
  void backward(const cplx* spec, double* phys, int components) const;

  SpecField zeros(int components) const { return SpecField::Zero(nk_, components); }

 private:
  struct Plans;
  const Plans& plans(int components) const;

  int dims_, modes_;
  std::array<int, 3> n_;
  int np_, nk_, nh_;
  std::vector<Vec3> k_;
  std::vector<bool> retained_;
  std::vector<int> kept_;
  std::vector<double> pw_;
  mutable std::mutex mu_;
  mutable std::map<int, std::unique_ptr<Plans>> plans_;
};

// squared norms: vol * sum_m w_m (sum_{i<=s} |k|^{2i}) |g_m|^2 summed over components
double sobolev_norm_sq(const SpatialGrid& grid, const SpecField& g, int s);
double l2_norm_sq(const SpatialGrid& grid, const SpecField& g);
// integral over the box of each component
Eigen::VectorXd integral(const SpatialGrid& grid, const SpecField& g);
SpecField curl(const SpatialGrid& grid, const SpecField& w);
SpecField divergence(const SpatialGrid& grid, const SpecField& w);
SpecField gradient(const SpatialGrid& grid, const SpecField& s);
double max_abs(const PhysField& p);

}  // namespace vmb
