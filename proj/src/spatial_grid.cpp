#include "vmb/spatial_grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>

#include "vmb/errors.hpp"

namespace vmb {
namespace {
// planner calls are not thread safe across FFTW
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct SpatialGrid::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

SpatialGrid::SpatialGrid(int dims_active, int modes) : dims_(dims_active), modes_(modes) {
  if (dims_ < 1 || dims_ > 3) throw InvalidArgument("dims_active must be 1, 2 or 3");
  if (modes_ < 4 || (modes_ & (modes_ - 1)) != 0) throw InvalidArgument("grid modes must be a power of two >= 4");
  n_ = {modes_, dims_ >= 2 ? modes_ : 1, dims_ >= 3 ? modes_ : 1};
  np_ = n_[0] * n_[1] * n_[2];
  nh_ = n_[0] / 2 + 1;
  nk_ = nh_ * n_[1] * n_[2];
  k_.resize(nk_);
  retained_.resize(nk_);
  pw_.resize(nk_);
  auto wrap = [](int i, int n) { return i <= n / 2 ? i : i - n; };
  for (int i3 = 0; i3 < n_[2]; ++i3)
    for (int i2 = 0; i2 < n_[1]; ++i2)
      for (int i1 = 0; i1 < nh_; ++i1) {
        const int m = (i3 * n_[1] + i2) * nh_ + i1;
        const int k1 = i1, k2 = wrap(i2, n_[1]), k3 = wrap(i3, n_[2]);
        k_[m] = {double(k1), double(k2), double(k3)};
        const bool keep = 3 * k1 < n_[0] && 3 * std::abs(k2) < std::max(n_[1], 2) &&
                          3 * std::abs(k3) < std::max(n_[2], 2);
        retained_[m] = keep;
        if (keep) kept_.push_back(m);
        pw_[m] = (i1 == 0 || 2 * i1 == n_[0]) ? 1.0 : 2.0;
      }
}

SpatialGrid::~SpatialGrid() = default;

double SpatialGrid::volume() const { return std::pow(2.0 * std::numbers::pi, dims_); }
double SpatialGrid::dx() const { return 2.0 * std::numbers::pi / modes_; }

Vec3 SpatialGrid::point(int p) const {
  const int i1 = p % n_[0];
  const int i2 = (p / n_[0]) % n_[1];
  const int i3 = p / (n_[0] * n_[1]);
  const double h = 2.0 * std::numbers::pi / modes_;
  return {i1 * h, i2 * h, i3 * h};
}

int SpatialGrid::mode_of(int k1, int k2, int k3) const {
  if (k1 < 0 || k1 >= nh_) return -1;
  if (std::abs(k2) > n_[1] / 2 || std::abs(k3) > n_[2] / 2) return -1;
  const int i2 = k2 < 0 ? k2 + n_[1] : k2;
  const int i3 = k3 < 0 ? k3 + n_[2] : k3;
  return (i3 * n_[1] + i2) * nh_ + k1;
}

const SpatialGrid::Plans& SpatialGrid::plans(int components) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = plans_.find(components);
  if (it != plans_.end()) return *it->second;
  auto p = std::make_unique<Plans>();
  {
    std::lock_guard<std::mutex> plock(planner_mutex());
    const int dims[3] = {n_[2], n_[1], n_[0]};
    double* in = fftw_alloc_real(static_cast<std::size_t>(np_) * components);
    fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(nk_) * components);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    p->fwd = fftw_plan_many_dft_r2c(3, dims, components, in, nullptr, components, 1, out, nullptr, components, 1,
                                    flags);
    p->bwd = fftw_plan_many_dft_c2r(3, dims, components, out, nullptr, components, 1, in, nullptr, components, 1,
                                    flags | FFTW_DESTROY_INPUT);
    fftw_free(in);
    fftw_free(out);
  }
  if (!p->fwd || !p->bwd) throw NumericalError("FFTW planning failed");
  return *(plans_[components] = std::move(p));
}

void SpatialGrid::forward(const double* phys, cplx* spec, int components) const {
  const Plans& p = plans(components);
  std::vector<double> in(phys, phys + static_cast<std::size_t>(np_) * components);
  fftw_execute_dft_r2c(p.fwd, in.data(), reinterpret_cast<fftw_complex*>(spec));
  const double scale = 1.0 / np_;
  for (int m = 0; m < nk_; ++m) {
    cplx* row = spec + static_cast<std::size_t>(m) * components;
    const double s = retained_[m] ? scale : 0.0;
    for (int c = 0; c < components; ++c) row[c] *= s;
  }
}

void SpatialGrid::backward(const cplx* spec, double* phys, int components) const {
  const Plans& p = plans(components);
  std::vector<cplx> in(spec, spec + static_cast<std::size_t>(nk_) * components);
  fftw_execute_dft_c2r(p.bwd, reinterpret_cast<fftw_complex*>(in.data()), phys);
}

SpecField SpatialGrid::forward(const PhysField& phys) const {
  if (phys.rows() != np_) throw InvalidArgument("physical field has wrong number of points");
  SpecField out(nk_, phys.cols());
  forward(phys.data(), out.data(), static_cast<int>(phys.cols()));
  return out;
}

PhysField SpatialGrid::backward(const SpecField& spec) const {
  if (spec.rows() != nk_) throw InvalidArgument("spectral field has wrong number of modes");
  PhysField out(np_, spec.cols());
  backward(spec.data(), out.data(), static_cast<int>(spec.cols()));
  return out;
}

double sobolev_norm_sq(const SpatialGrid& grid, const SpecField& g, int s) {
  double acc = 0.0;
  for (int m = 0; m < grid.num_modes(); ++m) {
    const double k2 = grid.k2(m);
    double mult = 0.0, p = 1.0;
    for (int i = 0; i <= s; ++i, p *= k2) mult += p;
    acc += grid.parseval_weight(m) * mult * g.row(m).squaredNorm();
  }
  return grid.volume() * acc;
}

double l2_norm_sq(const SpatialGrid& grid, const SpecField& g) { return sobolev_norm_sq(grid, g, 0); }

Eigen::VectorXd integral(const SpatialGrid& grid, const SpecField& g) {
  return grid.volume() * g.row(0).real().transpose();
}

SpecField curl(const SpatialGrid& grid, const SpecField& w) {
  SpecField out(w.rows(), 3);
  const cplx I(0.0, 1.0);
  for (int m = 0; m < grid.num_modes(); ++m) {
    const Vec3 k = grid.wavevector(m);
    out(m, 0) = I * (k[1] * w(m, 2) - k[2] * w(m, 1));
    out(m, 1) = I * (k[2] * w(m, 0) - k[0] * w(m, 2));
    out(m, 2) = I * (k[0] * w(m, 1) - k[1] * w(m, 0));
  }
  return out;
}

SpecField divergence(const SpatialGrid& grid, const SpecField& w) {
  SpecField out(w.rows(), 1);
  const cplx I(0.0, 1.0);
  for (int m = 0; m < grid.num_modes(); ++m) {
    const Vec3 k = grid.wavevector(m);
    out(m, 0) = I * (k[0] * w(m, 0) + k[1] * w(m, 1) + k[2] * w(m, 2));
  }
  return out;
}

SpecField gradient(const SpatialGrid& grid, const SpecField& s) {
  SpecField out(s.rows(), 3);
  const cplx I(0.0, 1.0);
  for (int m = 0; m < grid.num_modes(); ++m) {
    const Vec3 k = grid.wavevector(m);
    for (int d = 0; d < 3; ++d) out(m, d) = I * k[d] * s(m, 0);
  }
  return out;
}

double max_abs(const PhysField& p) { return p.size() ? p.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace vmb
