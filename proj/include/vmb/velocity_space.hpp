#pragma once
// Hermite velocity basis orthonormal under the unit Maxwellian M, with
// tensor Gauss-Hermite quadrature. Degree cutoff is by total degree.
#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace vmb {

using Vec3 = std::array<double, 3>;
using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct MultiIndex {
  int i = 0, j = 0, k = 0;
  int degree() const { return i + j + k; }
  int operator[](int axis) const { return axis == 0 ? i : (axis == 1 ? j : k); }
};

struct VelocityFunction {
  Eigen::VectorXd coeffs;
};

struct HydroMoments {
  double rho = 0.0;
  Vec3 u{};
  double theta = 0.0;
  double n = 0.0;
  Vec3 j{};
};

enum class Weight { plain, lambda };

class VelocityBasis {
 public:
  // modes_per_axis is the total-degree cutoff N; quad points default to
  // ceil((3N+1)/2), enough for exact cubic products of basis functions.
  VelocityBasis(int modes_per_axis, int quad_points_per_axis = 0);

  int max_degree() const { return degree_; }
  int quad_points_per_axis() const { return nq_; }
  int size() const { return static_cast<int>(modes_.size()); }
  const MultiIndex& mode(int a) const { return modes_[a]; }
  int index_of(int i, int j, int k) const;  // -1 when truncated
  static int velocity_index(int axis) { return 1 + axis; }

  // tensor quadrature, weights include M
  int num_nodes() const { return static_cast<int>(weights_.size()); }
  const Eigen::MatrixX3d& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::MatrixXd& values_at_nodes() const { return psi_; }  // nodes x modes

  Eigen::VectorXd evaluate_basis(const Vec3& v) const;
  void evaluate_basis(const Vec3& v, double* out) const;
  double evaluate(const VelocityFunction& f, const Vec3& v) const;
  VelocityFunction project(const std::function<double(const Vec3&)>& g) const;

  VelocityFunction zero() const;
  VelocityFunction constant(double c) const;
  VelocityFunction velocity(int axis) const;
  VelocityFunction temperature_mode() const;  // (|v|^2-3)/2

  // exact ladder matrices on the truncated span
  const SparseRowMatrix& multiply(int axis) const { return mult_[axis]; }
  const SparseRowMatrix& differentiate(int axis) const { return diff_[axis]; }
  const SparseRowMatrix& raising(int axis) const { return raise_[axis]; }   // v_i - d_i
  const SparseRowMatrix& rotation(int axis) const { return rot_[axis]; }    // sum eps_ijk v_j d_i

  // orthonormal columns spanning {1, v1, v2, v3, (|v|^2-3)/sqrt(6)}
  const Eigen::MatrixXd& hydro_kernel() const { return kernel_; }
  const Eigen::MatrixXd& lambda_gram() const { return gram_lambda_; }

 private:
  int degree_;
  int nq_;
  std::vector<MultiIndex> modes_;
  std::vector<int> lookup_;  // (N+1)^3 -> flat or -1
  Eigen::MatrixX3d nodes_;
  Eigen::VectorXd weights_;
  Eigen::MatrixXd psi_;
  std::array<SparseRowMatrix, 3> mult_, diff_, raise_, rot_;
  Eigen::MatrixXd kernel_;
  Eigen::MatrixXd gram_lambda_;
};

HydroMoments moments(const VelocityBasis& basis, const VelocityFunction& f,
                     const VelocityFunction& h, double eps);
VelocityFunction project_hydro(const VelocityBasis& basis, const VelocityFunction& f);
VelocityFunction project_charge(const VelocityBasis& basis, const VelocityFunction& h);
double weighted_inner(const VelocityBasis& basis, const VelocityFunction& f,
                      const VelocityFunction& g, Weight w);
// Galerkin projection of the pointwise product
VelocityFunction product(const VelocityBasis& basis, const VelocityFunction& f,
                         const VelocityFunction& g);

// normalized Hermite values He_n(x)/sqrt(n!) for n = 0..nmax
void hermite_values(double x, int nmax, double* out);

}  // namespace vmb
