#include "vmb/velocity_space.hpp"

#include <cmath>
#include <numbers>

#include "vmb/errors.hpp"
#include "vmb/quadrature.hpp"

namespace vmb {

void hermite_values(double x, int nmax, double* out) {
  out[0] = 1.0;
  if (nmax >= 1) out[1] = x;
  for (int n = 1; n < nmax; ++n)
    out[n + 1] = (x * out[n] - std::sqrt(static_cast<double>(n)) * out[n - 1]) /
                 std::sqrt(static_cast<double>(n + 1));
}

VelocityBasis::VelocityBasis(int modes_per_axis, int quad_points_per_axis)
    : degree_(modes_per_axis), nq_(quad_points_per_axis) {
  if (degree_ < 4) throw InvalidArgument("modes_per_axis must be >= 4, got " + std::to_string(degree_));
  if (nq_ == 0) nq_ = (3 * degree_ + 2) / 2;
  if (nq_ < degree_) throw InvalidArgument("quad_points_per_axis must be >= modes_per_axis");

  const int N = degree_;
  const int side = N + 1;
  lookup_.assign(side * side * side, -1);
  for (int d = 0; d <= N; ++d)
    for (int i = d; i >= 0; --i)
      for (int j = d - i; j >= 0; --j) {
        const int k = d - i - j;
        lookup_[(i * side + j) * side + k] = static_cast<int>(modes_.size());
        modes_.push_back({i, j, k});
      }
  const int M = size();

  // tensor Gauss-Hermite
  const Rule1D gh = gauss_hermite(nq_);
  const int nn = nq_ * nq_ * nq_;
  nodes_.resize(nn, 3);
  weights_.resize(nn);
  psi_.resize(nn, M);
  for (int a = 0, q = 0; a < nq_; ++a)
    for (int b = 0; b < nq_; ++b)
      for (int c = 0; c < nq_; ++c, ++q) {
        nodes_(q, 0) = gh.nodes[a];
        nodes_(q, 1) = gh.nodes[b];
        nodes_(q, 2) = gh.nodes[c];
        weights_(q) = gh.weights[a] * gh.weights[b] * gh.weights[c];
        psi_.row(q) = evaluate_basis({gh.nodes[a], gh.nodes[b], gh.nodes[c]}).transpose();
      }

  // ladder matrices
  for (int axis = 0; axis < 3; ++axis) {
    std::vector<Eigen::Triplet<double>> tv, td;
    for (int a = 0; a < M; ++a) {
      const MultiIndex m = modes_[a];
      const int n = m[axis];
      int idx[3] = {m.i, m.j, m.k};
      // v psi_n = sqrt(n+1) psi_{n+1} + sqrt(n) psi_{n-1}
      idx[axis] = n + 1;
      const int up = index_of(idx[0], idx[1], idx[2]);
      if (up >= 0) tv.emplace_back(up, a, std::sqrt(n + 1.0));
      if (n > 0) {
        idx[axis] = n - 1;
        const int dn = index_of(idx[0], idx[1], idx[2]);
        tv.emplace_back(dn, a, std::sqrt(static_cast<double>(n)));
        td.emplace_back(dn, a, std::sqrt(static_cast<double>(n)));
      }
    }
    mult_[axis].resize(M, M);
    mult_[axis].setFromTriplets(tv.begin(), tv.end());
    diff_[axis].resize(M, M);
    diff_[axis].setFromTriplets(td.begin(), td.end());
    raise_[axis] = mult_[axis] - diff_[axis];
  }
  // (v x B).grad_v = sum_k B_k sum_ij eps_ijk v_j d_i
  for (int k = 0; k < 3; ++k) {
    const int i = (k + 1) % 3, j = (k + 2) % 3;  // eps_ijk = +1 for (i,j,k) cyclic
    SparseRowMatrix p1 = mult_[j] * diff_[i];
    SparseRowMatrix p2 = mult_[i] * diff_[j];
    rot_[k] = p1 - p2;
  }

  kernel_ = Eigen::MatrixXd::Zero(M, 5);
  for (int c = 0; c < 4; ++c) kernel_(c, c) = 1.0;
  const double s3 = 1.0 / std::sqrt(3.0);
  kernel_(index_of(2, 0, 0), 4) = s3;
  kernel_(index_of(0, 2, 0), 4) = s3;
  kernel_(index_of(0, 0, 2), 4) = s3;

  // (1+|v|) Gram matrix, exact: sphere rule times Gauss-Laguerre(alpha=1) in t=r^2/2
  const SphereRule sph = product_sphere_rule(N + 1, 2 * N + 2);
  const Rule1D lag = gauss_laguerre(N / 2 + 1, 1.0);
  const double pref = 2.0 * std::pow(2.0 * std::numbers::pi, -1.5);
  Eigen::MatrixXd vals(sph.dirs.size() * lag.nodes.size(), M);
  Eigen::VectorXd w(vals.rows());
  Eigen::VectorXd tmp(M);
  for (std::size_t s = 0, q = 0; s < sph.dirs.size(); ++s)
    for (std::size_t r = 0; r < lag.nodes.size(); ++r, ++q) {
      const double rad = std::sqrt(2.0 * lag.nodes[r]);
      evaluate_basis({rad * sph.dirs[s][0], rad * sph.dirs[s][1], rad * sph.dirs[s][2]}, tmp.data());
      vals.row(q) = tmp.transpose();
      w(q) = pref * sph.weights[s] * lag.weights[r];
    }
  gram_lambda_ = Eigen::MatrixXd::Identity(M, M) + vals.transpose() * w.asDiagonal() * vals;
  gram_lambda_ = 0.5 * (gram_lambda_ + gram_lambda_.transpose()).eval();
}

int VelocityBasis::index_of(int i, int j, int k) const {
  if (i < 0 || j < 0 || k < 0 || i + j + k > degree_) return -1;
  const int side = degree_ + 1;
  return lookup_[(i * side + j) * side + k];
}

void VelocityBasis::evaluate_basis(const Vec3& v, double* out) const {
  double h[3][64];
  for (int axis = 0; axis < 3; ++axis) hermite_values(v[axis], degree_, h[axis]);
  for (std::size_t a = 0; a < modes_.size(); ++a) {
    const MultiIndex& m = modes_[a];
    out[a] = h[0][m.i] * h[1][m.j] * h[2][m.k];
  }
}

Eigen::VectorXd VelocityBasis::evaluate_basis(const Vec3& v) const {
  Eigen::VectorXd out(size());
  evaluate_basis(v, out.data());
  return out;
}

double VelocityBasis::evaluate(const VelocityFunction& f, const Vec3& v) const {
  return evaluate_basis(v).dot(f.coeffs);
}

VelocityFunction VelocityBasis::project(const std::function<double(const Vec3&)>& g) const {
  Eigen::VectorXd gv(num_nodes());
  for (int q = 0; q < num_nodes(); ++q) gv(q) = weights_(q) * g({nodes_(q, 0), nodes_(q, 1), nodes_(q, 2)});
  return {psi_.transpose() * gv};
}

VelocityFunction VelocityBasis::zero() const { return {Eigen::VectorXd::Zero(size())}; }

VelocityFunction VelocityBasis::constant(double c) const {
  VelocityFunction f = zero();
  f.coeffs(0) = c;
  return f;
}

VelocityFunction VelocityBasis::velocity(int axis) const {
  VelocityFunction f = zero();
  f.coeffs(velocity_index(axis)) = 1.0;
  return f;
}

VelocityFunction VelocityBasis::temperature_mode() const {
  VelocityFunction f = zero();
  const double c = 1.0 / std::sqrt(2.0);  // v^2 - 1 = sqrt(2) psi_2
  f.coeffs(index_of(2, 0, 0)) = c;
  f.coeffs(index_of(0, 2, 0)) = c;
  f.coeffs(index_of(0, 0, 2)) = c;
  return f;
}

HydroMoments moments(const VelocityBasis& basis, const VelocityFunction& f,
                     const VelocityFunction& h, double eps) {
  HydroMoments m;
  const auto& c = f.coeffs;
  m.rho = c(0);
  for (int i = 0; i < 3; ++i) m.u[i] = c(1 + i);
  m.theta = std::sqrt(2.0) / 3.0 *
            (c(basis.index_of(2, 0, 0)) + c(basis.index_of(0, 2, 0)) + c(basis.index_of(0, 0, 2)));
  m.n = h.coeffs(0);
  for (int i = 0; i < 3; ++i) m.j[i] = h.coeffs(1 + i) / eps;
  return m;
}

VelocityFunction project_hydro(const VelocityBasis& basis, const VelocityFunction& f) {
  const Eigen::MatrixXd& K = basis.hydro_kernel();
  return {K * (K.transpose() * f.coeffs)};
}

VelocityFunction project_charge(const VelocityBasis& basis, const VelocityFunction& h) {
  VelocityFunction p = basis.zero();
  p.coeffs(0) = h.coeffs(0);
  return p;
}

double weighted_inner(const VelocityBasis& basis, const VelocityFunction& f,
                      const VelocityFunction& g, Weight w) {
  if (w == Weight::plain) return f.coeffs.dot(g.coeffs);
  return f.coeffs.dot(basis.lambda_gram() * g.coeffs);
}

VelocityFunction product(const VelocityBasis& basis, const VelocityFunction& f,
                         const VelocityFunction& g) {
  const Eigen::MatrixXd& P = basis.values_at_nodes();
  Eigen::VectorXd fv = P * f.coeffs;
  Eigen::VectorXd gv = P * g.coeffs;
  Eigen::VectorXd prod = basis.weights().cwiseProduct(fv).cwiseProduct(gv);
  return {P.transpose() * prod};
}

}  // namespace vmb
