#pragma once
// Linearized collision operators L (sum species), Ls (difference species)
// and the bilinear Gamma, as Galerkin matrices on a VelocityBasis.
#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>

#include "vmb/velocity_space.hpp"

namespace vmb {

enum class BackendKind { relaxation, hard_sphere };
enum class Species { sum, difference };  // L acts on f, Ls on h

BackendKind parse_backend(const std::string& name);
std::string to_string(BackendKind k);

struct CoercivityCertificate {
  double lambda_est = 0.0;         // on Ker(L)^perp, Lambda-weighted
  double lambda_est_charge = 0.0;  // same for Ls
  double gamma_orth_residual = 0.0;
  double symmetry_residual = 0.0;
  double kernel_residual = 0.0;
  double projector_idempotence = 0.0;
  double coercivity_margin = 0.0;  // min over samples of <Lg,g> - lambda_est |g_perp|^2_Lambda
};

class CollisionBackend {
 public:
  static CollisionBackend build(BackendKind kind, std::shared_ptr<const VelocityBasis> basis);
  // load assembled matrices if the cache file matches, else assemble and write it
  static CollisionBackend build_cached(BackendKind kind, std::shared_ptr<const VelocityBasis> basis,
                                       const std::string& cache_path);

  BackendKind kind() const { return kind_; }
  const VelocityBasis& basis() const { return *basis_; }
  std::shared_ptr<const VelocityBasis> basis_ptr() const { return basis_; }
  const Eigen::MatrixXd& matrix(Species s) const { return s == Species::sum ? L_ : Ls_; }

  VelocityFunction apply(Species s, const VelocityFunction& g) const;
  // sum: symmetrized Gamma(g,h) for the f equation; difference: Gamma(h,f) for the h equation
  VelocityFunction bilinear(Species s, const VelocityFunction& g, const VelocityFunction& h) const;
  // columns are independent arguments
  Eigen::MatrixXd bilinear_batch(Species s, const Eigen::MatrixXd& G, const Eigen::MatrixXd& H) const;

  VelocityFunction solve_on_orthogonal(Species s, const VelocityFunction& rhs) const;
  // orthonormal basis (coefficient space) of the kernel
  Eigen::MatrixXd kernel(Species s) const;

  // upper bound on the operator norm of Gamma(f, .) over the columns of F
  double bilinear_rate(const Eigen::MatrixXd& F) const;

  void save(const std::string& path) const;
  static CollisionBackend load(const std::string& path, std::shared_ptr<const VelocityBasis> basis);

 private:
  CollisionBackend() = default;
  void finalize();
  const Eigen::MatrixXd& gamma_tensor() const;

  BackendKind kind_ = BackendKind::relaxation;
  std::shared_ptr<const VelocityBasis> basis_;
  Eigen::MatrixXd L_, Ls_;
  std::shared_ptr<Eigen::LLT<Eigen::MatrixXd>> solve_sum_, solve_diff_;
  struct GammaCache {
    std::once_flag once;
    Eigen::MatrixXd G;  // M x M^2, G(a, b*M + c) = <Gamma(psi_b, psi_c), psi_a>
    double frobenius = 0.0;
  };
  std::shared_ptr<GammaCache> gamma_;
};

CoercivityCertificate verify_assumptions(const CollisionBackend& backend, int n_samples,
                                         std::uint64_t seed = 12345);

}  // namespace vmb
