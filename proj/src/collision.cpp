#include "vmb/collision.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "vmb/errors.hpp"
#include "vmb/io.hpp"
#include "vmb/quadrature.hpp"

namespace vmb {

BackendKind parse_backend(const std::string& name) {
  if (name == "relaxation") return BackendKind::relaxation;
  if (name == "hard_sphere") return BackendKind::hard_sphere;
  throw TypeMismatch("backend must be relaxation or hard_sphere, got '" + name + "'");
}

std::string to_string(BackendKind k) { return k == BackendKind::relaxation ? "relaxation" : "hard_sphere"; }

namespace {

constexpr double kKernelTol = 1e-6;
constexpr double kOrthTol = 1e-8;

// Hard-sphere collision integrals in centre-of-mass variables:
//   v = (V + r w)/sqrt2, v* = (V - r w)/sqrt2, v' = (V + r omega)/sqrt2,
// |v - v*| M M* dv dv* = sqrt2 r M(V) M(r w) dV r^2 dr dw.
// With t = r^2/2 the radial weight is 2 sqrt2 (2pi)^{-3/2} t e^{-t} dt.
// The post-collision velocity does not depend on w, so the omega sum is
// shared across all w on a (V, r) shell.
struct HardSpherePoints {
  Rule1D gv;
  Rule1D lag;
  SphereRule sph;
  std::vector<int> antipode;
  double radial_pref;

  explicit HardSpherePoints(int N)
      : gv(gauss_hermite(N + 1)),
        lag(gauss_laguerre(N / 2 + 1, 1.0)),
        sph(product_sphere_rule(std::max(N + 1, 8), std::max(2 * N + 2, 16))),
        radial_pref(2.0 * std::sqrt(2.0) * std::pow(2.0 * std::numbers::pi, -1.5)) {
    const int ns = static_cast<int>(sph.dirs.size());
    antipode.assign(ns, -1);
    for (int s = 0; s < ns; ++s)
      for (int t = 0; t < ns; ++t) {
        const auto& a = sph.dirs[s];
        const auto& b = sph.dirs[t];
        if (std::abs(a[0] + b[0]) + std::abs(a[1] + b[1]) + std::abs(a[2] + b[2]) < 1e-12) {
          antipode[s] = t;
          break;
        }
      }
    for (int s = 0; s < ns; ++s)
      if (antipode[s] < 0) throw AssemblyFailure("sphere rule is not antipodally symmetric");
  }

  // rows: (r, s) shells for a fixed V; Y = psi(v), mu = measure weights,
  // tsum = sum_omega w_omega psi(v'), one row per r
  void shell(const VelocityBasis& basis, const Vec3& V, double wV, Eigen::MatrixXd& Y,
             Eigen::VectorXd& mu, Eigen::MatrixXd& tsum) const {
    const int ns = static_cast<int>(sph.dirs.size());
    const int nt = static_cast<int>(lag.nodes.size());
    const int M = basis.size();
    Y.resize(nt * ns, M);
    mu.resize(nt * ns);
    tsum.setZero(nt, M);
    Eigen::VectorXd tmp(M);
    const double is2 = 1.0 / std::sqrt(2.0);
    for (int r = 0; r < nt; ++r) {
      const double rad = std::sqrt(2.0 * lag.nodes[r]);
      for (int s = 0; s < ns; ++s) {
        const auto& d = sph.dirs[s];
        basis.evaluate_basis({(V[0] + rad * d[0]) * is2, (V[1] + rad * d[1]) * is2,
                              (V[2] + rad * d[2]) * is2},
                             tmp.data());
        const int row = r * ns + s;
        Y.row(row) = tmp.transpose();
        mu(row) = wV * radial_pref * lag.weights[r] * sph.weights[s];
        tsum.row(r) += sph.weights[s] * tmp.transpose();
      }
    }
  }

  // rows of psi(v*) = psi at the antipodal direction of the same shell
  Eigen::MatrixXd partner(const Eigen::MatrixXd& Y) const {
    const int ns = static_cast<int>(sph.dirs.size());
    Eigen::MatrixXd Z(Y.rows(), Y.cols());
    for (Eigen::Index row = 0; row < Y.rows(); ++row) {
      const int r = static_cast<int>(row) / ns, s = static_cast<int>(row) % ns;
      Z.row(row) = Y.row(r * ns + antipode[s]);
    }
    return Z;
  }

  template <class F>
  void for_each_centre(const VelocityBasis& basis, F&& body) const {
    const int n = static_cast<int>(gv.nodes.size());
    (void)basis;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          body(Vec3{gv.nodes[a], gv.nodes[b], gv.nodes[c]}, gv.weights[a] * gv.weights[b] * gv.weights[c]);
  }
};

void assemble_hard_sphere(const VelocityBasis& basis, Eigen::MatrixXd& L, Eigen::MatrixXd& Ls) {
  const int M = basis.size();
  const HardSpherePoints pts(basis.max_degree());
  const int ns = static_cast<int>(pts.sph.dirs.size());
  L.setZero(M, M);
  Ls.setZero(M, M);
  Eigen::MatrixXd Y, tsum;
  Eigen::VectorXd mu;
  pts.for_each_centre(basis, [&](const Vec3& V, double wV) {
    pts.shell(basis, V, wV, Y, mu, tsum);
    const Eigen::MatrixXd Z = pts.partner(Y);
    const Eigen::VectorXd smu = mu.cwiseSqrt();
    const Eigen::MatrixXd S = smu.asDiagonal() * (Y + Z);
    const Eigen::MatrixXd Ys = smu.asDiagonal() * Y;
    // L = sum mu [2pi S S^T - (S T^T + T S^T)/2]; Ls = sum mu [4pi Y Y^T - (Y T^T + T Y^T)/2]
    L.selfadjointView<Eigen::Lower>().rankUpdate(S.transpose(), 2.0 * std::numbers::pi);
    Ls.selfadjointView<Eigen::Lower>().rankUpdate(Ys.transpose(), 4.0 * std::numbers::pi);
    const int nt = static_cast<int>(tsum.rows());
    for (int r = 0; r < nt; ++r) {
      const auto rows = Eigen::seqN(r * ns, ns);
      const Eigen::VectorXd sv = (Y(rows, Eigen::all) + Z(rows, Eigen::all)).transpose() * mu(rows);
      const Eigen::VectorXd yv = Y(rows, Eigen::all).transpose() * mu(rows);
      const Eigen::VectorXd t = tsum.row(r).transpose();
      L.selfadjointView<Eigen::Lower>().rankUpdate(sv, t, -0.5);
      Ls.selfadjointView<Eigen::Lower>().rankUpdate(yv, t, -0.5);
    }
  });
  L = L.selfadjointView<Eigen::Lower>();
  Ls = Ls.selfadjointView<Eigen::Lower>();
}

Eigen::MatrixXd assemble_hard_sphere_gamma(const VelocityBasis& basis) {
  const int M = basis.size();
  const HardSpherePoints pts(basis.max_degree());
  const int ns = static_cast<int>(pts.sph.dirs.size());
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(M, M * M);
  Eigen::MatrixXd Y, tsum;
  Eigen::VectorXd mu;
  pts.for_each_centre(basis, [&](const Vec3& V, double wV) {
    pts.shell(basis, V, wV, Y, mu, tsum);
    const Eigen::MatrixXd Z = pts.partner(Y);
    const Eigen::MatrixXd muZ = mu.asDiagonal() * Z;
    const int nt = static_cast<int>(tsum.rows());
    // gain: <Gamma(psi_b, psi_c), psi_a> += tsum_a(V,r) sum_w mu psi_b(v) psi_c(v*)
    for (int r = 0; r < nt; ++r) {
      const auto rows = Eigen::seqN(r * ns, ns);
      const Eigen::MatrixXd Ct = muZ(rows, Eigen::all).transpose() * Y(rows, Eigen::all);  // (c, b)
      const Eigen::Map<const Eigen::RowVectorXd> flat(Ct.data(), M * M);
      G.noalias() += tsum.row(r).transpose() * flat;
    }
    // loss: -4pi sum mu psi_a(v) psi_b(v) psi_c(v*)
    Eigen::MatrixXd T(M, M);
    for (int a = 0; a < M; ++a) {
      const Eigen::MatrixXd Ya = Y.array().colwise() * Y.col(a).array();
      T.noalias() = muZ.transpose() * Ya;  // (c, b)
      G.row(a) -= 4.0 * std::numbers::pi * Eigen::Map<const Eigen::RowVectorXd>(T.data(), M * M);
    }
  });
  return G;
}

}  // namespace

CollisionBackend CollisionBackend::build(BackendKind kind, std::shared_ptr<const VelocityBasis> basis) {
  if (!basis) throw InvalidArgument("null basis");
  CollisionBackend b;
  b.kind_ = kind;
  b.basis_ = std::move(basis);
  const int M = b.basis_->size();
  if (kind == BackendKind::relaxation) {
    const Eigen::MatrixXd& K = b.basis_->hydro_kernel();
    b.L_ = Eigen::MatrixXd::Identity(M, M) - K * K.transpose();
    b.Ls_ = Eigen::MatrixXd::Identity(M, M);
    b.Ls_(0, 0) = 0.0;
  } else {
    assemble_hard_sphere(*b.basis_, b.L_, b.Ls_);
  }
  b.finalize();
  return b;
}

CollisionBackend CollisionBackend::build_cached(BackendKind kind, std::shared_ptr<const VelocityBasis> basis,
                                                const std::string& cache_path) {
  if (cache_path.empty() || kind == BackendKind::relaxation) return build(kind, std::move(basis));
  if (std::filesystem::exists(cache_path)) {
    try {
      CollisionBackend b = load(cache_path, basis);
      if (b.kind_ == kind) return b;
    } catch (const Error&) {
      // stale or foreign cache: reassemble
    }
  }
  CollisionBackend b = build(kind, std::move(basis));
  b.save(cache_path);
  return b;
}

void CollisionBackend::finalize() {
  const int M = basis_->size();
  const Eigen::MatrixXd Ks = kernel(Species::sum);
  const Eigen::MatrixXd Kd = kernel(Species::difference);
  const double res_sum = (L_ * Ks).cwiseAbs().maxCoeff();
  const double res_diff = (Ls_ * Kd).cwiseAbs().maxCoeff();
  if (res_sum > kKernelTol || res_diff > kKernelTol)
    throw AssemblyFailure("kernel violation " + std::to_string(std::max(res_sum, res_diff)) +
                          " exceeds 1e-6; increase quadrature resolution");
  auto factor = [&](const Eigen::MatrixXd& A, const Eigen::MatrixXd& K) {
    Eigen::MatrixXd D = A + K * K.transpose();
    D = 0.5 * (D + D.transpose()).eval();
    auto llt = std::make_shared<Eigen::LLT<Eigen::MatrixXd>>(D);
    return llt->info() == Eigen::Success ? llt : nullptr;
  };
  solve_sum_ = factor(L_, Ks);
  solve_diff_ = factor(Ls_, Kd);
  gamma_ = std::make_shared<GammaCache>();
  (void)M;
}

double CollisionBackend::bilinear_rate(const Eigen::MatrixXd& F) const {
  if (F.size() == 0) return 0.0;
  if (kind_ == BackendKind::relaxation) return (basis_->values_at_nodes() * F).cwiseAbs().maxCoeff();
  gamma_tensor();
  return gamma_->frobenius * F.colwise().norm().maxCoeff();
}

Eigen::MatrixXd CollisionBackend::kernel(Species s) const {
  if (s == Species::sum) return basis_->hydro_kernel();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(basis_->size(), 1);
  k(0, 0) = 1.0;
  return k;
}

VelocityFunction CollisionBackend::apply(Species s, const VelocityFunction& g) const {
  return {matrix(s) * g.coeffs};
}

const Eigen::MatrixXd& CollisionBackend::gamma_tensor() const {
  std::call_once(gamma_->once, [this] {
    gamma_->G = assemble_hard_sphere_gamma(*basis_);
    gamma_->frobenius = gamma_->G.norm();
  });
  return gamma_->G;
}

Eigen::MatrixXd CollisionBackend::bilinear_batch(Species s, const Eigen::MatrixXd& G,
                                                 const Eigen::MatrixXd& H) const {
  const int M = basis_->size();
  const Eigen::Index n = G.cols();
  if (kind_ == BackendKind::relaxation) {
    const Eigen::MatrixXd& P = basis_->values_at_nodes();
    Eigen::MatrixXd gv = P * G;
    const Eigen::MatrixXd hv = P * H;
    gv.array() *= hv.array();
    gv.array().colwise() *= basis_->weights().array();
    Eigen::MatrixXd out = P.transpose() * gv;
    if (s == Species::sum) {
      const Eigen::MatrixXd& K = basis_->hydro_kernel();
      out -= K * (K.transpose() * out);
    } else {
      out.row(0).setZero();
    }
    return out;
  }
  const Eigen::MatrixXd& T = gamma_tensor();
  Eigen::MatrixXd kr(M * M, n);
  for (Eigen::Index p = 0; p < n; ++p)
    for (int b = 0; b < M; ++b) kr.col(p).segment(b * M, M) = G(b, p) * H.col(p);
  Eigen::MatrixXd out = T * kr;
  if (s == Species::sum) {
    for (Eigen::Index p = 0; p < n; ++p)
      for (int b = 0; b < M; ++b) kr.col(p).segment(b * M, M) = H(b, p) * G.col(p);
    out = 0.5 * (out + T * kr);
  }
  return out;
}

VelocityFunction CollisionBackend::bilinear(Species s, const VelocityFunction& g, const VelocityFunction& h) const {
  return {bilinear_batch(s, g.coeffs, h.coeffs).col(0)};
}

VelocityFunction CollisionBackend::solve_on_orthogonal(Species s, const VelocityFunction& rhs) const {
  const Eigen::MatrixXd K = kernel(s);
  const Eigen::VectorXd kc = K.transpose() * rhs.coeffs;
  const double scale = std::max(1.0, rhs.coeffs.norm());
  if (kc.cwiseAbs().maxCoeff() > kOrthTol * scale)
    throw NonOrthogonalRHS("right-hand side has kernel component " + std::to_string(kc.cwiseAbs().maxCoeff()));
  const auto& llt = s == Species::sum ? solve_sum_ : solve_diff_;
  if (!llt) throw SingularOperator("operator is not positive definite on the kernel complement");
  Eigen::VectorXd x = llt->solve(rhs.coeffs - K * kc);
  x -= K * (K.transpose() * x);
  return {x};
}

namespace {
constexpr char kMagic[8] = {'V', 'M', 'B', 'C', 'O', 'L', 'L', '1'};
}

void CollisionBackend::save(const std::string& path) const {
  const int M = basis_->size();
  std::vector<double> body;
  body.reserve(2 * M * M);
  for (const Eigen::MatrixXd* A : {&L_, &Ls_})
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j) body.push_back((*A)(i, j));
  const std::uint64_t sum = fnv1a(body.data(), body.size() * sizeof(double));
  const std::uint32_t hdr[4] = {static_cast<std::uint32_t>(kind_), static_cast<std::uint32_t>(basis_->max_degree()),
                                static_cast<std::uint32_t>(basis_->quad_points_per_axis()),
                                static_cast<std::uint32_t>(M)};
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write collision cache " + path);
    out.write(kMagic, 8);
    out.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
    out.write(reinterpret_cast<const char*>(&sum), sizeof sum);
    out.write(reinterpret_cast<const char*>(body.data()), body.size() * sizeof(double));
    if (!out) throw IoError("write failed for collision cache " + path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move collision cache into place: " + path);
}

CollisionBackend CollisionBackend::load(const std::string& path, std::shared_ptr<const VelocityBasis> basis) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open collision cache " + path);
  char magic[8];
  std::uint32_t hdr[4];
  std::uint64_t sum = 0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(hdr), sizeof hdr);
  in.read(reinterpret_cast<char*>(&sum), sizeof sum);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) throw IoError("not a collision cache: " + path);
  const int M = basis->size();
  if (hdr[0] > 1 || static_cast<int>(hdr[1]) != basis->max_degree() || static_cast<int>(hdr[3]) != M)
    throw IoError("collision cache does not match basis: " + path);
  std::vector<double> body(2 * static_cast<std::size_t>(M) * M);
  in.read(reinterpret_cast<char*>(body.data()), body.size() * sizeof(double));
  if (!in) throw IoError("truncated collision cache " + path);
  if (fnv1a(body.data(), body.size() * sizeof(double)) != sum) throw IoError("checksum mismatch in " + path);
  CollisionBackend b;
  b.kind_ = static_cast<BackendKind>(hdr[0]);
  b.basis_ = std::move(basis);
  b.L_.resize(M, M);
  b.Ls_.resize(M, M);
  std::size_t k = 0;
  for (Eigen::MatrixXd* A : {&b.L_, &b.Ls_})
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j) (*A)(i, j) = body[k++];
  b.finalize();
  return b;
}

CoercivityCertificate verify_assumptions(const CollisionBackend& backend, int n_samples, std::uint64_t seed) {
  const VelocityBasis& basis = backend.basis();
  const int M = basis.size();
  CoercivityCertificate cert;
  const Eigen::MatrixXd& W = basis.lambda_gram();

  auto lambda_min = [&](Species s) {
    const Eigen::MatrixXd K = backend.kernel(s);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(K);
    const Eigen::MatrixXd Q = qr.householderQ();
    const Eigen::MatrixXd Z = Q.rightCols(M - K.cols());
    Eigen::MatrixXd A = Z.transpose() * backend.matrix(s) * Z;
    Eigen::MatrixXd B = Z.transpose() * W * Z;
    A = 0.5 * (A + A.transpose()).eval();
    B = 0.5 * (B + B.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  };
  cert.lambda_est = lambda_min(Species::sum);
  cert.lambda_est_charge = lambda_min(Species::difference);

  for (Species s : {Species::sum, Species::difference}) {
    const Eigen::MatrixXd& A = backend.matrix(s);
    cert.symmetry_residual = std::max(cert.symmetry_residual, (A - A.transpose()).cwiseAbs().maxCoeff());
    cert.kernel_residual = std::max(cert.kernel_residual, (A * backend.kernel(s)).cwiseAbs().maxCoeff());
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  auto random_fn = [&] {
    VelocityFunction g = basis.zero();
    for (int a = 0; a < M; ++a) g.coeffs(a) = nd(rng);
    g.coeffs /= g.coeffs.norm();
    return g;
  };
  const Eigen::MatrixXd Ks = backend.kernel(Species::sum);
  cert.coercivity_margin = std::numeric_limits<double>::infinity();
  for (int t = 0; t < n_samples; ++t) {
    const VelocityFunction g = random_fn();
    const VelocityFunction h = random_fn();
    for (Species s : {Species::sum, Species::difference}) {
      const Eigen::MatrixXd& A = backend.matrix(s);
      const double lhs = (A * g.coeffs).dot(h.coeffs);
      const double rhs = g.coeffs.dot(A * h.coeffs);
      cert.symmetry_residual = std::max(cert.symmetry_residual, std::abs(lhs - rhs));
    }
    const VelocityFunction pg = project_hydro(basis, g);
    const VelocityFunction ppg = project_hydro(basis, pg);
    cert.projector_idempotence = std::max(cert.projector_idempotence, (ppg.coeffs - pg.coeffs).norm());
    const Eigen::VectorXd gp = g.coeffs - pg.coeffs;
    const double q = g.coeffs.dot(backend.matrix(Species::sum) * g.coeffs);
    cert.coercivity_margin = std::min(cert.coercivity_margin, q - cert.lambda_est * gp.dot(W * gp));

    const Eigen::VectorXd gs = backend.bilinear(Species::sum, g, h).coeffs;
    const Eigen::VectorXd gg = backend.bilinear(Species::sum, g, g).coeffs;
    const Eigen::VectorXd gd = backend.bilinear(Species::difference, h, g).coeffs;
    cert.gamma_orth_residual = std::max({cert.gamma_orth_residual, (Ks.transpose() * gs).cwiseAbs().maxCoeff(),
                                         (Ks.transpose() * gg).cwiseAbs().maxCoeff(), std::abs(gd(0))});
  }
  if (n_samples == 0) cert.coercivity_margin = 0.0;
  return cert;
}

}  // namespace vmb
