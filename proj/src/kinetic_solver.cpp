#include "vmb/kinetic_solver.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "vmb/errors.hpp"
#include "vmb/phi_functions.hpp"

namespace vmb {

InitKind parse_init_kind(const std::string& s) {
  if (s == "well_prepared") return InitKind::well_prepared;
  if (s == "general") return InitKind::general;
  throw TypeMismatch("init must be well_prepared or general, got '" + s + "'");
}

namespace {

const cplx I1(0.0, 1.0);

StateDerivative zero_derivative(const SpatialGrid& g, int M) {
  return {g.zeros(M), g.zeros(M), g.zeros(3), g.zeros(3)};
}

void add(StateDerivative& a, const StateDerivative& b) {
  a.f += b.f;
  a.h += b.h;
  a.E += b.E;
  a.B += b.B;
}

// k x w for a single mode
Eigen::Vector3cd cross_k(const Vec3& k, const cplx* w) {
  return {k[1] * w[2] - k[2] * w[1], k[2] * w[0] - k[0] * w[2], k[0] * w[1] - k[1] * w[0]};
}

bool all_finite(const SpecField& a) { return a.allFinite(); }

}  // namespace

StateDerivative RhsSplit::total() const {
  StateDerivative t = stiff_collision;
  add(t, stiff_maxwell);
  add(t, nonstiff);
  return t;
}

KineticSolver::KineticSolver(const SpatialGrid& grid, const CollisionBackend& backend, KineticOptions options)
    : grid_(grid), backend_(backend), opt_(options), M_(backend.basis().size()) {
  if (opt_.cfl <= 0.0) throw InvalidArgument("cfl must be positive");
  if (opt_.sobolev_s < 1) throw InvalidArgument("sobolev_s must be >= 1");
  for (int d = 0; d < 3; ++d) V_[d] = Eigen::MatrixXd(backend.basis().multiply(d));
}

KineticState KineticSolver::zero_state(double eps) const {
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("eps must lie in (0, 1]");
  KineticState s;
  s.eps = eps;
  s.f = grid_.zeros(M_);
  s.h = grid_.zeros(M_);
  s.E = grid_.zeros(3);
  s.B = grid_.zeros(3);
  return s;
}

KineticState KineticSolver::init_state(InitKind kind, const FluidData& data, double eps, const InitOptions& io) const {
  KineticState s = zero_state(eps);
  const int np = grid_.num_points();
  if (data.u.rows() != np || data.u.cols() != 3 || data.theta.rows() != np || data.B.rows() != np ||
      data.B.cols() != 3)
    throw InvalidArgument("fluid data does not match the grid");
  const double du = divergence_residual(grid_, data.u);
  const double db = divergence_residual(grid_, data.B);
  if (du > 1e-10) throw InvalidArgument("initial velocity is not solenoidal (residual " + std::to_string(du) + ")");
  if (db > 1e-10) throw InvalidArgument("initial magnetic field is not solenoidal (residual " + std::to_string(db) + ")");

  const SpecField u = grid_.forward(data.u);
  SpecField theta = grid_.forward(data.theta);
  s.B = grid_.forward(data.B);
  // rho = -theta, int rho = 0; theta mean set by the energy balance
  double theta0 = 0.0;
  if (io.energy_compensation) {
    const PhysField b = grid_.backward(s.B);
    theta0 = -eps / 3.0 * b.rowwise().squaredNorm().mean();
  }
  theta(0, 0) = theta0;
  const VelocityBasis& basis = backend_.basis();
  const Eigen::VectorXd tm = basis.temperature_mode().coeffs;
  for (int m : grid_.retained_modes()) {
    s.f(m, 0) = m == 0 ? cplx(0.0) : -theta(m, 0);
    for (int d = 0; d < 3; ++d) s.f(m, 1 + d) = u(m, d);
    for (int a = 0; a < M_; ++a)
      if (tm(a) != 0.0) s.f(m, a) += tm(a) * theta(m, 0);
  }

  if (io.ohmic_fields) {
    if (!io.coeffs) throw InvalidArgument("ohmic initial fields need transport coefficients");
    s.E = curl(grid_, s.B) / io.coeffs->sigma;
    for (int d = 0; d < 3; ++d) {
      const Eigen::VectorXcd vt = io.coeffs->v_tilde[d].coeffs.cast<cplx>();
      s.h += eps * s.E.col(d) * vt.transpose();
    }
  }

  if (kind == InitKind::general && io.micro_amp != 0.0) {
    std::mt19937_64 rng(io.seed);
    std::normal_distribution<double> nd;
    Eigen::VectorXd pf(M_), ph(M_);
    for (int a = 0; a < M_; ++a) pf(a) = nd(rng);
    for (int a = 0; a < M_; ++a) ph(a) = nd(rng);
    const Eigen::MatrixXd& K = basis.hydro_kernel();
    pf -= K * (K.transpose() * pf);
    ph(0) = 0.0;
    pf *= io.micro_amp / pf.norm();
    ph *= io.micro_amp / ph.norm();
    // cos(x1) profile
    const int m1 = grid_.mode_of(1, 0, 0);
    s.f.row(m1) += 0.5 * pf.transpose().cast<cplx>();
    s.h.row(m1) += 0.5 * ph.transpose().cast<cplx>();
  }
  return s;
}

SpecField KineticSolver::density(const KineticState& s) const { return s.f.col(0); }
SpecField KineticSolver::velocity(const KineticState& s) const { return s.f.middleCols(1, 3); }
SpecField KineticSolver::charge(const KineticState& s) const { return s.h.col(0); }
SpecField KineticSolver::current(const KineticState& s) const { return s.h.middleCols(1, 3) / s.eps; }

SpecField KineticSolver::temperature(const KineticState& s) const {
  const VelocityBasis& b = backend_.basis();
  return std::sqrt(2.0) / 3.0 *
         (s.f.col(b.index_of(2, 0, 0)) + s.f.col(b.index_of(0, 2, 0)) + s.f.col(b.index_of(0, 0, 2)));
}

void KineticSolver::nonlinear(const KineticState& s, SpecField& nf, SpecField& nh) const {
  nf = grid_.zeros(M_);
  nh = grid_.zeros(M_);
  if (!opt_.fields && !opt_.bilinear) return;
  const VelocityBasis& basis = backend_.basis();
  const PhysField F = grid_.backward(s.f);
  const PhysField H = grid_.backward(s.h);
  PhysField NF = PhysField::Zero(F.rows(), M_);
  PhysField NH = PhysField::Zero(F.rows(), M_);
  if (opt_.fields) {
    const PhysField E = grid_.backward(s.E);
    const PhysField B = grid_.backward(s.B);
    for (int i = 0; i < 3; ++i) {
      const SparseRowMatrix Rt = basis.raising(i).transpose();
      const SparseRowMatrix Wt = basis.rotation(i).transpose();
      const Eigen::VectorXd e = E.col(i);
      const Eigen::VectorXd b = B.col(i) / s.eps;
      PhysField t = H * Rt;
      NF += e.asDiagonal() * t;
      t = H * Wt;
      NF -= b.asDiagonal() * t;
      t = F * Rt;
      NH += e.asDiagonal() * t;
      t = F * Wt;
      NH -= b.asDiagonal() * t;
    }
  }
  if (opt_.bilinear) {
    const Eigen::MatrixXd Ft = F.transpose();
    const Eigen::MatrixXd Ht = H.transpose();
    NF += backend_.bilinear_batch(Species::sum, Ft, Ft).transpose() / s.eps;
    NH += backend_.bilinear_batch(Species::difference, Ht, Ft).transpose() / s.eps;
  }
  nf = grid_.forward(NF);
  nh = grid_.forward(NH);
}

RhsSplit KineticSolver::rhs_eval(const KineticState& s) const {
  RhsSplit r{zero_derivative(grid_, M_), zero_derivative(grid_, M_), zero_derivative(grid_, M_)};
  const double e = s.eps;
  if (opt_.collision) {
    r.stiff_collision.f = -(s.f * backend_.matrix(Species::sum).transpose()) / (e * e);
    r.stiff_collision.h = -(s.h * backend_.matrix(Species::difference).transpose()) / (e * e);
  }
  for (int m : grid_.retained_modes()) {
    const Vec3 k = grid_.wavevector(m);
    Eigen::MatrixXd kV = k[0] * V_[0] + k[1] * V_[1] + k[2] * V_[2];
    r.nonstiff.f.row(m) = -(I1 / e) * (kV * s.f.row(m).transpose()).transpose();
    r.nonstiff.h.row(m) = -(I1 / e) * (kV * s.h.row(m).transpose()).transpose();
    if (opt_.fields) {
      const Eigen::Vector3cd ckB = I1 * cross_k(k, &s.B(m, 0));
      const Eigen::Vector3cd ckE = I1 * cross_k(k, &s.E(m, 0));
      for (int d = 0; d < 3; ++d) {
        const cplx j = s.h(m, 1 + d) / e;
        r.stiff_maxwell.E(m, d) = (ckB(d) - j) / e;
        r.stiff_maxwell.B(m, d) = -ckE(d);
        r.stiff_maxwell.h(m, 1 + d) = s.E(m, d) / e;
      }
    }
  }
  SpecField nf, nh;
  nonlinear(s, nf, nh);
  r.nonstiff.f += nf;
  r.nonstiff.h += nh;
  return r;
}

Eigen::MatrixXcd KineticSolver::linear_operator(int m, double eps) const {
  const int M = M_;
  const int n = 2 * M + 9;
  const int oF = 0, oH = M, oE = 2 * M, oB = 2 * M + 3, oQ = 2 * M + 6;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  const Vec3 k = grid_.wavevector(m);
  const Eigen::MatrixXd kV = k[0] * V_[0] + k[1] * V_[1] + k[2] * V_[2];
  A.block(oF, oF, M, M) = -(I1 / eps) * kV.cast<cplx>();
  A.block(oH, oH, M, M) = -(I1 / eps) * kV.cast<cplx>();
  if (opt_.collision) {
    A.block(oF, oF, M, M) -= backend_.matrix(Species::sum).cast<cplx>() / (eps * eps);
    A.block(oH, oH, M, M) -= backend_.matrix(Species::difference).cast<cplx>() / (eps * eps);
  }
  for (int d = 0; d < 3; ++d) A(oQ + d, oH + 1 + d) = 1.0 / eps;
  if (opt_.fields) {
    for (int d = 0; d < 3; ++d) {
      A(oH + 1 + d, oE + d) = 1.0 / eps;
      A(oE + d, oH + 1 + d) = -1.0 / (eps * eps);
    }
    // (i k x B)_d = i eps_dab k_a B_b
    for (int d = 0; d < 3; ++d) {
      const int a = (d + 1) % 3, b = (d + 2) % 3;
      A(oE + d, oB + b) += I1 * k[a] / eps;
      A(oE + d, oB + a) -= I1 * k[b] / eps;
      A(oB + d, oE + b) -= I1 * k[a];
      A(oB + d, oE + a) += I1 * k[b];
    }
  }
  return A;
}

std::shared_ptr<const KineticSolver::Propagator> KineticSolver::propagator(double eps, double dt) const {
  std::lock_guard<std::mutex> lock(mu_);
  const auto key = std::make_pair(eps, dt);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  auto p = std::make_shared<Propagator>();
  const int M = M_;
  for (int m : grid_.retained_modes()) {
    const PhiFunctions phi = phi_functions(dt * linear_operator(m, eps));
    p->E.push_back(phi.phi0);
    p->P1.push_back(dt * phi.phi1.leftCols(2 * M));
    p->P2.push_back(dt * phi.phi2.leftCols(2 * M));
  }
  if (cache_.size() >= 4) cache_.clear();
  cache_[key] = p;
  return p;
}

double KineticSolver::explicit_rate(const KineticState& s) const {
  const int N = backend_.basis().max_degree();
  double rate = 0.0;
  if (opt_.fields) {
    const PhysField E = grid_.backward(s.E);
    const PhysField B = grid_.backward(s.B);
    const double emax = E.rows() ? E.rowwise().norm().maxCoeff() : 0.0;
    const double bmax = B.rows() ? B.rowwise().norm().maxCoeff() : 0.0;
    rate += std::sqrt(3.0 * N) * emax + N * bmax / s.eps;
  }
  if (opt_.bilinear) {
    const PhysField F = grid_.backward(s.f);
    rate += 2.0 * backend_.bilinear_rate(F.transpose()) / s.eps;
  }
  return rate;
}

KineticState KineticSolver::step(const KineticState& s, double dt, StepInfo* info) const {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  const double rate = explicit_rate(s);
  if (dt * rate > opt_.cfl) {
    std::ostringstream os;
    os << "dt = " << dt << " exceeds explicit bound " << opt_.cfl / rate << " (rate " << rate << ")";
    throw CFLViolation(os.str());
  }
  const int M = M_;
  const int n = 2 * M + 9;
  const auto prop = propagator(s.eps, dt);
  const auto& modes = grid_.retained_modes();

  SpecField nf0, nh0;
  nonlinear(s, nf0, nh0);

  auto pack = [&](const KineticState& st, int m) {
    Eigen::VectorXcd y(n);
    y.segment(0, M) = st.f.row(m).transpose();
    y.segment(M, M) = st.h.row(m).transpose();
    y.segment(2 * M, 3) = st.E.row(m).transpose();
    y.segment(2 * M + 3, 3) = st.B.row(m).transpose();
    y.segment(2 * M + 6, 3).setZero();
    return y;
  };
  auto unpack = [&](const Eigen::VectorXcd& y, KineticState& st, int m) {
    st.f.row(m) = y.segment(0, M).transpose();
    st.h.row(m) = y.segment(M, M).transpose();
    st.E.row(m) = y.segment(2 * M, 3).transpose();
    st.B.row(m) = y.segment(2 * M + 3, 3).transpose();
  };

  KineticState a = s;
  std::vector<Eigen::VectorXcd> ya(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const int m = modes[i];
    Eigen::VectorXcd nv(2 * M);
    nv << nf0.row(m).transpose(), nh0.row(m).transpose();
    ya[i] = prop->E[i] * pack(s, m) + prop->P1[i] * nv;
    unpack(ya[i], a, m);
  }
  SpecField nf1, nh1;
  nonlinear(a, nf1, nh1);
  KineticState out = a;
  out.t = s.t + dt;
  double cont = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const int m = modes[i];
    Eigen::VectorXcd dn(2 * M);
    dn << (nf1.row(m) - nf0.row(m)).transpose(), (nh1.row(m) - nh0.row(m)).transpose();
    const Eigen::VectorXcd y = ya[i] + prop->P2[i] * dn;
    unpack(y, out, m);
    const Vec3 k = grid_.wavevector(m);
    const cplx divQ = I1 * (k[0] * y(2 * M + 6) + k[1] * y(2 * M + 7) + k[2] * y(2 * M + 8));
    cont += grid_.parseval_weight(m) * std::norm(out.h(m, 0) - s.h(m, 0) + divQ);
  }
  if (opt_.gauss_projection_every > 0) {
    const long long idx = std::llround(out.t / dt);
    if (idx % opt_.gauss_projection_every == 0) project_gauss(out);
  }
  if (!all_finite(out.f) || !all_finite(out.h) || !all_finite(out.E) || !all_finite(out.B))
    throw NonFinite("state left the finite range at t = " + std::to_string(out.t));
  if (info) {
    info->continuity_residual = std::sqrt(grid_.volume() * cont) / dt;
    info->rate = rate;
  }
  return out;
}

void KineticSolver::project_gauss(KineticState& s) const {
  for (int m : grid_.retained_modes()) {
    const Vec3 k = grid_.wavevector(m);
    const double k2 = grid_.k2(m);
    if (k2 == 0.0) continue;
    const cplx divE = I1 * (k[0] * s.E(m, 0) + k[1] * s.E(m, 1) + k[2] * s.E(m, 2));
    const cplx delta = s.h(m, 0) - s.eps * divE;
    const cplx c = delta / (I1 * s.eps * k2);
    for (int d = 0; d < 3; ++d) s.E(m, d) += c * k[d];
  }
}

DiagnosticsRecord KineticSolver::diagnostics(const KineticState& s, double continuity) const {
  DiagnosticsRecord r;
  r.t = s.t;
  r.continuity_residual = continuity;
  const double vol = grid_.volume();
  const double e = s.eps;
  const PhysField E = grid_.backward(s.E);
  const PhysField B = grid_.backward(s.B);
  Vec3 exb{};
  double e2 = 0.0, b2 = 0.0;
  for (int p = 0; p < grid_.num_points(); ++p) {
    exb[0] += E(p, 1) * B(p, 2) - E(p, 2) * B(p, 1);
    exb[1] += E(p, 2) * B(p, 0) - E(p, 0) * B(p, 2);
    exb[2] += E(p, 0) * B(p, 1) - E(p, 1) * B(p, 0);
    e2 += E.row(p).squaredNorm();
    b2 += B.row(p).squaredNorm();
  }
  const double inv = 1.0 / grid_.num_points();
  for (int d = 0; d < 3; ++d) {
    r.momentum[d] = vol * (s.f(0, 1 + d).real() + e * exb[d] * inv);
    r.b_mean[d] = vol * s.B(0, d).real();
  }
  r.energy = vol * (temperature(s)(0, 0).real() + e * (e * e2 * inv + b2 * inv) / 3.0);
  r.mass = vol * s.f(0, 0).real();
  r.charge = vol * s.h(0, 0).real();
  const SpecField dB = divergence(grid_, s.B);
  const SpecField dE = divergence(grid_, s.E);
  r.div_b = dB.cwiseAbs().maxCoeff();
  r.gauss_residual = (e * dE - s.h.col(0)).cwiseAbs().maxCoeff();

  // energy functional H and dissipation D with s spatial derivatives
  const VelocityBasis& basis = backend_.basis();
  const int S = opt_.sobolev_s;
  const Eigen::MatrixXd& W = basis.lambda_gram();
  std::array<Eigen::MatrixXd, 3> Dv;
  for (int d = 0; d < 3; ++d) Dv[d] = Eigen::MatrixXd(basis.differentiate(d));
  const Eigen::MatrixXd& K = basis.hydro_kernel();
  double H = 0.0, D = 0.0;
  for (int m : grid_.retained_modes()) {
    const double w = vol * grid_.parseval_weight(m);
    const double k2 = grid_.k2(m);
    std::vector<double> kp(S + 1);
    kp[0] = 1.0;
    for (int i = 1; i <= S; ++i) kp[i] = kp[i - 1] * k2;
    auto sum_k = [&](int upto) {
      double acc = 0.0;
      for (int i = 0; i <= upto; ++i) acc += kp[i];
      return acc;
    };
    for (const SpecField* g : {&s.f, &s.h}) {
      // velocity derivative levels
      std::vector<std::vector<Eigen::VectorXcd>> lev(S + 1);
      lev[0].push_back(g->row(m).transpose());
      for (int j = 1; j <= S; ++j)
        for (const auto& x : lev[j - 1])
          for (int d = 0; d < 3; ++d) lev[j].push_back(Dv[d].cast<cplx>() * x);
      std::vector<double> plain(S + 1, 0.0), lam(S + 1, 0.0);
      for (int j = 0; j <= S; ++j)
        for (const auto& x : lev[j]) {
          plain[j] += x.squaredNorm();
          lam[j] += (x.adjoint() * W.cast<cplx>() * x)(0, 0).real();
        }
      H += w * sum_k(S) * plain[0];
      // eps^2 |grad_v g|^2 in H^{s-1} (mixed derivatives)
      for (int j = 0; j + 1 <= S; ++j) H += w * e * e * sum_k(S - 1 - j) * plain[j + 1];
      for (int j = 0; j <= S; ++j) D += w * sum_k(S - j) * lam[j];
      Eigen::VectorXcd perp = lev[0][0];
      if (g == &s.f)
        perp -= K.cast<cplx>() * (K.transpose().cast<cplx>() * perp);
      else
        perp(0) = 0.0;
      D += w * sum_k(S) * (perp.adjoint() * W.cast<cplx>() * perp)(0, 0).real() / (e * e);
    }
    const double eb = s.E.row(m).squaredNorm();
    const double bb = s.B.row(m).squaredNorm();
    H += w * sum_k(S) * (bb + e * eb);
    D += w * sum_k(S - 1) * (eb + bb);
    D += w * sum_k(S - 1) * std::norm(s.h(m, 0)) / e;
  }
  r.energy_H = H;
  r.dissipation_D = D;
  return r;
}

RunResult KineticSolver::run(KineticState s, double t_end, double dt, int diag_every, const Observer& observer,
                             int observe_every) const {
  if (!(t_end >= s.t)) throw InvalidArgument("t_end precedes the state time");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (diag_every < 1 || observe_every < 1) throw InvalidArgument("diag_every and observe_every must be >= 1");
  const double span = t_end - s.t;
  const long long nsteps = std::max<long long>(0, std::llround(std::ceil(span / dt - 1e-9)));
  const double h = nsteps > 0 ? span / nsteps : dt;
  const double t0 = s.t;
  RunResult res;
  res.records.push_back(diagnostics(s));
  if (observer) observer(s);
  for (long long i = 1; i <= nsteps; ++i) {
    StepInfo info;
    try {
      s = step(s, h, &info);
    } catch (const CFLViolation& e) {
      throw CFLViolation(std::string(e.what()) + " [at t = " + std::to_string(s.t) + "]");
    } catch (const NonFinite& e) {
      throw NonFinite(std::string(e.what()) + " [at t = " + std::to_string(s.t) + "]");
    }
    s.t = t0 + i * h;
    if (i % diag_every == 0 || i == nsteps) res.records.push_back(diagnostics(s, info.continuity_residual));
    if (observer && i % observe_every == 0) observer(s);
  }
  res.final_state = std::move(s);
  return res;
}

}  // namespace vmb
