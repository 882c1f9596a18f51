#include "tpca/pseudo.hpp"

#include <cmath>

#include "tpca/linop.hpp"
#include "tpca/rng.hpp"

namespace tpca {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::uniform: return "uniform";
    case Provenance::lb_deg3: return "lb_deg3";
    case Provenance::lb_deg4: return "lb_deg4";
    case Provenance::sdp: return "sdp";
    case Provenance::custom: return "custom";
  }
  return "unknown";
}

PseudoExpectation uniform_pe(int n) {
  PseudoExpectation pe;
  pe.mm = uniform_moments(n);
  pe.provenance = Provenance::uniform;
  pe.on_sphere = true;
  return pe;
}

MatrixXd sym3(const MatrixXd& x) { return 3.0 * sym_project(x); }

MatrixXd sym3_of_gram(const MatrixXd& f) {
  MatrixXd g = f * f.transpose();
  return sym3(g);
}

bool psd_with_shift(const MatrixXd& m, double tol) {
  MatrixXd shifted = m + tol * MatrixXd::Identity(m.rows(), m.cols());
  Eigen::LLT<MatrixXd> llt(shifted);
  return llt.info() == Eigen::Success;
}

std::pair<double, MatrixXd> schur_extend(const MatrixXd& b, const MatrixXd& c) {
  if (b.rows() != b.cols()) throw std::invalid_argument("schur_extend: B must be square");
  if (c.cols() != b.rows()) throw std::invalid_argument("schur_extend: C/B shape mismatch");
  int n2 = int(c.rows());
  int n = int(std::lround(std::sqrt(double(n2))));
  if (int64_t(n) * n != n2) throw std::invalid_argument("schur_extend: C must have n^2 rows");

  Eigen::LLT<MatrixXd> llt(b);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("schur_extend: B is not positive definite");
  MatrixXd s = c * llt.solve(c.transpose());
  double s_scale = s.cwiseAbs().maxCoeff();
  if (s_scale == 0.0) return {0.0, MatrixXd::Zero(n2, n2)};

  MatrixXd g = sym3(s);
  auto feasible = [&](double t) {
    MatrixXd x = t * g - s;
    double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (x + x.transpose()),
                                               Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -1e-10 * scale;
  };

  double hi = 1.0;
  while (!feasible(hi)) {
    hi *= 2.0;
    if (hi > 1e6)
      throw std::runtime_error("schur_extend: bisection bracket failure (t > 1e6)");
  }
  double lo = 0.0;
  while (hi - lo > 1e-9 * std::max(1.0, hi)) {
    double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      hi = mid;
    else
      lo = mid;
  }
  return {hi, hi * g};
}

VectorXd apply_uniform_inv_sqrt(const VectorXd& z, int n) {
  int dim = 1 + n + n * n;
  if (int(z.size()) != dim) throw std::invalid_argument("apply_uniform_inv_sqrt: bad size");
  VectorXd out = VectorXd::Zero(dim);
  double z0 = z[0];
  // symmetrize the pair block
  MatrixXd q(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) q(i, j) = z[1 + n + i * n + j];
  q = 0.5 * (q + q.transpose()).eval();
  // remove the |x|^2 - 1 direction (coefficient vector w)
  double wdot = -z0 + q.trace();
  double wnorm2 = 1.0 + double(n);
  z0 += wdot / wnorm2;
  for (int i = 0; i < n; ++i) q(i, i) -= wdot / wnorm2;
  double s = q.trace();  // equals z0 after the removal

  // linear block: eigenvalue 1/n
  for (int i = 0; i < n; ++i) out[1 + i] = std::sqrt(double(n)) * z[1 + i];
  // traceless symmetric pair block: eigenvalue 2/(n^2+2n)
  MatrixXd q0 = q - (s / double(n)) * MatrixXd::Identity(n, n);
  double pair_f = std::sqrt((double(n) * n + 2.0 * n) / 2.0);
  // (const, trace) plane: rank-one with eigenvalue 1 + 1/n
  double plane_f = 1.0 / std::sqrt(1.0 + 1.0 / double(n));
  out[0] = plane_f * z0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = pair_f * q0(i, j);
      if (i == j) v += plane_f * z0 / double(n);
      out[1 + n + i * n + j] = v;
    }
  return out;
}

namespace {

// dense basis of {symmetric coefficient vectors} ∩ {p perp (|x|^2-1)}
MatrixXd subspace_basis(int n) {
  int dim = 1 + n + n * n;
  int cols = n + n * (n + 1) / 2 + n;  // lin + sym pairs (i<j) + (diag-traceless, plane)
  MatrixXd b = MatrixXd::Zero(dim, cols);
  int c = 0;
  for (int i = 0; i < n; ++i) b(1 + i, c++) = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      b(1 + n + i * n + j, c) = 0.5;
      b(1 + n + j * n + i, c) = 0.5;
      ++c;
    }
  for (int i = 0; i + 1 < n; ++i) {
    b(1 + n + i * n + i, c) = 1.0;
    b(1 + n + (i + 1) * n + (i + 1), c) = -1.0;
    ++c;
  }
  b(0, c) = 1.0;
  for (int i = 0; i < n; ++i) b(1 + n + i * n + i, c) = 1.0 / double(n);
  ++c;
  return b;
}

double lambda_min_dense(const MomentMatrix& l) {
  MatrixXd b = subspace_basis(l.n);
  MatrixXd gl = b.transpose() * l.m * b;
  MatrixXd gmu = b.transpose() * uniform_moments(l.n).m * b;
  gl = 0.5 * (gl + gl.transpose()).eval();
  gmu = 0.5 * (gmu + gmu.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(gl, gmu, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  return es.eigenvalues().minCoeff();
}

// orthogonal projection onto {symmetric pair block} ∩ {perp to |x|^2-1}
VectorXd project_subspace(const VectorXd& z, int n) {
  VectorXd out = z;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      int a = 1 + n + i * n + j, b = 1 + n + j * n + i;
      double avg = 0.5 * (out[a] + out[b]);
      out[a] = avg;
      out[b] = avg;
    }
  double tr = 0;
  for (int i = 0; i < n; ++i) tr += out[1 + n + i * n + i];
  double wdot = (-out[0] + tr) / (1.0 + double(n));
  out[0] += wdot;
  for (int i = 0; i < n; ++i) out[1 + n + i * n + i] -= wdot;
  return out;
}

double lambda_min_power(const MomentMatrix& l) {
  int n = l.n;
  int dim = l.dim;
  auto w_op = [&](const VectorXd& z) {
    VectorXd jz = apply_uniform_inv_sqrt(z, n);
    VectorXd mid = l.m * jz;
    return apply_uniform_inv_sqrt(mid, n);
  };
  Rng rng(77, 0x6c6d696eull);
  VectorXd z = project_subspace(rng.gaussian_vector(dim), n);
  z.normalize();
  double top = 0;
  for (int it = 0; it < 100; ++it) {
    VectorXd y = w_op(z);
    top = std::max(top, std::abs(z.dot(y)));
    double nrm = y.norm();
    if (nrm < 1e-300) break;
    z = y / nrm;
  }
  double c = top * 1.1 + 1e-8;
  // power iteration on c*I - W restricted to the subspace
  VectorXd v = project_subspace(rng.gaussian_vector(dim), n);
  v.normalize();
  double theta = 0;
  for (int it = 0; it < 1000; ++it) {
    VectorXd y = project_subspace(c * v - w_op(v), n);
    double th = v.dot(y);
    double resid = (y - th * v).norm();
    theta = th;
    double nrm = y.norm();
    if (nrm < 1e-300) break;
    v = y / nrm;
    if (it > 20 && resid <= 1e-10 * std::max(std::abs(th), 1.0)) break;
  }
  return c - theta;
}

}  // namespace

double lambda_min_functional(const MomentMatrix& l) {
  if (l.n < 2) throw std::invalid_argument("lambda_min_functional: n >= 2 required");
  if (l.dim <= 1200) return lambda_min_dense(l);
  return lambda_min_power(l);
}

std::pair<MomentMatrix, SphereCorrectionReport> sphere_correct(const MomentMatrix& pe0) {
  int n = pe0.n;
  double c = pe0.pe_norm4();
  if (c < 1.0 - 1e-9) throw std::invalid_argument("sphere_correct: pE0 |x|^4 must be >= 1");

  MomentMatrix l1(n);
  l1.m(0, 0) = 1.0;
  // degree 1: pE0 x_i |x|^2 / c
  for (int i = 0; i < n; ++i) {
    double v = 0;
    for (int k = 0; k < n; ++k) v += pe0.pe_xxx(i, k, k);
    v /= c;
    l1.m(0, l1.idx_var(i)) = v;
    l1.m(l1.idx_var(i), 0) = v;
  }
  // degree 2: pE0 x_i x_j |x|^2 / c
  MatrixXd deg2(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = 0;
      for (int k = 0; k < n; ++k) v += pe0.pe_xxxx(i, j, k, k);
      v /= c;
      deg2(i, j) = v;
      deg2(j, i) = v;
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      l1.m(l1.idx_var(i), l1.idx_var(j)) = deg2(i, j);
      l1.m(0, l1.idx_pair(i, j)) = deg2(i, j);
      l1.m(l1.idx_pair(i, j), 0) = deg2(i, j);
    }
  // degree 3 and 4: scaled by 1/c
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = pe0.pe_xxx(i, j, k) / c;
        l1.m(l1.idx_var(i), l1.idx_pair(j, k)) = v;
        l1.m(l1.idx_pair(j, k), l1.idx_var(i)) = v;
      }
  l1.m.block(1 + n, 1 + n, n * n, n * n) = pe0.m.block(1 + n, 1 + n, n * n, n * n) / c;

  SphereCorrectionReport rep;
  rep.c = c;
  for (int i = 0; i < n; ++i)
    rep.delta1 = std::max(rep.delta1,
                          std::abs(c * l1.m(0, l1.idx_var(i)) - pe0.pe_x(i)) / c);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double dev = std::abs(c * deg2(i, j) - pe0.pe_xx(i, j)) / c;
      if (i == j)
        rep.delta2p = std::max(rep.delta2p, dev);
      else
        rep.delta2 = std::max(rep.delta2, dev);
    }
  rep.lambda0 = std::min(0.0, lambda_min_functional(pe0));
  double nn = double(n);
  rep.coeff1 = 2.0 * nn;
  rep.coeff2 = nn * nn + 2.0 * nn * std::sqrt(nn * nn + 2.0 * nn);
  rep.coeff2p = nn + 2.0 * std::sqrt(nn * nn * nn + 2.0 * nn * nn);
  rep.lambda_min_bound = rep.lambda0 / c - (c - 1.0) / c - rep.coeff1 * rep.delta1 -
                         rep.coeff2 * rep.delta2 - rep.coeff2p * rep.delta2p;
  return {std::move(l1), rep};
}

PseudoExpectation mix_uniform(const MomentMatrix& l1, double epsilon,
                              std::optional<double> known_lambda_min) {
  if (epsilon < 0) throw std::invalid_argument("mix_uniform: epsilon >= 0 required");
  double lmin = known_lambda_min ? *known_lambda_min : lambda_min_functional(l1);
  if (epsilon < -lmin - 1e-12)
    throw std::invalid_argument("mix_uniform: epsilon below -lambda_min, result would not be PSD");
  PseudoExpectation pe;
  pe.mm = MomentMatrix(l1.n);
  pe.mm.m = (l1.m + epsilon * uniform_moments(l1.n).m) / (1.0 + epsilon);
  pe.on_sphere = true;
  pe.epsilon_mix = epsilon;
  pe.provenance = Provenance::custom;
  return pe;
}

VerifyReport verify_pe(const PseudoExpectation& pe, const VerifyTolerances& tol) {
  const MomentMatrix& mm = pe.mm;
  int n = mm.n;
  VerifyReport rep;
  auto fail = [&](const std::string& name) {
    if (rep.failure.empty()) rep.failure = name;
  };

  rep.pe1 = mm.pe1();
  rep.pe1_ok = std::abs(rep.pe1 - 1.0) <= tol.pe1;
  if (!rep.pe1_ok) fail("pe1");

  rep.psd_ok = psd_with_shift(mm.m, tol.psd);
  if (rep.psd_ok) {
    rep.min_eig = -tol.psd;  // certified lower bound via the shifted Cholesky
    if (mm.dim <= dense_eig_cap()) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(mm.m, Eigen::EigenvaluesOnly);
      rep.min_eig = es.eigenvalues().minCoeff();
    }
  } else {
    fail("psd");
  }

  auto table = MonomialTable::get(n);
  rep.symmetry_violation = max_symmetry_violation(mm.m, *table);
  rep.symmetry_ok = rep.symmetry_violation <= tol.symmetry;
  if (!rep.symmetry_ok) fail("symmetry");

  if (pe.on_sphere) {
    rep.sphere_residual = (mm.m * sphere_kernel_vector(n)).norm();
    rep.sphere_ok = rep.sphere_residual <= tol.sphere;
  } else {
    rep.sphere_ok = true;
  }
  if (!rep.sphere_ok) fail("sphere");

  // Appendix-A inequalities on this pE
  Rng rng(tol.seed, 0x61707041ull);
  double pe_norm2 = 0;
  for (int i = 0; i < n; ++i) pe_norm2 += mm.pe_xx(i, i);
  VectorXd pex(n);
  for (int i = 0; i < n; ++i) pex[i] = mm.pe_x(i);

  rep.a5_ok = true;
  for (int s = 0; s < tol.a5_samples + 1; ++s) {
    VectorXd y = s == 0 && pex.norm() > 1e-12 ? VectorXd(pex.normalized()) : rng.unit_sphere(n);
    double lhs = y.dot(pex);
    double rhs = std::sqrt(std::max(0.0, pe_norm2));
    if (lhs > rhs + tol.ineq) rep.a5_ok = false;
  }
  if (!rep.a5_ok) fail("a5");

  rep.a6_ok = true;
  {
    std::vector<VectorXd> candidates;
    if (pex.norm() > 1e-9) candidates.push_back(pex.normalized());
    for (int s = 0; s < 2; ++s) candidates.push_back(rng.unit_sphere(n));
    for (const VectorXd& v : candidates) {
      double d3 = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) d3 += v[i] * v[j] * v[k] * mm.pe_xxx(i, j, k);
      double d1 = v.dot(pex);
      for (double eps : {0.01, 0.1}) {
        if (d3 >= 1.0 - eps && d1 < 1.0 - 2.0 * eps - tol.ineq) rep.a6_ok = false;
      }
    }
  }
  if (!rep.a6_ok) fail("a6");

  rep.a7_ok = true;
  for (int s = 0; s < tol.a7_samples; ++s) {
    MatrixXd m = rng.gaussian_matrix(n * n, n);
    double lhs = 0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) lhs += m(j * n + k, i) * mm.pe_xxx(j, k, i);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m.transpose() * m, Eigen::EigenvaluesOnly);
    double opnorm = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
    double rhs = opnorm * std::pow(std::max(0.0, mm.pe_norm4()), 0.75);
    if (lhs > rhs + tol.ineq * std::max(1.0, rhs)) rep.a7_ok = false;
  }
  if (!rep.a7_ok) fail("a7");

  return rep;
}

}  // namespace tpca
