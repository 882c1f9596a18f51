#include "tpca/sdp.hpp"

#include <cmath>
#include <unordered_map>

#include "tpca/linop.hpp"

namespace tpca {

namespace {

struct AffineProjector {
  std::shared_ptr<const MonomialTable> table;
  int dim = 0;
  int n_classes = 0;
  MatrixXd a;                 // constraints in class coordinates
  VectorXd b_fixed;           // rhs with theta slot at the end
  int theta_row = -1;
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> solver;
  VectorXd inv_mult;          // 1 / class multiplicity

  void set_theta(double theta) { b_fixed[theta_row] = theta; }

  // Euclidean projection onto {maximal symmetry, pE1 = 1, Mw = 0, <C,M> = theta}
  MatrixXd project(const MatrixXd& x) const {
    VectorXd xbar = VectorXd::Zero(n_classes);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c)
        xbar[table->class_of[size_t(r) * dim + c]] += x(r, c);
    for (int i = 0; i < n_classes; ++i) xbar[i] /= table->class_count[size_t(i)];
    VectorXd resid = a * xbar - b_fixed;
    VectorXd mu = solver.solve(resid);
    VectorXd p = xbar - inv_mult.asDiagonal() * (a.transpose() * mu);
    MatrixXd out(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) out(r, c) = p[table->class_of[size_t(r) * dim + c]];
    return out;
  }
};

AffineProjector make_projector(int n, const MatrixXd& c_obj) {
  AffineProjector pr;
  pr.table = MonomialTable::get(n);
  pr.dim = pr.table->dim;
  pr.n_classes = pr.table->n_classes;
  pr.inv_mult.resize(pr.n_classes);
  for (int i = 0; i < pr.n_classes; ++i) pr.inv_mult[i] = 1.0 / pr.table->class_count[size_t(i)];

  int dim = pr.dim;
  VectorXd w = sphere_kernel_vector(n);
  // one kernel row per distinct row-monomial
  std::unordered_map<int32_t, int> row_class_seen;
  std::vector<VectorXd> rows;
  std::vector<double> rhs;
  {
    VectorXd r0 = VectorXd::Zero(pr.n_classes);
    r0[pr.table->class_of[0]] = 1.0;  // entry (0,0): pE 1
    rows.push_back(r0);
    rhs.push_back(1.0);
  }
  for (int alpha = 0; alpha < dim; ++alpha) {
    // row-monomial id: class of the diagonal entry describes alpha's monomial
    int32_t rc = pr.table->class_of[size_t(alpha) * dim + alpha];
    if (row_class_seen.count(rc)) continue;
    row_class_seen[rc] = 1;
    VectorXd row = VectorXd::Zero(pr.n_classes);
    for (int beta = 0; beta < dim; ++beta) {
      if (w[beta] == 0.0) continue;
      row[pr.table->class_of[size_t(alpha) * dim + beta]] += w[beta];
    }
    rows.push_back(row);
    rhs.push_back(0.0);
  }
  {
    VectorXd row = VectorXd::Zero(pr.n_classes);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c)
        if (c_obj(r, c) != 0.0) row[pr.table->class_of[size_t(r) * dim + c]] += c_obj(r, c);
    rows.push_back(row);
    rhs.push_back(0.0);  // theta filled per probe
  }
  pr.theta_row = int(rows.size()) - 1;
  pr.a.resize(int(rows.size()), pr.n_classes);
  pr.b_fixed.resize(int(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    pr.a.row(int(i)) = rows[i];
    pr.b_fixed[int(i)] = rhs[i];
  }
  MatrixXd s = pr.a * pr.inv_mult.asDiagonal() * pr.a.transpose();
  pr.solver.compute(s);
  return pr;
}

MatrixXd project_psd(const MatrixXd& x, double* min_eig = nullptr) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (x + x.transpose()));
  VectorXd vals = es.eigenvalues();
  if (min_eig) *min_eig = vals.minCoeff();
  VectorXd clipped = vals.cwiseMax(0.0);
  return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
}

struct DykstraResult {
  MatrixXd m;         // affine-feasible iterate
  double psd_violation = 0.0;
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
};

DykstraResult run_dykstra(const AffineProjector& pr, const MatrixXd& start, double tol,
                          int max_iter, double scale) {
  DykstraResult res;
  MatrixXd x = pr.project(start);
  MatrixXd p = MatrixXd::Zero(x.rows(), x.cols());
  MatrixXd q = MatrixXd::Zero(x.rows(), x.cols());
  for (int it = 0; it < max_iter; ++it) {
    double min_eig = 0.0;
    MatrixXd y = project_psd(x + p, &min_eig);
    p = x + p - y;
    MatrixXd xn = pr.project(y + q);
    q = y + q - xn;
    double gap = (xn - y).norm();
    x = xn;
    res.iterations = it + 1;
    if (it % 10 == 9 || gap <= tol * scale) {
      double viol = 0.0;
      project_psd(x, &viol);
      res.psd_violation = std::max(0.0, -viol);
      res.gap = gap;
      if (res.psd_violation <= tol * scale && gap <= tol * scale) {
        res.converged = true;
        break;
      }
    }
  }
  res.m = x;
  return res;
}

SdpSolution solve_with_objective(int n, const MatrixXd& c_obj, const DenseTensor& t_for_lo,
                                 double shift_coeff, const VectorXd& shift_v,
                                 const SdpOptions& opts) {
  if (n > opts.n_cap)
    throw std::invalid_argument("solve_moment_sdp: n exceeds the desk-scale cap");
  AffineProjector pr = make_projector(n, c_obj);
  double obj_norm = c_obj.norm();
  double scale = std::max(1.0, obj_norm);

  // provable bracket: theta* in [best point evaluation, ||objective||_F]
  auto point_value = [&](const VectorXd& v) {
    double val = eval_poly(t_for_lo, v);
    if (shift_coeff != 0.0) val -= shift_coeff * std::pow(shift_v.dot(v), 3);
    return val;
  };
  double lo = 0.0;
  {
    Rng rng(12345, 0x736470ull);
    for (int i = 0; i < n; ++i) {
      VectorXd e = VectorXd::Zero(n);
      e[i] = 1.0;
      lo = std::max(lo, std::max(point_value(e), point_value(-e)));
    }
    for (int s = 0; s < 6; ++s) {
      VectorXd v = rng.unit_sphere(n);
      lo = std::max(lo, std::max(point_value(v), point_value(-v)));
    }
  }
  // pE T(x) <= ||T||_F for pseudo-distributions on the sphere
  double hi = 0.0;
  {
    double frob2 = 0.0;
    for (int r = 0; r < pr.dim; ++r)
      for (int c = 0; c < pr.dim; ++c) frob2 += c_obj(r, c) * c_obj(r, c);
    hi = 2.0 * std::sqrt(frob2);  // C splits T across two off-diagonal blocks
    hi = std::max(hi, lo + 1e-12);
  }

  SdpSolution sol;
  MatrixXd warm = uniform_moments(n).m;
  double width0 = hi - lo;
  int total_iters = 0;
  DykstraResult best;
  best.converged = false;
  for (int step = 0; step < 48 && (hi - lo) > std::max(1e-7, 1e-4 * std::max(1.0, width0)); ++step) {
    double mid = 0.5 * (lo + hi);
    pr.set_theta(mid);
    DykstraResult r = run_dykstra(pr, warm, opts.tol, opts.probe_iter, scale);
    total_iters += r.iterations;
    if (r.converged) {
      lo = mid;
      warm = r.m;
      best = r;
    } else {
      hi = mid;
    }
  }
  // final polish at the feasible end of the bracket
  pr.set_theta(lo);
  DykstraResult fin = run_dykstra(pr, warm, opts.tol, opts.max_iter, scale);
  total_iters += fin.iterations;
  if (!fin.converged && best.converged) fin = best;

  sol.moment = MomentMatrix(n);
  sol.moment.m = fin.m;
  sol.objective = (fin.m.cwiseProduct(c_obj)).sum();
  sol.iterations = total_iters;
  sol.primal_residual = fin.psd_violation;
  sol.dual_residual = fin.gap;
  sol.converged = fin.converged;
  sol.theta_lo = lo;
  sol.theta_hi = hi;
  return sol;
}

MatrixXd objective_matrix(const DenseTensor& t, const VectorXd& v, double coeff) {
  int n = t.dim;
  MomentMatrix probe(n);
  MatrixXd c = MatrixXd::Zero(probe.dim, probe.dim);
  std::vector<int> idx(3);
  for (int64_t f = 0; f < t.size(); ++f) {
    t.multi_index(f, idx);
    double val = t.entries[size_t(f)];
    if (coeff != 0.0) val -= coeff * v[idx[0]] * v[idx[1]] * v[idx[2]];
    if (val == 0.0) continue;
    c(probe.idx_var(idx[0]), probe.idx_pair(idx[1], idx[2])) += 0.5 * val;
    c(probe.idx_pair(idx[1], idx[2]), probe.idx_var(idx[0])) += 0.5 * val;
  }
  return c;
}

}  // namespace

SdpSolution solve_moment_sdp(const DenseTensor& t, const SdpOptions& opts) {
  if (t.order != 3) throw std::invalid_argument("solve_moment_sdp: order-3 objective required");
  return solve_with_objective(t.dim, objective_matrix(t, VectorXd(), 0.0), t, 0.0, VectorXd(), opts);
}

SdpSolution solve_moment_sdp_shifted(const DenseTensor& t, const VectorXd& v, double coeff,
                                     const SdpOptions& opts) {
  if (t.order != 3) throw std::invalid_argument("solve_moment_sdp_shifted: order-3 objective required");
  return solve_with_objective(t.dim, objective_matrix(t, v, coeff), t, coeff, v, opts);
}

RecoveryReport round_sdp(const SdpSolution& sol, const VectorXd& v0) {
  RecoveryReport rep;
  rep.algorithm = "sdp";
  rep.converged = sol.converged;
  rep.iterations = sol.iterations;
  int n = sol.moment.n;
  VectorXd first(n);
  for (int i = 0; i < n; ++i) first[i] = sol.moment.pe_x(i);
  if (first.norm() <= 1e-6) {
    rep.degenerate = true;
    rep.v = VectorXd::Zero(n);
    return rep;
  }
  rep.v = first.normalized();
  if (v0.size() == n) {
    rep.correlation = rep.v.dot(v0);
    rep.corr_sq = rep.correlation * rep.correlation;
  }
  return rep;
}

CertificateReport certify_sdp(const DenseTensor& t, const VectorXd& v, const Calibration& cal,
                              const SdpOptions& opts) {
  if (std::abs(v.norm() - 1.0) > 1e-8) throw std::invalid_argument("certify_sdp: v must be unit");
  CertificateReport rep;
  rep.tau_hat = eval_poly(t, v);
  auto sol = solve_moment_sdp_shifted(t, v, rep.tau_hat, opts);
  rep.lambda_cert = std::max(sol.objective, 0.0);
  rep.threshold = cal.sdp_threshold(t.dim);
  rep.threshold_constant =
      rep.threshold / (std::pow(double(t.dim), 0.75) * std::pow(std::log(double(t.dim)), 0.25));
  rep.converged = sol.converged;
  rep.certify = sol.converged && rep.lambda_cert <= rep.threshold;
  // the bracket's upper end is the level the bisection could not certify
  // feasible; use it as the conservative bound on max T(x) - tau <v,x>^3
  rep.bound = sol.theta_hi;
  return rep;
}

FeasibilityReport verify_moment_feasible(const MomentMatrix& mm, double psd_tol, double sym_tol,
                                         double ker_tol) {
  FeasibilityReport rep;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(mm.m, Eigen::EigenvaluesOnly);
  rep.min_eig = es.eigenvalues().minCoeff();
  rep.symmetry_violation = max_symmetry_violation(mm.m, *MonomialTable::get(mm.n));
  rep.kernel_residual = (mm.m * sphere_kernel_vector(mm.n)).norm();
  rep.pe1_dev = std::abs(mm.pe1() - 1.0);
  rep.ok = rep.min_eig >= -psd_tol && rep.symmetry_violation <= sym_tol &&
           rep.kernel_residual <= ker_tol && rep.pe1_dev <= 1e-8;
  return rep;
}

}  // namespace tpca
