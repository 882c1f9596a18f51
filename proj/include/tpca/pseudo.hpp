#pragma once

#include <optional>
#include <string>

#include "tpca/calibration.hpp"
#include "tpca/moment_matrix.hpp"

namespace tpca {

struct precondition_error : std::runtime_error {
  std::string condition;
  precondition_error(std::string cond, const std::string& what)
      : std::runtime_error(what), condition(std::move(cond)) {}
};

enum class Provenance { uniform, lb_deg3, lb_deg4, sdp, custom };
std::string to_string(Provenance p);

struct SphereCorrectionReport {
  double c = 1.0;                  // pE0 |x|^4
  double delta1 = 0.0;             // max_i |Delta x_i| / c
  double delta2 = 0.0;             // max_{i!=j} |Delta x_i x_j| / c
  double delta2p = 0.0;            // max_i |Delta x_i^2| / c
  double lambda0 = 0.0;            // measured min(0, lambda_min of the input)
  double coeff1 = 0.0;             // recorded constants of the bound
  double coeff2 = 0.0;
  double coeff2p = 0.0;
  double lambda_min_bound = 0.0;   // certified lower bound on lambda_min(L)
};

struct PseudoExpectation {
  MomentMatrix mm;
  Provenance provenance = Provenance::custom;
  bool on_sphere = false;
  double lambda = 0.0;        // construction parameter (lb builds)
  double epsilon_mix = 0.0;   // uniform mixing weight applied
  double value = 0.0;         // final pE A(x) for the built objective
  double value_pe0 = 0.0;     // pE0 A(x) before correction/mixing
  SphereCorrectionReport correction;
};

// Uniform pseudo-expectation (exact sphere moments).
PseudoExpectation uniform_pe(int n);

// Symmetric Schur complement: the least t >= 0 with
// t * sum_{pi in S4} pi.(C B^{-1} C^T) >= C B^{-1} C^T in the Example-6.12
// normalization D(t) = t * 3 * sym_project(S). Returns (t, D).
// B: (1+n)x(1+n) top-left block, C: n^2 x (1+n).
std::pair<double, MatrixXd> schur_extend(const MatrixXd& b, const MatrixXd& c);

// Lemma-6.16 map: rescale degree 3-4 by 1/c, route degree 1-2 through
// pE p(x)|x|^2 / c, so |x|^2 - 1 lands in the kernel.
std::pair<MomentMatrix, SphereCorrectionReport> sphere_correct(const MomentMatrix& pe0);

// min_{p <= deg 2, p perp (|x|^2-1)} L p^2 / E_mu p^2.
double lambda_min_functional(const MomentMatrix& l);

// pE := (L + eps E_mu) / (1 + eps); eps must cover -lambda_min(L).
PseudoExpectation mix_uniform(const MomentMatrix& l1, double epsilon,
                              std::optional<double> known_lambda_min = std::nullopt);

struct VerifyTolerances {
  double pe1 = 1e-10;
  double psd = 1e-8;
  double symmetry = 1e-8;
  double sphere = 1e-8;
  double ineq = 1e-7;
  int a5_samples = 4;
  int a7_samples = 3;
  uint64_t seed = 2024;
};

struct VerifyReport {
  bool pe1_ok = false;
  bool psd_ok = false;
  bool symmetry_ok = false;
  bool sphere_ok = false;  // true when not flagged on-sphere
  bool a5_ok = false;
  bool a6_ok = false;
  bool a7_ok = false;
  double pe1 = 0.0;
  double min_eig = 0.0;  // estimate or -psd_tol bound style
  double symmetry_violation = 0.0;
  double sphere_residual = 0.0;
  std::string failure;  // first failed check, empty if clean

  bool pass() const { return pe1_ok && psd_ok && symmetry_ok && sphere_ok && a5_ok && a6_ok && a7_ok; }
};

VerifyReport verify_pe(const PseudoExpectation& pe, const VerifyTolerances& tol = {});

// --- internals shared with the lower-bound builder and tests ---

// (1/8) sum_{pi in S4} pi . (F F^T) for an n^2 x n flattening F, materialized.
MatrixXd sym3_of_gram(const MatrixXd& f);
// Same S4 symmetrization for an explicit n^2 x n^2 matrix: 3 * sym_project.
MatrixXd sym3(const MatrixXd& x);

// M_mu^{-1/2} on the symmetric subspace orthogonal to |x|^2-1 (closed form).
VectorXd apply_uniform_inv_sqrt(const VectorXd& z, int n);

// PSD check with shift: true iff m + tol*I admits a Cholesky factorization.
bool psd_with_shift(const MatrixXd& m, double tol);

}  // namespace tpca
