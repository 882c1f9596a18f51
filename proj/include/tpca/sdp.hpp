#pragma once

#include <optional>

#include "tpca/calibration.hpp"
#include "tpca/moment_matrix.hpp"
#include "tpca/recovery.hpp"

namespace tpca {

struct SdpOptions {
  double tol = 1e-6;       // residual target (primal: PSD deficit, dual: set gap)
  int max_iter = 50000;    // final polish iteration cap
  int probe_iter = 6000;   // per bisection probe
  int n_cap = 12;          // desk-scale ambient-dimension cap
};

struct SdpSolution {
  MomentMatrix moment;
  double objective = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;  // PSD violation of the affine-feasible iterate
  double dual_residual = 0.0;    // Dykstra gap between the two projections
  bool converged = false;
  double theta_lo = 0.0;  // bisection bracket at exit
  double theta_hi = 0.0;
};

// max pE T(x) over degree-4 pseudo-distributions on the sphere, by bisection
// on the objective level with Dykstra alternating projections per level.
SdpSolution solve_moment_sdp(const DenseTensor& t, const SdpOptions& opts = {});

// Same program with objective T(x) - coeff * <v,x>^3.
SdpSolution solve_moment_sdp_shifted(const DenseTensor& t, const VectorXd& v, double coeff,
                                     const SdpOptions& opts = {});

// pE x / |pE x|; flags the degenerate all-zero first moment case.
RecoveryReport round_sdp(const SdpSolution& sol, const VectorXd& v0 = VectorXd());

// Alg-4.2 style certification through the shifted objective.
CertificateReport certify_sdp(const DenseTensor& t, const VectorXd& v,
                              const Calibration& cal = Calibration::get(),
                              const SdpOptions& opts = {});

struct FeasibilityReport {
  double min_eig = 0.0;
  double symmetry_violation = 0.0;
  double kernel_residual = 0.0;
  double pe1_dev = 0.0;
  bool ok = false;
};

FeasibilityReport verify_moment_feasible(const MomentMatrix& mm, double psd_tol = 1e-6,
                                         double sym_tol = 1e-8, double ker_tol = 1e-6);

}  // namespace tpca
