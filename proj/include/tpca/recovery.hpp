#pragma once

#include <optional>
#include <string>

#include "tpca/calibration.hpp"
#include "tpca/instance.hpp"
#include "tpca/linop.hpp"

namespace tpca {

struct RecoveryReport {
  VectorXd v;
  double correlation = 0.0;  // <v, v0>, sign-fixed where the model allows
  double corr_sq = 0.0;      // <v, v0>^2
  int64_t matvecs = 0;
  double time_ms = 0.0;
  std::string algorithm;
  uint64_t seed = 0;
  uint64_t stream = 0;
  bool converged = false;
  int iterations = 0;
  bool degenerate = false;
};

struct RecoveryOptions {
  PowerOptions power;
};

// Alg: top singular vector of sum_i T_i (x) T_i - E sum_i A_i (x) A_i,
// folded n x n, then its top singular vector.
RecoveryReport recover_titi(const SpikedInstance& inst, const RecoveryOptions& opts = {});

// Alg: top eigenvector of the unfolding Gram matrix, shifted power iteration.
// Odd k: shift n^{(k+1)/2} and recursive folding; even k: square unfolding.
RecoveryReport recover_unfold(const SpikedInstance& inst, const RecoveryOptions& opts = {});

// Alg: random partition + rotation, three projected Gram operators, shift
// n^2/9; for symmetric noise.
RecoveryReport recover_symmetric(const SpikedInstance& inst, uint64_t seed,
                                 const RecoveryOptions& opts = {});

struct CertificateReport {
  double lambda_cert = 0.0;  // top singular value of the residual certificate
  double tau_hat = 0.0;
  bool certify = false;
  double threshold = 0.0;
  double threshold_constant = 0.0;  // threshold / (n^{3/2} log(n)^{1/2})
  double bound = 0.0;               // certified: T(x) <= tau_hat <v,x>^3 + bound
  int64_t matvecs = 0;
  double time_ms = 0.0;
  bool converged = false;
};

CertificateReport certify_titi(const DenseTensor& t, const VectorXd& v, const Calibration& cal,
                               const RecoveryOptions& opts = {});

// Spot-check of the certified inequality at sampled unit points and at x0.
bool check_certificate(const DenseTensor& t, const CertificateReport& rep, const VectorXd& v,
                       const VectorXd& x0, int num_points, uint64_t seed);

struct SemiRandomAdversary {
  MatrixXd q;
  std::string mode;        // "whitening" or "custom"
  double q_dev_norm = 0.0; // ||Q - Id||
};

// Q = n * (T^T T)^{-1/2}; makes the unfolding Gram exactly n^2 * Id.
SemiRandomAdversary whitening_adversary(const SpikedInstance& inst);
SemiRandomAdversary custom_adversary(const MatrixXd& q);

// Instance whose n^2 x n flattening is T * Q.
SpikedInstance apply_semirandom(const SpikedInstance& inst, const SemiRandomAdversary& adv);

}  // namespace tpca
