#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "tpca/rng.hpp"
#include "tpca/tensor.hpp"

namespace tpca {

// Matrix-free symmetric-or-not linear operator with a matvec contract.
struct LinearOperator {
  int64_t dim = 0;
  bool symmetric = false;
  double matvec_cost_hint = 0.0;  // flops per apply
  std::function<void(const VectorXd&, VectorXd&)> apply_fn;
  std::function<void(const VectorXd&, VectorXd&)> adjoint_fn;  // unset if symmetric
  std::shared_ptr<int64_t> matvecs = std::make_shared<int64_t>(0);

  VectorXd apply(const VectorXd& x) const;
  VectorXd apply_adjoint(const VectorXd& x) const;
  int64_t matvec_count() const { return *matvecs; }
  void reset_count() { *matvecs = 0; }
};

// Gram operator of the tall unfolding: v -> F^T (F v), where F has rows
// indexed by the first ceil(k/2) modes. For odd k the operator dimension is
// n^{(k-1)/2} and its eigenvalues concentrate around n^{(k+1)/2}.
LinearOperator op_gram(const DenseTensor& t);

// v -> vec(sum_i T_i V T_i^T), optionally minus the n*ww^T expectation term.
// Order-3 tensors only; dimension n^2; not symmetric for generic tensors.
LinearOperator op_titi(const DenseTensor& t, bool subtract_expectation);
LinearOperator op_titi(std::shared_ptr<const DenseTensor> t, bool subtract_expectation);

// Symmetric PSD wrapper x -> A^T(A x); shares the matvec counter with `op`.
LinearOperator gram_of(const LinearOperator& op);

// Dense operator wrapper (tests and small-n paths).
LinearOperator op_dense(const MatrixXd& m);

MatrixXd materialize(const LinearOperator& op);

struct EigReport {
  double value = 0.0;
  VectorXd vector;
  int iterations = 0;
  int64_t matvecs = 0;
  double residual = 0.0;
  bool converged = false;
  bool exceeded = false;  // early exit: Rayleigh passed exceed_threshold
  int restarts = 0;
  uint64_t seed = 0;
  uint64_t stream = 0;
};

struct PowerOptions {
  double tol = 1e-8;
  int max_iter = 0;  // 0: 10*ceil(log2 dim)
  int restarts = 3;
  uint64_t seed = 1;
  uint64_t stream = 0;
  // If > 0, stop as soon as the Rayleigh quotient of the unshifted operator
  // exceeds this value (certification fast path).
  double exceed_threshold = 0.0;
};

// Power iteration on (op - shift*Id) for symmetric op; returns the eigenpair
// of op with value re-shifted. Finds the eigenvalue maximizing |lambda-shift|.
EigReport top_singular_shifted(const LinearOperator& op, double shift, const PowerOptions& opts);

struct SingularReport {
  double sigma = 0.0;
  VectorXd right;
  int iterations = 0;
  int64_t matvecs = 0;
  double residual = 0.0;
  bool converged = false;
  bool exceeded = false;
};

// Top singular value/right-vector of a (generally non-symmetric) operator via
// power iteration on op^T op.
SingularReport top_singular_value(const LinearOperator& op, const PowerOptions& opts);

struct DenseSpectrum {
  VectorXd values;   // descending
  MatrixXd vectors;  // columns, deterministic sign convention
};

// Full symmetric eigendecomposition for validation; dim capped.
DenseSpectrum dense_eig_oracle(const MatrixXd& m);

int64_t dense_eig_cap();
void set_dense_eig_cap(int64_t dim);

}  // namespace tpca
