#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "tpca/tensor.hpp"

namespace tpca {

// Moment matrix over monomials of degree <= 2: basis index 0 is the constant,
// 1..n the variables, n+1..n+n^2 the ordered pairs (i,j), row-major.
struct MomentMatrix {
  int n = 0;
  int dim = 0;  // 1 + n + n^2
  MatrixXd m;

  MomentMatrix() = default;
  explicit MomentMatrix(int n_) : n(n_), dim(1 + n_ + n_ * n_), m(MatrixXd::Zero(dim, dim)) {}

  int idx_const() const { return 0; }
  int idx_var(int i) const { return 1 + i; }
  int idx_pair(int i, int j) const { return 1 + n + i * n + j; }

  double pe1() const { return m(0, 0); }
  double pe_x(int i) const { return m(0, idx_var(i)); }
  double pe_xx(int i, int j) const { return m(idx_var(i), idx_var(j)); }
  double pe_xxx(int i, int j, int k) const { return m(idx_var(i), idx_pair(j, k)); }
  double pe_xxxx(int i, int j, int k, int l) const { return m(idx_pair(i, j), idx_pair(k, l)); }

  // pE of a degree-<=k polynomial given as a dense order-3 tensor (cubic part)
  double pe_cubic(const DenseTensor& t) const;
  double pe_norm4() const;  // pE |x|^4

  MatrixXd deg4_block() const { return m.block(1 + n, 1 + n, n * n, n * n); }
};

// Coefficient vector of |x|^2 - 1 in the tuples(2) basis.
VectorXd sphere_kernel_vector(int n);

// Exact moments of the uniform distribution on the unit sphere, degree <= 4.
MomentMatrix uniform_moments(int n);

// Entry classes by represented monomial, used for the maximal-symmetry
// projection and checks. Cached per n.
struct MonomialTable {
  int n = 0;
  int dim = 0;
  int n_classes = 0;
  std::vector<int32_t> class_of;     // dim*dim, row-major
  std::vector<double> class_count;   // entries per class

  static std::shared_ptr<const MonomialTable> get(int n);
};

// Average each entry class of a tuples(2) matrix (Euclidean projection onto
// the maximally-symmetric subspace). Returns the projected matrix.
MatrixXd project_maximal_symmetry(const MatrixXd& m, const MonomialTable& table);

// Largest deviation of any entry from its class mean.
double max_symmetry_violation(const MatrixXd& m, const MonomialTable& table);

// --- S4 action on n^2 x n^2 matrices viewed as 4-tensors ---

// sigma = (234): (sigma.M)[(a,b),(c,d)] = M[(a,d),(b,c)]
MatrixXd apply_sigma(const MatrixXd& m);
// sigma^2 = (243): (sigma^2.M)[(a,b),(c,d)] = M[(a,c),(d,b)]
MatrixXd apply_sigma2(const MatrixXd& m);
// Conjugation by the row/column pair symmetrizer Pi.
MatrixXd pi_conjugate(const MatrixXd& m);
// General permutation of the 4 tensor modes.
MatrixXd apply_perm4(const MatrixXd& m, const Perm& pi);

// Average over all 24 permutations, via the D8 x C3 factorization:
// (1/24) sum_{pi in S4} pi . M.
MatrixXd sym_project(const MatrixXd& m);

// Id + sigma.Id + sigma^2.Id = Id + ww^T + P (three representations of |x|^4).
MatrixXd id_sym_sum(int n);

}  // namespace tpca
