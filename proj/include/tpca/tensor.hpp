#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tpca {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatrixMap = Eigen::Map<const RowMajorMatrix>;

struct capacity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Default cap on dense tensor size (number of f64 entries).
int64_t tensor_capacity();
void set_tensor_capacity(int64_t entries);

// n^k with overflow/capacity checking.
int64_t checked_pow(int order, int dim);

// Dense order-k tensor over R^n, row-major by multi-index.
struct DenseTensor {
  int order = 0;
  int dim = 0;
  std::vector<double> entries;

  DenseTensor() = default;
  DenseTensor(int k, int n);  // zeros

  int64_t size() const { return int64_t(entries.size()); }

  int64_t flat_index(std::span<const int> idx) const;
  void multi_index(int64_t flat, std::span<int> idx) const;

  double at(std::span<const int> idx) const { return entries[flat_index(idx)]; }
  double& at(std::span<const int> idx) { return entries[flat_index(idx)]; }

  // Contiguous matrix view with rows indexed by the first `row_modes` modes.
  ConstMatrixMap as_matrix(int row_modes) const;
};

// rank-one tensor scale * v^{(x) k}
DenseTensor rank_one(int k, const VectorXd& v, double scale = 1.0);

// Zero-copy unfolding: rows indexed by the `split` modes (1-based, in the
// given order), columns by the remaining modes in increasing order.
struct Unfolding {
  const DenseTensor* tensor = nullptr;
  std::vector<int> row_modes;  // 0-based
  std::vector<int> col_modes;  // 0-based
  int64_t rows = 0;
  int64_t cols = 0;

  double entry(int64_t r, int64_t c) const;
  void row_multi_index(int64_t r, std::span<int> idx) const;
  void col_multi_index(int64_t c, std::span<int> idx) const;
  MatrixXd materialize() const;
};

Unfolding unfold(const DenseTensor& t);  // default split: first floor(k/2) modes
Unfolding unfold(const DenseTensor& t, std::span<const int> split_1based);

// Mode-1 slice of an order-3 tensor: (A_i)_{jk} = T_{ijk}. 1-based i.
ConstMatrixMap slice(const DenseTensor& t, int i);

// Permutation of k symbols, 0-based images: perm[m] = pi(m).
using Perm = std::vector<int>;
bool is_valid_perm(const Perm& p);
Perm inverse_perm(const Perm& p);
// Composition matching the group action: permute(T, compose(pi, rho)) ==
// permute(permute(T, rho), pi).
Perm compose_perm(const Perm& pi, const Perm& rho);
std::vector<Perm> all_perms(int k);

// (pi . T)_alpha = T_{pi^{-1}(alpha)}, indices permuted by position.
DenseTensor permute(const DenseTensor& t, const Perm& pi);

// Average of T^pi over all pi in S_k.
DenseTensor symmetrize(const DenseTensor& t);

// T(x) = <x^{(x) k}, T>
double eval_poly(const DenseTensor& t, const VectorXd& x);

// E sum_i A_i (x) A_i = n * w w^T with w = vec(Id_n).
MatrixXd expected_gram(int n);

// vec(Id_n) in row-major pair coordinates.
VectorXd vec_identity(int n);

}  // namespace tpca
