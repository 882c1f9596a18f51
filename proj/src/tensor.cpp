#include "tpca/tensor.hpp"

#include <algorithm>
#include <atomic>

namespace tpca {

namespace {
std::atomic<int64_t> g_capacity{200000000};  // 2e8 entries
}

int64_t tensor_capacity() { return g_capacity.load(); }
void set_tensor_capacity(int64_t entries) { g_capacity.store(entries); }

int64_t checked_pow(int order, int dim) {
  if (order < 1 || dim < 1) throw std::invalid_argument("checked_pow: bad order/dim");
  int64_t cap = tensor_capacity();
  int64_t v = 1;
  for (int i = 0; i < order; ++i) {
    if (v > cap / dim)
      throw capacity_error("tensor of dim " + std::to_string(dim) + "^" +
                           std::to_string(order) + " exceeds capacity " +
                           std::to_string(cap));
    v *= dim;
  }
  return v;
}

DenseTensor::DenseTensor(int k, int n) : order(k), dim(n) {
  if (k < 1 || n < 1) throw std::invalid_argument("DenseTensor: order and dim must be positive");
  entries.assign(size_t(checked_pow(k, n)), 0.0);
}

int64_t DenseTensor::flat_index(std::span<const int> idx) const {
  if (int(idx.size()) != order) throw std::invalid_argument("flat_index: wrong arity");
  int64_t f = 0;
  for (int m = 0; m < order; ++m) {
    if (idx[m] < 0 || idx[m] >= dim) throw std::out_of_range("flat_index: index out of range");
    f = f * dim + idx[m];
  }
  return f;
}

void DenseTensor::multi_index(int64_t flat, std::span<int> idx) const {
  for (int m = order - 1; m >= 0; --m) {
    idx[m] = int(flat % dim);
    flat /= dim;
  }
}

ConstMatrixMap DenseTensor::as_matrix(int row_modes) const {
  if (row_modes < 0 || row_modes > order) throw std::invalid_argument("as_matrix: bad row_modes");
  int64_t r = 1, c = 1;
  for (int m = 0; m < row_modes; ++m) r *= dim;
  for (int m = row_modes; m < order; ++m) c *= dim;
  return ConstMatrixMap(entries.data(), r, c);
}

DenseTensor rank_one(int k, const VectorXd& v, double scale) {
  DenseTensor t(k, int(v.size()));
  int n = t.dim;
  std::vector<int> idx(k, 0);
  for (int64_t f = 0; f < t.size(); ++f) {
    t.multi_index(f, idx);
    double p = scale;
    for (int m = 0; m < k; ++m) p *= v[idx[m]];
    t.entries[size_t(f)] = p;
  }
  return t;
}

double Unfolding::entry(int64_t r, int64_t c) const {
  int k = tensor->order;
  std::vector<int> idx(k, 0);
  int n = tensor->dim;
  for (int m = int(row_modes.size()) - 1; m >= 0; --m) {
    idx[row_modes[size_t(m)]] = int(r % n);
    r /= n;
  }
  for (int m = int(col_modes.size()) - 1; m >= 0; --m) {
    idx[col_modes[size_t(m)]] = int(c % n);
    c /= n;
  }
  return tensor->at(idx);
}

void Unfolding::row_multi_index(int64_t r, std::span<int> idx) const {
  int n = tensor->dim;
  for (int m = int(row_modes.size()) - 1; m >= 0; --m) {
    idx[size_t(m)] = int(r % n);
    r /= n;
  }
}

void Unfolding::col_multi_index(int64_t c, std::span<int> idx) const {
  int n = tensor->dim;
  for (int m = int(col_modes.size()) - 1; m >= 0; --m) {
    idx[size_t(m)] = int(c % n);
    c /= n;
  }
}

MatrixXd Unfolding::materialize() const {
  MatrixXd m(rows, cols);
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t c = 0; c < cols; ++c) m(r, c) = entry(r, c);
  return m;
}

Unfolding unfold(const DenseTensor& t) {
  std::vector<int> split;
  for (int m = 1; m <= t.order / 2; ++m) split.push_back(m);
  return unfold(t, split);
}

Unfolding unfold(const DenseTensor& t, std::span<const int> split_1based) {
  Unfolding u;
  u.tensor = &t;
  std::vector<bool> used(size_t(t.order), false);
  for (int m : split_1based) {
    if (m < 1 || m > t.order) throw std::invalid_argument("unfold: mode out of range");
    if (used[size_t(m - 1)]) throw std::invalid_argument("unfold: duplicate mode");
    used[size_t(m - 1)] = true;
    u.row_modes.push_back(m - 1);
  }
  for (int m = 0; m < t.order; ++m)
    if (!used[size_t(m)]) u.col_modes.push_back(m);
  u.rows = 1;
  u.cols = 1;
  for (size_t i = 0; i < u.row_modes.size(); ++i) u.rows *= t.dim;
  for (size_t i = 0; i < u.col_modes.size(); ++i) u.cols *= t.dim;
  return u;
}

ConstMatrixMap slice(const DenseTensor& t, int i) {
  if (t.order != 3) throw std::invalid_argument("slice: order-3 tensors only");
  if (i < 1 || i > t.dim) throw std::out_of_range("slice: index out of range");
  int n = t.dim;
  return ConstMatrixMap(t.entries.data() + int64_t(i - 1) * n * n, n, n);
}

bool is_valid_perm(const Perm& p) {
  std::vector<bool> seen(p.size(), false);
  for (int v : p) {
    if (v < 0 || v >= int(p.size()) || seen[size_t(v)]) return false;
    seen[size_t(v)] = true;
  }
  return true;
}

Perm inverse_perm(const Perm& p) {
  Perm inv(p.size());
  for (size_t m = 0; m < p.size(); ++m) inv[size_t(p[m])] = int(m);
  return inv;
}

Perm compose_perm(const Perm& pi, const Perm& rho) {
  // (pi o rho)(m) = rho(pi(m)) under this action convention; pinned by the
  // group-action property test.
  Perm c(pi.size());
  for (size_t m = 0; m < pi.size(); ++m) c[m] = rho[size_t(pi[m])];
  return c;
}

std::vector<Perm> all_perms(int k) {
  Perm p(static_cast<size_t>(k), 0);
  for (int m = 0; m < k; ++m) p[size_t(m)] = m;
  std::vector<Perm> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

DenseTensor permute(const DenseTensor& t, const Perm& pi) {
  if (int(pi.size()) != t.order || !is_valid_perm(pi))
    throw std::invalid_argument("permute: malformed permutation");
  Perm pinv = inverse_perm(pi);
  DenseTensor out(t.order, t.dim);
  int k = t.order, n = t.dim;
  std::vector<int> alpha(size_t(k), 0), gamma(size_t(k), 0);
  for (int64_t f = 0; f < out.size(); ++f) {
    out.multi_index(f, alpha);
    // (pi . T)_alpha = T_gamma with gamma_m = alpha_{pi^{-1}(m)}
    for (int m = 0; m < k; ++m) gamma[size_t(m)] = alpha[size_t(pinv[size_t(m)])];
    int64_t g = 0;
    for (int m = 0; m < k; ++m) g = g * n + gamma[size_t(m)];
    out.entries[size_t(f)] = t.entries[size_t(g)];
  }
  return out;
}

DenseTensor symmetrize(const DenseTensor& t) {
  auto perms = all_perms(t.order);
  DenseTensor acc(t.order, t.dim);
  for (const Perm& p : perms) {
    DenseTensor tp = permute(t, p);
    for (int64_t f = 0; f < acc.size(); ++f) acc.entries[size_t(f)] += tp.entries[size_t(f)];
  }
  double w = 1.0 / double(perms.size());
  for (double& e : acc.entries) e *= w;
  return acc;
}

double eval_poly(const DenseTensor& t, const VectorXd& x) {
  if (int(x.size()) != t.dim) throw std::invalid_argument("eval_poly: dimension mismatch");
  // contract modes one at a time, right to left
  int n = t.dim;
  std::vector<double> cur(t.entries);
  int64_t len = t.size();
  for (int m = t.order - 1; m >= 0; --m) {
    len /= n;
    for (int64_t r = 0; r < len; ++r) {
      double s = 0;
      const double* row = cur.data() + r * n;
      for (int j = 0; j < n; ++j) s += row[j] * x[j];
      cur[size_t(r)] = s;
    }
  }
  return cur[0];
}

VectorXd vec_identity(int n) {
  VectorXd w = VectorXd::Zero(int64_t(n) * n);
  for (int i = 0; i < n; ++i) w[int64_t(i) * n + i] = 1.0;
  return w;
}

MatrixXd expected_gram(int n) {
  if (n < 1) throw std::invalid_argument("expected_gram: n must be positive");
  VectorXd w = vec_identity(n);
  return double(n) * (w * w.transpose());
}

}  // namespace tpca
