#include "tpca/moment_matrix.hpp"

#include <algorithm>
#include <array>
#include <mutex>
#include <unordered_map>

namespace tpca {

double MomentMatrix::pe_cubic(const DenseTensor& t) const {
  if (t.order != 3 || t.dim != n) throw std::invalid_argument("pe_cubic: shape mismatch");
  double s = 0;
  std::vector<int> idx(3);
  for (int64_t f = 0; f < t.size(); ++f) {
    t.multi_index(f, idx);
    s += t.entries[size_t(f)] * pe_xxx(idx[0], idx[1], idx[2]);
  }
  return s;
}

double MomentMatrix::pe_norm4() const {
  double s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += pe_xxxx(i, i, j, j);
  return s;
}

VectorXd sphere_kernel_vector(int n) {
  VectorXd w = VectorXd::Zero(1 + n + n * n);
  w[0] = -1.0;
  for (int i = 0; i < n; ++i) w[1 + n + i * n + i] = 1.0;
  return w;
}

MomentMatrix uniform_moments(int n) {
  if (n < 1) throw std::invalid_argument("uniform_moments: n >= 1");
  MomentMatrix mm(n);
  double d2 = 1.0 / double(n);
  double d4 = 1.0 / (double(n) * n + 2.0 * n);
  mm.m(0, 0) = 1.0;
  for (int i = 0; i < n; ++i) {
    mm.m(mm.idx_var(i), mm.idx_var(i)) = d2;
    mm.m(0, mm.idx_pair(i, i)) = d2;
    mm.m(mm.idx_pair(i, i), 0) = d2;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double v = 0;
          if (i == j && k == l) v += d4;
          if (i == k && j == l) v += d4;
          if (i == l && j == k) v += d4;
          if (v != 0) mm.m(mm.idx_pair(i, j), mm.idx_pair(k, l)) = v;
        }
  return mm;
}

namespace {

// canonical key of the monomial represented by entry (row, col)
uint64_t entry_key(int n, int row, int col) {
  std::array<int, 4> v{};
  int cnt = 0;
  auto push = [&](int basis_index) {
    if (basis_index == 0) return;
    if (basis_index <= n) {
      v[size_t(cnt++)] = basis_index - 1;
    } else {
      int p = basis_index - 1 - n;
      v[size_t(cnt++)] = p / n;
      v[size_t(cnt++)] = p % n;
    }
  };
  push(row);
  push(col);
  std::sort(v.begin(), v.begin() + cnt);
  uint64_t key = uint64_t(cnt);
  for (int i = 0; i < cnt; ++i) key = key * uint64_t(n) + uint64_t(v[size_t(i)]);
  return key;
}

std::mutex g_table_mutex;
std::unordered_map<int, std::shared_ptr<const MonomialTable>> g_tables;

}  // namespace

std::shared_ptr<const MonomialTable> MonomialTable::get(int n) {
  {
    std::lock_guard<std::mutex> lock(g_table_mutex);
    auto it = g_tables.find(n);
    if (it != g_tables.end()) return it->second;
  }
  auto t = std::make_shared<MonomialTable>();
  t->n = n;
  t->dim = 1 + n + n * n;
  t->class_of.assign(size_t(t->dim) * t->dim, -1);
  std::unordered_map<uint64_t, int32_t> ids;
  ids.reserve(size_t(t->dim) * 4);
  std::vector<double> counts;
  for (int r = 0; r < t->dim; ++r)
    for (int c = 0; c < t->dim; ++c) {
      uint64_t key = entry_key(n, r, c);
      auto [it, inserted] = ids.try_emplace(key, int32_t(counts.size()));
      if (inserted) counts.push_back(0.0);
      int32_t id = it->second;
      t->class_of[size_t(r) * t->dim + c] = id;
      counts[size_t(id)] += 1.0;
    }
  t->n_classes = int(counts.size());
  t->class_count = std::move(counts);
  std::lock_guard<std::mutex> lock(g_table_mutex);
  auto [it, _] = g_tables.try_emplace(n, t);
  return it->second;
}

MatrixXd project_maximal_symmetry(const MatrixXd& m, const MonomialTable& t) {
  std::vector<double> sums(size_t(t.n_classes), 0.0);
  for (int r = 0; r < t.dim; ++r)
    for (int c = 0; c < t.dim; ++c) sums[size_t(t.class_of[size_t(r) * t.dim + c])] += m(r, c);
  MatrixXd out(t.dim, t.dim);
  for (int r = 0; r < t.dim; ++r)
    for (int c = 0; c < t.dim; ++c) {
      int32_t id = t.class_of[size_t(r) * t.dim + c];
      out(r, c) = sums[size_t(id)] / t.class_count[size_t(id)];
    }
  return out;
}

double max_symmetry_violation(const MatrixXd& m, const MonomialTable& t) {
  std::vector<double> mn(size_t(t.n_classes), std::numeric_limits<double>::infinity());
  std::vector<double> mx(size_t(t.n_classes), -std::numeric_limits<double>::infinity());
  for (int r = 0; r < t.dim; ++r)
    for (int c = 0; c < t.dim; ++c) {
      int32_t id = t.class_of[size_t(r) * t.dim + c];
      mn[size_t(id)] = std::min(mn[size_t(id)], m(r, c));
      mx[size_t(id)] = std::max(mx[size_t(id)], m(r, c));
    }
  double worst = 0;
  for (int i = 0; i < t.n_classes; ++i) worst = std::max(worst, mx[size_t(i)] - mn[size_t(i)]);
  return worst;
}

MatrixXd apply_sigma(const MatrixXd& m) {
  int n2 = int(m.rows());
  int n = int(std::lround(std::sqrt(double(n2))));
  MatrixXd out(n2, n2);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) out(a * n + b, c * n + d) = m(a * n + d, b * n + c);
  return out;
}

MatrixXd apply_sigma2(const MatrixXd& m) {
  int n2 = int(m.rows());
  int n = int(std::lround(std::sqrt(double(n2))));
  MatrixXd out(n2, n2);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) out(a * n + b, c * n + d) = m(a * n + c, d * n + b);
  return out;
}

MatrixXd pi_conjugate(const MatrixXd& m) {
  int n2 = int(m.rows());
  int n = int(std::lround(std::sqrt(double(n2))));
  MatrixXd out(n2, n2);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          out(a * n + b, c * n + d) = 0.25 * (m(a * n + b, c * n + d) + m(b * n + a, c * n + d) +
                                              m(a * n + b, d * n + c) + m(b * n + a, d * n + c));
  return out;
}

MatrixXd apply_perm4(const MatrixXd& m, const Perm& pi) {
  if (pi.size() != 4 || !is_valid_perm(pi)) throw std::invalid_argument("apply_perm4: bad perm");
  int n2 = int(m.rows());
  int n = int(std::lround(std::sqrt(double(n2))));
  Perm pinv = inverse_perm(pi);
  MatrixXd out(n2, n2);
  std::array<int, 4> alpha{}, gamma{};
  for (alpha[0] = 0; alpha[0] < n; ++alpha[0])
    for (alpha[1] = 0; alpha[1] < n; ++alpha[1])
      for (alpha[2] = 0; alpha[2] < n; ++alpha[2])
        for (alpha[3] = 0; alpha[3] < n; ++alpha[3]) {
          for (int q = 0; q < 4; ++q) gamma[size_t(q)] = alpha[size_t(pinv[size_t(q)])];
          out(alpha[0] * n + alpha[1], alpha[2] * n + alpha[3]) =
              m(gamma[0] * n + gamma[1], gamma[2] * n + gamma[3]);
        }
  return out;
}

MatrixXd sym_project(const MatrixXd& m) {
  MatrixXd c3 = m + apply_sigma(m) + apply_sigma2(m);
  MatrixXd half = pi_conjugate(c3);
  MatrixXd full = 0.5 * (half + half.transpose());
  // (1/8) sum_{D8 x C3} = (1/8) sum_{S4}; divide by 3 more for the average
  return full / 3.0;
}

MatrixXd id_sym_sum(int n) {
  int n2 = n * n;
  MatrixXd out = MatrixXd::Identity(n2, n2);
  VectorXd w = vec_identity(n);
  out += w * w.transpose();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out(a * n + b, b * n + a) += 1.0;
  return out;
}

}  // namespace tpca
