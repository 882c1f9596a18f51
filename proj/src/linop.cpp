#include "tpca/linop.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace tpca {

namespace {
std::atomic<int64_t> g_dense_cap{2000};
}

int64_t dense_eig_cap() { return g_dense_cap.load(); }
void set_dense_eig_cap(int64_t dim) { g_dense_cap.store(dim); }

VectorXd LinearOperator::apply(const VectorXd& x) const {
  if (int64_t(x.size()) != dim) throw std::invalid_argument("LinearOperator: dimension mismatch");
  VectorXd y(dim);
  apply_fn(x, y);
  ++(*matvecs);
  return y;
}

VectorXd LinearOperator::apply_adjoint(const VectorXd& x) const {
  if (int64_t(x.size()) != dim) throw std::invalid_argument("LinearOperator: dimension mismatch");
  if (symmetric && !adjoint_fn) return apply(x);
  if (!adjoint_fn) throw std::logic_error("LinearOperator: no adjoint available");
  VectorXd y(dim);
  adjoint_fn(x, y);
  ++(*matvecs);
  return y;
}

LinearOperator op_gram(const DenseTensor& t) {
  if (t.order % 2 == 0)
    throw std::invalid_argument("op_gram: odd order required (even k uses the square unfolding)");
  auto data = std::make_shared<const DenseTensor>(t);
  int k = t.order, n = t.dim;
  int row_modes = (k + 1) / 2;
  int64_t rows = 1, cols = 1;
  for (int m = 0; m < row_modes; ++m) rows *= n;
  for (int m = row_modes; m < k; ++m) cols *= n;
  LinearOperator op;
  op.dim = cols;
  op.symmetric = true;
  op.matvec_cost_hint = 4.0 * double(rows) * double(cols);
  op.apply_fn = [data, row_modes](const VectorXd& x, VectorXd& y) {
    ConstMatrixMap f = data->as_matrix(row_modes);
    VectorXd mid = f * x;
    y.noalias() = f.transpose() * mid;
  };
  return op;
}

LinearOperator op_titi(const DenseTensor& t, bool subtract_expectation) {
  return op_titi(std::make_shared<const DenseTensor>(t), subtract_expectation);
}

LinearOperator op_titi(std::shared_ptr<const DenseTensor> t, bool subtract_expectation) {
  if (t->order != 3) throw std::invalid_argument("op_titi: order-3 tensors only");
  int n = t->dim;
  LinearOperator op;
  op.dim = int64_t(n) * n;
  op.symmetric = false;
  op.matvec_cost_hint = 4.0 * std::pow(double(n), 4);
  auto body = [t, n, subtract_expectation](const VectorXd& x, VectorXd& y, bool adjoint) {
    ConstMatrixMap z(x.data(), n, n);
    Eigen::Map<RowMajorMatrix> r(y.data(), n, n);
    r.setZero();
    RowMajorMatrix tmp(n, n);
    for (int i = 1; i <= n; ++i) {
      ConstMatrixMap ti = slice(*t, i);
      if (!adjoint) {
        tmp.noalias() = z * ti.transpose();
        r.noalias() += ti * tmp;
      } else {
        tmp.noalias() = z * ti;
        r.noalias() += ti.transpose() * tmp;
      }
    }
    if (subtract_expectation) {
      double tr = 0;
      for (int i = 0; i < n; ++i) tr += x[int64_t(i) * n + i];
      double s = double(n) * tr;
      for (int i = 0; i < n; ++i) y[int64_t(i) * n + i] -= s;
    }
  };
  op.apply_fn = [body](const VectorXd& x, VectorXd& y) { body(x, y, false); };
  op.adjoint_fn = [body](const VectorXd& x, VectorXd& y) { body(x, y, true); };
  return op;
}

LinearOperator gram_of(const LinearOperator& op) {
  LinearOperator g;
  g.dim = op.dim;
  g.symmetric = true;
  g.matvec_cost_hint = 2.0 * op.matvec_cost_hint;
  g.matvecs = op.matvecs;
  LinearOperator inner = op;
  inner.matvecs = op.matvecs;
  g.apply_fn = [inner](const VectorXd& x, VectorXd& y) {
    VectorXd mid(inner.dim);
    inner.apply_fn(x, mid);
    if (inner.symmetric && !inner.adjoint_fn)
      inner.apply_fn(mid, y);
    else
      inner.adjoint_fn(mid, y);
    ++(*inner.matvecs);  // count the inner pair as two matvecs total
  };
  return g;
}

LinearOperator op_dense(const MatrixXd& m) {
  auto data = std::make_shared<MatrixXd>(m);
  LinearOperator op;
  op.dim = m.rows();
  op.symmetric = m.rows() == m.cols() && m.isApprox(m.transpose(), 1e-12);
  op.matvec_cost_hint = 2.0 * double(m.rows()) * double(m.cols());
  op.apply_fn = [data](const VectorXd& x, VectorXd& y) { y.noalias() = (*data) * x; };
  op.adjoint_fn = [data](const VectorXd& x, VectorXd& y) { y.noalias() = data->transpose() * x; };
  return op;
}

MatrixXd materialize(const LinearOperator& op) {
  MatrixXd m(op.dim, op.dim);
  VectorXd e = VectorXd::Zero(op.dim);
  for (int64_t j = 0; j < op.dim; ++j) {
    e[j] = 1.0;
    m.col(j) = op.apply(e);
    e[j] = 0.0;
  }
  return m;
}

EigReport top_singular_shifted(const LinearOperator& op, double shift, const PowerOptions& opts) {
  if (!op.symmetric) throw std::invalid_argument("top_singular_shifted: symmetric operator required");
  int max_iter = opts.max_iter > 0
                     ? opts.max_iter
                     : 10 * std::max(1, int(std::ceil(std::log2(double(std::max<int64_t>(2, op.dim))))));
  EigReport best;
  best.seed = opts.seed;
  best.stream = opts.stream;
  int64_t mv0 = op.matvec_count();
  Rng rng(opts.seed, derive_stream(opts.stream, 0x706f776572ull));
  for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
    VectorXd z = rng.gaussian_vector(int(op.dim));
    z.normalize();
    EigReport rep;
    rep.seed = opts.seed;
    rep.stream = opts.stream;
    rep.restarts = attempt;
    for (int it = 0; it < max_iter; ++it) {
      VectorXd w = op.apply(z);
      double theta = z.dot(w);  // Rayleigh quotient of op
      VectorXd ws = w - shift * z;
      double resid = (w - theta * z).norm();
      rep.value = theta;
      rep.vector = z;
      rep.iterations = it + 1;
      rep.residual = resid;
      if (opts.exceed_threshold > 0 && theta > opts.exceed_threshold) {
        rep.exceeded = true;
        rep.converged = true;
        rep.matvecs = op.matvec_count() - mv0;
        return rep;
      }
      if (resid <= opts.tol * std::max(std::abs(theta), 1e-300)) {
        rep.converged = true;
        rep.matvecs = op.matvec_count() - mv0;
        return rep;
      }
      double nrm = ws.norm();
      if (nrm <= 1e-300) break;  // start vector annihilated; restart
      z = ws / nrm;
    }
    rep.matvecs = op.matvec_count() - mv0;
    if (!best.vector.size() || std::abs(rep.value - shift) > std::abs(best.value - shift)) best = rep;
  }
  best.converged = false;
  best.matvecs = op.matvec_count() - mv0;
  return best;
}

SingularReport top_singular_value(const LinearOperator& op, const PowerOptions& opts) {
  bool direct = op.symmetric;
  LinearOperator g = direct ? op : gram_of(op);
  PowerOptions gopts = opts;
  if (!direct && opts.exceed_threshold > 0)
    gopts.exceed_threshold = opts.exceed_threshold * opts.exceed_threshold;
  EigReport er = top_singular_shifted(g, 0.0, gopts);
  SingularReport sr;
  if (direct) {
    sr.sigma = std::abs(er.value);
  } else {
    sr.sigma = std::sqrt(std::max(0.0, er.value));
  }
  sr.right = er.vector;
  sr.iterations = er.iterations;
  sr.matvecs = er.matvecs;
  sr.residual = er.residual;
  sr.converged = er.converged;
  sr.exceeded = er.exceeded;
  return sr;
}

DenseSpectrum dense_eig_oracle(const MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("dense_eig_oracle: square matrix required");
  if (m.rows() > dense_eig_cap()) throw std::invalid_argument("dense_eig_oracle: dimension over cap");
  if (!m.allFinite()) throw std::invalid_argument("dense_eig_oracle: non-finite entries");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success) throw std::runtime_error("dense_eig_oracle: eigensolver failed");
  int d = int(m.rows());
  DenseSpectrum out;
  out.values.resize(d);
  out.vectors.resize(d, d);
  // ascending -> descending, with a deterministic sign convention
  std::vector<int> order(static_cast<size_t>(d), 0);
  for (int i = 0; i < d; ++i) order[size_t(i)] = d - 1 - i;
  std::vector<VectorXd> cols{static_cast<size_t>(d)};
  for (int i = 0; i < d; ++i) {
    VectorXd v = es.eigenvectors().col(order[size_t(i)]);
    for (int j = 0; j < d; ++j) {
      if (std::abs(v[j]) > 1e-12) {
        if (v[j] < 0) v = -v;
        break;
      }
    }
    cols[size_t(i)] = v;
    out.values[i] = es.eigenvalues()[order[size_t(i)]];
  }
  // stable tie-break: among (numerically) equal eigenvalues order by
  // lexicographically larger sign-fixed vector first
  double scale = std::max(1.0, std::abs(out.values[0]));
  for (int i = 0; i + 1 < d;) {
    int j = i + 1;
    while (j < d && std::abs(out.values[j] - out.values[i]) <= 1e-12 * scale) ++j;
    if (j - i > 1) {
      std::vector<int> idx(static_cast<size_t>(j - i), 0);
      for (int a = 0; a < j - i; ++a) idx[size_t(a)] = i + a;
      std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        const VectorXd &va = cols[size_t(a)], &vb = cols[size_t(b)];
        for (int q = 0; q < d; ++q) {
          if (va[q] != vb[q]) return va[q] > vb[q];
        }
        return false;
      });
      std::vector<VectorXd> tmp{static_cast<size_t>(j - i)};
      for (int a = 0; a < j - i; ++a) tmp[size_t(a)] = cols[size_t(idx[size_t(a)])];
      for (int a = 0; a < j - i; ++a) cols[size_t(i + a)] = tmp[size_t(a)];
    }
    i = j;
  }
  for (int i = 0; i < d; ++i) out.vectors.col(i) = cols[size_t(i)];
  return out;
}

}  // namespace tpca
