#include "tpca/recovery.hpp"

#include <chrono>
#include <cmath>

namespace tpca {

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

void fill_truth(RecoveryReport& rep, const VectorXd& v0) {
  double c = rep.v.dot(v0);
  rep.correlation = c;
  rep.corr_sq = c * c;
}

// odd-k sign fix: the MLE objective prefers the orientation with larger T(v)
void fix_sign(const DenseTensor& t, VectorXd& v) {
  if (eval_poly(t, v) < 0) v = -v;
}

// Fold a length-n^m vector into an n^{m-1} x n matrix (row-major), take the
// top right singular vector; recurse on the left factor down to length n.
VectorXd extract_by_folding(VectorXd u, int n) {
  while (u.size() > n) {
    int64_t rows = u.size() / n;
    ConstMatrixMap m(u.data(), rows, n);
    Eigen::BDCSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (u.size() == int64_t(n) * n) return svd.matrixV().col(0);
    u = svd.matrixU().col(0);
  }
  return u;
}

}  // namespace

RecoveryReport recover_titi(const SpikedInstance& inst, const RecoveryOptions& opts) {
  if (inst.k() != 3) throw std::invalid_argument("recover_titi: order-3 tensors only");
  auto t0 = clock_type::now();
  int n = inst.n();
  auto op = op_titi(inst.tensor, true);
  auto sr = top_singular_value(op, opts.power);
  RecoveryReport rep;
  rep.algorithm = "titi";
  rep.seed = inst.seed;
  rep.stream = opts.power.stream;
  rep.converged = sr.converged;
  rep.iterations = sr.iterations;
  rep.matvecs = sr.matvecs;
  ConstMatrixMap folded(sr.right.data(), n, n);
  Eigen::BDCSVD<MatrixXd> svd(folded, Eigen::ComputeThinU | Eigen::ComputeThinV);
  VectorXd v = svd.matrixV().col(0);
  fix_sign(inst.tensor, v);
  rep.v = v.normalized();
  fill_truth(rep, inst.v0);
  rep.time_ms = ms_since(t0);
  return rep;
}

RecoveryReport recover_unfold(const SpikedInstance& inst, const RecoveryOptions& opts) {
  auto t0 = clock_type::now();
  int n = inst.n(), k = inst.k();
  RecoveryReport rep;
  rep.algorithm = "unfold";
  rep.seed = inst.seed;
  rep.stream = opts.power.stream;
  VectorXd u;
  if (k % 2 == 1) {
    auto op = op_gram(inst.tensor);
    double shift = std::pow(double(n), double(k + 1) / 2.0);
    auto er = top_singular_shifted(op, shift, opts.power);
    rep.converged = er.converged;
    rep.iterations = er.iterations;
    rep.matvecs = er.matvecs;
    u = er.vector;
  } else {
    // square unfolding has a genuine spectral gap; no shift needed
    auto data = std::make_shared<const DenseTensor>(inst.tensor);
    LinearOperator op;
    int64_t side = 1;
    for (int m = 0; m < k / 2; ++m) side *= n;
    op.dim = side;
    op.symmetric = true;
    op.matvec_cost_hint = 4.0 * double(side) * double(side);
    int half = k / 2;
    op.apply_fn = [data, half](const VectorXd& x, VectorXd& y) {
      ConstMatrixMap f = data->as_matrix(half);
      VectorXd mid = f * x;
      y.noalias() = f.transpose() * mid;
    };
    auto er = top_singular_shifted(op, 0.0, opts.power);
    rep.converged = er.converged;
    rep.iterations = er.iterations;
    rep.matvecs = er.matvecs;
    u = er.vector;
  }
  VectorXd v = u.size() > n ? extract_by_folding(u, n) : u;
  v.normalize();
  if (k % 2 == 1) fix_sign(inst.tensor, v);
  rep.v = v;
  fill_truth(rep, inst.v0);
  rep.time_ms = ms_since(t0);
  return rep;
}

RecoveryReport recover_symmetric(const SpikedInstance& inst, uint64_t seed,
                                 const RecoveryOptions& opts) {
  if (inst.k() != 3) throw std::invalid_argument("recover_symmetric: order-3 tensors only");
  auto t0 = clock_type::now();
  int n = inst.n();
  RecoveryReport rep;
  rep.algorithm = "symmetric";
  rep.seed = seed;
  rep.stream = opts.power.stream;

  Rng rng(seed, derive_stream(opts.power.stream, 0x73796dull));
  std::vector<int> part(static_cast<size_t>(n), 0);
  bool ok = false;
  for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
    int counts[3] = {0, 0, 0};
    for (int i = 0; i < n; ++i) {
      part[size_t(i)] = int(rng.next_u32() % 3);
      ++counts[part[size_t(i)]];
    }
    ok = counts[0] > 0 && counts[1] > 0 && counts[2] > 0;
  }
  if (!ok) throw std::runtime_error("recover_symmetric: could not draw a non-degenerate partition");
  MatrixXd r = rng.random_rotation(n);

  auto data = std::make_shared<const DenseTensor>(inst.tensor);
  auto block_indices = [&](int b) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (part[size_t(i)] == b) idx.push_back(i);
    return idx;
  };

  int64_t total_matvecs = 0;
  int total_iters = 0;
  bool all_conv = true;
  double shift = double(n) * double(n) / 9.0;

  VectorXd vblocks[3];
  for (int b = 0; b < 3; ++b) {
    auto xs = block_indices(b);
    auto ys = block_indices((b + 1) % 3);
    auto zs = block_indices((b + 2) % 3);
    LinearOperator op;
    op.dim = int64_t(xs.size());
    op.symmetric = true;
    op.matvec_cost_hint = 8.0 * std::pow(double(n), 3);
    op.apply_fn = [data, &xs, &ys, &zs, r, n, shift](const VectorXd& x, VectorXd& y) {
      VectorXd emb = VectorXd::Zero(n);
      for (size_t q = 0; q < xs.size(); ++q) emb[xs[q]] = x[int64_t(q)];
      VectorXd t1 = r.transpose() * emb;
      ConstMatrixMap f = data->as_matrix(2);
      VectorXd t2 = f * t1;  // n^2
      Eigen::Map<const RowMajorMatrix> t2m(t2.data(), n, n);
      RowMajorMatrix t3 = r * t2m * r.transpose();
      // mask rows in Y, cols in Z
      RowMajorMatrix t4 = RowMajorMatrix::Zero(n, n);
      for (int a : ys)
        for (int c : zs) t4(a, c) = t3(a, c);
      RowMajorMatrix t5 = r.transpose() * t4 * r;
      Eigen::Map<const VectorXd> t5v(t5.data(), int64_t(n) * n);
      VectorXd t6 = f.transpose() * t5v;
      VectorXd t7 = r * t6;
      for (size_t q = 0; q < xs.size(); ++q) y[int64_t(q)] = t7[xs[q]] - shift * x[int64_t(q)];
    };
    PowerOptions po = opts.power;
    po.seed = seed;
    po.stream = derive_stream(opts.power.stream, 0x626c6full, uint64_t(b));
    auto er = top_singular_shifted(op, 0.0, po);
    total_matvecs += er.matvecs;
    total_iters += er.iterations;
    all_conv = all_conv && er.converged;
    VectorXd emb = VectorXd::Zero(n);
    for (size_t q = 0; q < xs.size(); ++q) emb[xs[q]] = er.vector[int64_t(q)];
    vblocks[b] = emb;
  }

  // the three block vectors have disjoint supports; fix relative signs by
  // maximizing the tensor objective over the 4 sign patterns
  double best_val = -std::numeric_limits<double>::infinity();
  VectorXd best;
  for (int sy = -1; sy <= 1; sy += 2)
    for (int sz = -1; sz <= 1; sz += 2) {
      VectorXd cand = vblocks[0] + double(sy) * vblocks[1] + double(sz) * vblocks[2];
      cand = r.transpose() * cand;
      cand.normalize();
      double val = eval_poly(inst.tensor, cand);
      if (val > best_val) {
        best_val = val;
        best = cand;
      }
    }
  if (best_val < 0) best = -best;

  rep.v = best.normalized();
  rep.converged = all_conv;
  rep.iterations = total_iters;
  rep.matvecs = total_matvecs;
  fill_truth(rep, inst.v0);
  rep.time_ms = ms_since(t0);
  return rep;
}

CertificateReport certify_titi(const DenseTensor& t, const VectorXd& v, const Calibration& cal,
                               const RecoveryOptions& opts) {
  if (t.order != 3) throw std::invalid_argument("certify_titi: order-3 tensors only");
  if (std::abs(v.norm() - 1.0) > 1e-8) throw std::invalid_argument("certify_titi: v must be unit");
  auto t0 = clock_type::now();
  int n = t.dim;
  CertificateReport rep;
  rep.tau_hat = eval_poly(t, v);
  DenseTensor s = t;
  {
    DenseTensor spike = rank_one(3, v, rep.tau_hat);
    for (int64_t f = 0; f < s.size(); ++f) s.entries[size_t(f)] -= spike.entries[size_t(f)];
  }
  rep.threshold = cal.titi_threshold(n);
  rep.threshold_constant = rep.threshold / (std::pow(double(n), 1.5) * std::sqrt(std::log(double(n))));
  auto op = op_titi(std::make_shared<const DenseTensor>(std::move(s)), true);
  PowerOptions po = opts.power;
  po.exceed_threshold = rep.threshold;
  auto sr = top_singular_value(op, po);
  rep.lambda_cert = sr.sigma;
  rep.matvecs = sr.matvecs;
  rep.converged = sr.converged;
  rep.certify = !sr.exceeded && sr.sigma <= rep.threshold;
  rep.bound = std::sqrt(std::max(rep.lambda_cert, 0.0) + double(n));
  rep.time_ms = ms_since(t0);
  return rep;
}

bool check_certificate(const DenseTensor& t, const CertificateReport& rep, const VectorXd& v,
                       const VectorXd& x0, int num_points, uint64_t seed) {
  Rng rng(seed, 0x63657274ull);
  auto holds_at = [&](const VectorXd& x) {
    double lhs = eval_poly(t, x);
    double rhs = rep.tau_hat * std::pow(v.dot(x), 3) + rep.bound;
    return lhs <= rhs + 1e-9 * std::max(1.0, std::abs(rhs));
  };
  if (x0.size() == t.dim && !holds_at(x0.normalized())) return false;
  for (int i = 0; i < num_points; ++i)
    if (!holds_at(rng.unit_sphere(t.dim))) return false;
  return true;
}

SemiRandomAdversary whitening_adversary(const SpikedInstance& inst) {
  if (inst.k() != 3) throw std::invalid_argument("whitening_adversary: order-3 tensors only");
  int n = inst.n();
  MatrixXd f = inst.tensor.as_matrix(2);  // n^2 x n
  MatrixXd gram = f.transpose() * f;
  auto spec = dense_eig_oracle(gram);
  double floor = 1e-10 * std::max(1.0, spec.values[0]);
  MatrixXd inv_sqrt = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (spec.values[i] <= floor)
      throw std::runtime_error("whitening_adversary: T^T T is numerically singular");
    inv_sqrt += spec.vectors.col(i) * spec.vectors.col(i).transpose() / std::sqrt(spec.values[i]);
  }
  SemiRandomAdversary adv;
  adv.mode = "whitening";
  adv.q = double(n) * inv_sqrt;
  adv.q_dev_norm = (adv.q - MatrixXd::Identity(n, n)).operatorNorm();
  return adv;
}

SemiRandomAdversary custom_adversary(const MatrixXd& q) {
  if (q.rows() != q.cols() || !q.allFinite())
    throw std::invalid_argument("custom_adversary: square finite Q required");
  SemiRandomAdversary adv;
  adv.mode = "custom";
  adv.q = q;
  adv.q_dev_norm = (q - MatrixXd::Identity(q.rows(), q.cols())).operatorNorm();
  return adv;
}

SpikedInstance apply_semirandom(const SpikedInstance& inst, const SemiRandomAdversary& adv) {
  if (inst.k() != 3) throw std::invalid_argument("apply_semirandom: order-3 tensors only");
  int n = inst.n();
  if (adv.q.rows() != n) throw std::invalid_argument("apply_semirandom: Q dimension mismatch");
  SpikedInstance out = inst;
  out.noise_kind = NoiseKind::semi_random;
  ConstMatrixMap f(inst.tensor.entries.data(), int64_t(n) * n, n);
  Eigen::Map<RowMajorMatrix> fd(out.tensor.entries.data(), int64_t(n) * n, n);
  fd = f * adv.q;
  return out;
}

}  // namespace tpca
