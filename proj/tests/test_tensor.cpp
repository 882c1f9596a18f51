#include <doctest.h>

#include "tpca/instance.hpp"
#include "tpca/tensor.hpp"

using namespace tpca;

namespace {

DenseTensor random_tensor(int k, int n, uint64_t seed) {
  Rng rng(seed, 0);
  DenseTensor t(k, n);
  for (double& e : t.entries) e = rng.next_gaussian();
  return t;
}

}  // namespace

TEST_CASE("gen_spiked: pure noise has near-zero mean") {
  auto inst = gen_spiked(2, 3, 0.0, NoiseKind::iid_gaussian, 1);
  REQUIRE(inst.tensor.size() == 8);
  // mean of 8 entries; also check a larger draw for the statistic
  auto big = gen_spiked(20, 3, 0.0, NoiseKind::iid_gaussian, 1);
  double s = 0;
  for (double e : big.tensor.entries) s += e;
  s /= double(big.tensor.size());
  CHECK(std::abs(s) < 3.0 / std::sqrt(double(big.tensor.size())));
}

TEST_CASE("gen_spiked: zero-noise tensor is exactly tau * v0 outer cube") {
  GenOptions g;
  g.noise_scale = 0.0;
  auto inst = gen_spiked(3, 3, 5.0, NoiseKind::iid_gaussian, 11, g);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        int idx[3] = {i, j, k};
        CHECK(inst.tensor.at(idx) ==
              doctest::Approx(5.0 * inst.v0[i] * inst.v0[j] * inst.v0[k]).epsilon(1e-12));
      }
}

TEST_CASE("gen_spiked: symmetric noise is permutation invariant") {
  auto inst = gen_spiked(50, 3, 0.0, NoiseKind::symmetric_gaussian, 7);
  auto& t = inst.tensor;
  Rng probe(3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    int i = int(probe.next_u32() % 50), j = int(probe.next_u32() % 50), k = int(probe.next_u32() % 50);
    int a[3] = {i, j, k};
    int perms[6][3] = {{i, j, k}, {i, k, j}, {j, i, k}, {j, k, i}, {k, i, j}, {k, j, i}};
    for (auto& p : perms) CHECK(t.at(a) == doctest::Approx(t.at(p)).epsilon(1e-12));
  }
}

TEST_CASE("gen_spiked is reproducible from seed") {
  auto a = gen_spiked(6, 3, 2.0, NoiseKind::iid_gaussian, 123);
  auto b = gen_spiked(6, 3, 2.0, NoiseKind::iid_gaussian, 123);
  CHECK(a.tensor.entries == b.tensor.entries);
  CHECK(a.v0 == b.v0);
}

TEST_CASE("gen_spiked rejects bad dims and over-capacity requests") {
  CHECK_THROWS(gen_spiked(1, 3, 1.0, NoiseKind::iid_gaussian, 1));
  CHECK_THROWS(gen_spiked(5, 2, 1.0, NoiseKind::iid_gaussian, 1));
  CHECK_THROWS_AS(gen_spiked(100000, 3, 1.0, NoiseKind::iid_gaussian, 1), capacity_error);
}

TEST_CASE("unfold: k=3 default split gives n x n^2 with (i,(j,k)) = T_ijk") {
  auto t = random_tensor(3, 2, 5);
  auto u = unfold(t);
  REQUIRE(u.rows == 2);
  REQUIRE(u.cols == 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        int idx[3] = {i, j, k};
        CHECK(u.entry(i, j * 2 + k) == t.at(idx));
      }
}

TEST_CASE("unfold of a rank-one tensor is rank one") {
  Rng rng(8, 0);
  VectorXd v = rng.unit_sphere(4);
  auto t = rank_one(3, v);
  auto m = unfold(t).materialize();
  Eigen::JacobiSVD<MatrixXd> svd(m);
  CHECK(svd.singularValues()[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(svd.singularValues()[1] < 1e-12);
}

TEST_CASE("unfold: k=5 matches brute-force index enumeration") {
  auto t = random_tensor(5, 3, 17);
  auto u = unfold(t);  // rows: first 2 modes
  REQUIRE(u.rows == 9);
  REQUIRE(u.cols == 27);
  // independent oracle: enumerate all multi-indices directly
  for (int64_t f = 0; f < t.size(); ++f) {
    std::vector<int> idx(5);
    t.multi_index(f, idx);
    int64_t r = idx[0] * 3 + idx[1];
    int64_t c = (idx[2] * 3 + idx[3]) * 3 + idx[4];
    CHECK(u.entry(r, c) == t.entries[size_t(f)]);
  }
}

TEST_CASE("unfold rejects duplicate or out-of-range modes") {
  auto t = random_tensor(3, 2, 9);
  std::vector<int> dup = {1, 1};
  std::vector<int> oor = {4};
  CHECK_THROWS(unfold(t, dup));
  CHECK_THROWS(unfold(t, oor));
}

TEST_CASE("slice of rank-one tensor is v0(i) * v0 v0^T") {
  Rng rng(4, 0);
  VectorXd v = rng.unit_sphere(5);
  auto t = rank_one(3, v);
  for (int i = 1; i <= 5; ++i) {
    MatrixXd a = slice(t, i);
    CHECK((a - v[i - 1] * v * v.transpose()).norm() < 1e-12);
  }
}

TEST_CASE("sum_i v0(i) slice(T,i) recovers tau v0 v0^T for the pure spike") {
  Rng rng(14, 0);
  VectorXd v = rng.unit_sphere(6);
  double tau = 3.25;
  auto t = rank_one(3, v, tau);
  MatrixXd acc = MatrixXd::Zero(6, 6);
  for (int i = 1; i <= 6; ++i) acc += v[i - 1] * MatrixXd(slice(t, i));
  CHECK((acc - tau * v * v.transpose()).norm() < 1e-10);
}

TEST_CASE("slice entries agree with unfold entries") {
  auto t = random_tensor(3, 4, 21);
  auto u = unfold(t);  // 4 x 16
  for (int i = 1; i <= 4; ++i) {
    MatrixXd a = slice(t, i);
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) CHECK(a(j, k) == u.entry(i - 1, j * 4 + k));
  }
  CHECK_THROWS(slice(t, 0));
  CHECK_THROWS(slice(t, 5));
}

TEST_CASE("permute: identity and symmetric fixed points") {
  auto t = random_tensor(3, 3, 31);
  Perm id = {0, 1, 2};
  CHECK(permute(t, id).entries == t.entries);
  auto s = symmetrize(t);
  for (const Perm& p : all_perms(3)) {
    auto sp = permute(s, p);
    for (int64_t f = 0; f < s.size(); ++f)
      CHECK(sp.entries[size_t(f)] == doctest::Approx(s.entries[size_t(f)]).epsilon(1e-12));
  }
}

TEST_CASE("permute is a group action") {
  auto t = random_tensor(4, 3, 37);
  Rng rng(5, 5);
  auto perms = all_perms(4);
  for (int trial = 0; trial < 8; ++trial) {
    const Perm& pi = perms[rng.next_u32() % perms.size()];
    const Perm& rho = perms[rng.next_u32() % perms.size()];
    auto lhs = permute(t, compose_perm(pi, rho));
    auto rhs = permute(permute(t, rho), pi);
    CHECK(lhs.entries == rhs.entries);
  }
}

TEST_CASE("permute round-trips through the inverse") {
  auto t = random_tensor(4, 2, 41);
  for (const Perm& p : all_perms(4)) {
    auto back = permute(permute(t, p), inverse_perm(p));
    CHECK(back.entries == t.entries);
  }
}

TEST_CASE("permute rejects malformed permutations") {
  auto t = random_tensor(3, 2, 43);
  CHECK_THROWS(permute(t, Perm{0, 1}));
  CHECK_THROWS(permute(t, Perm{0, 0, 1}));
  CHECK_THROWS(permute(t, Perm{0, 1, 3}));
}

TEST_CASE("symmetrize matches the 6-term brute-force average and is idempotent") {
  auto t = random_tensor(3, 3, 47);
  auto s = symmetrize(t);
  std::vector<int> idx(3);
  for (int64_t f = 0; f < t.size(); ++f) {
    t.multi_index(f, idx);
    int i = idx[0], j = idx[1], k = idx[2];
    double avg = 0;
    int arr[6][3] = {{i, j, k}, {i, k, j}, {j, i, k}, {j, k, i}, {k, i, j}, {k, j, i}};
    for (auto& a : arr) avg += t.at(a);
    avg /= 6.0;
    CHECK(s.entries[size_t(f)] == doctest::Approx(avg).epsilon(1e-12));
  }
  auto ss = symmetrize(s);
  for (int64_t f = 0; f < s.size(); ++f)
    CHECK(ss.entries[size_t(f)] == doctest::Approx(s.entries[size_t(f)]).epsilon(1e-12));
}

TEST_CASE("symmetrize fixes rank-one tensors and commutes with permute") {
  Rng rng(51, 0);
  VectorXd v = rng.unit_sphere(3);
  auto r1 = rank_one(3, v, 2.0);
  auto s = symmetrize(r1);
  for (int64_t f = 0; f < r1.size(); ++f)
    CHECK(s.entries[size_t(f)] == doctest::Approx(r1.entries[size_t(f)]).epsilon(1e-12));

  auto t = random_tensor(3, 3, 53);
  Perm p = {2, 0, 1};
  auto a = symmetrize(permute(t, p));
  auto b = permute(symmetrize(t), p);
  for (int64_t f = 0; f < t.size(); ++f)
    CHECK(a.entries[size_t(f)] == doctest::Approx(b.entries[size_t(f)]).epsilon(1e-12));
}

TEST_CASE("eval_poly basics and naive-loop oracle") {
  Rng rng(57, 0);
  VectorXd v = rng.unit_sphere(4);
  auto r1 = rank_one(3, v);
  CHECK(eval_poly(r1, v) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eval_poly(r1, VectorXd::Zero(4)) == doctest::Approx(0.0));

  auto t = random_tensor(3, 4, 59);
  VectorXd x = rng.gaussian_vector(4);
  double naive = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        int idx[3] = {i, j, k};
        naive += t.at(idx) * x[i] * x[j] * x[k];
      }
  CHECK(eval_poly(t, x) == doctest::Approx(naive).epsilon(1e-10));
  CHECK_THROWS(eval_poly(t, VectorXd::Zero(5)));
}

TEST_CASE("eval_poly is invariant under symmetrize") {
  auto t = random_tensor(3, 5, 61);
  auto s = symmetrize(t);
  Rng rng(63, 0);
  for (int trial = 0; trial < 5; ++trial) {
    VectorXd x = rng.gaussian_vector(5);
    CHECK(eval_poly(t, x) == doctest::Approx(eval_poly(s, x)).epsilon(1e-9));
  }
}

TEST_CASE("expected_gram: n=1 and the |x|^4 identity") {
  MatrixXd e1 = expected_gram(1);
  REQUIRE(e1.rows() == 1);
  CHECK(e1(0, 0) == doctest::Approx(1.0));

  int n = 5;
  MatrixXd eg = expected_gram(n);
  Rng rng(65, 0);
  for (int trial = 0; trial < 5; ++trial) {
    VectorXd x = rng.gaussian_vector(n);
    VectorXd xx(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) xx[i * n + j] = x[i] * x[j];
    double quad = xx.dot((eg / double(n)) * xx);
    double nrm4 = std::pow(x.squaredNorm(), 2);
    CHECK(quad == doctest::Approx(nrm4).epsilon(1e-10));
  }
}

TEST_CASE("expected_gram matches the Monte-Carlo mean of sum_i A_i (x) A_i") {
  int n = 4;
  int reps = 10000;
  MatrixXd acc = MatrixXd::Zero(n * n, n * n);
  MatrixXd acc2 = MatrixXd::Zero(n * n, n * n);
  for (int r = 0; r < reps; ++r) {
    auto noise = gen_noise(n, 3, NoiseKind::iid_gaussian, 1000 + uint64_t(r));
    MatrixXd m = MatrixXd::Zero(n * n, n * n);
    for (int i = 1; i <= n; ++i) {
      MatrixXd ai = slice(noise, i);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c)
            for (int d = 0; d < n; ++d) m(a * n + c, b * n + d) += ai(a, b) * ai(c, d);
    }
    acc += m;
    acc2 += m.cwiseProduct(m);
  }
  MatrixXd mean = acc / double(reps);
  MatrixXd eg = expected_gram(n);
  int violations = 0;
  for (int r = 0; r < n * n; ++r)
    for (int c = 0; c < n * n; ++c) {
      double var = acc2(r, c) / reps - mean(r, c) * mean(r, c);
      double se = std::sqrt(std::max(var, 1e-12) / reps);
      if (std::abs(mean(r, c) - eg(r, c)) > 3.0 * se + 1e-9) ++violations;
    }
  // ~0.3% of entries may exceed 3 standard errors; allow a small margin
  CHECK(violations <= int(0.01 * n * n * n * n) + 2);
}

TEST_CASE("three index paths agree bit-exactly") {
  auto t = random_tensor(3, 4, 71);
  auto u = unfold(t);  // 4 x 16, rows = mode 1
  for (int i = 0; i < 4; ++i) {
    MatrixXd a = slice(t, i + 1);
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        int idx[3] = {i, j, k};
        double direct = t.at(idx);
        CHECK(direct == a(j, k));
        CHECK(direct == u.entry(i, j * 4 + k));
      }
  }
}
