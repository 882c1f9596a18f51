#include "tpca/rng.hpp"

#include <cmath>

namespace tpca {

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(uint32_t ctr[4], const uint32_t key[2]) {
  uint64_t p0 = uint64_t(kPhiloxM0) * ctr[0];
  uint64_t p1 = uint64_t(kPhiloxM1) * ctr[2];
  uint32_t out[4];
  out[0] = uint32_t(p1 >> 32) ^ ctr[1] ^ key[0];
  out[1] = uint32_t(p1);
  out[2] = uint32_t(p0 >> 32) ^ ctr[3] ^ key[1];
  out[3] = uint32_t(p0);
  ctr[0] = out[0];
  ctr[1] = out[1];
  ctr[2] = out[2];
  ctr[3] = out[3];
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {}

void Rng::refill() {
  uint32_t ctr[4] = {uint32_t(counter_), uint32_t(counter_ >> 32),
                     uint32_t(stream_), uint32_t(stream_ >> 32)};
  uint32_t key[2] = {uint32_t(seed_), uint32_t(seed_ >> 32)};
  for (int r = 0; r < 10; ++r) {
    philox_round(ctr, key);
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  block_[0] = ctr[0];
  block_[1] = ctr[1];
  block_[2] = ctr[2];
  block_[3] = ctr[3];
  ++counter_;
  pos_ = 0;
}

uint32_t Rng::next_u32() {
  if (pos_ >= 4) refill();
  return block_[pos_++];
}

uint64_t Rng::next_u64() {
  uint64_t hi = next_u32();
  return (hi << 32) | next_u32();
}

double Rng::next_double() {
  // 53 random bits into [0,1)
  return double(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * next_double() - 1.0;
    v = 2.0 * next_double() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  have_spare_ = true;
  return u * m;
}

Eigen::VectorXd Rng::gaussian_vector(int n) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = next_gaussian();
  return x;
}

Eigen::MatrixXd Rng::gaussian_matrix(int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  // row-major fill so the draw order matches tensor entry order
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = next_gaussian();
  return m;
}

Eigen::VectorXd Rng::unit_sphere(int n) {
  Eigen::VectorXd x = gaussian_vector(n);
  double nrm = x.norm();
  while (nrm == 0.0) {
    x = gaussian_vector(n);
    nrm = x.norm();
  }
  return x / nrm;
}

Eigen::MatrixXd Rng::random_rotation(int n) {
  Eigen::MatrixXd g = gaussian_matrix(n, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd d = qr.matrixQR().diagonal();
  for (int i = 0; i < n; ++i)
    if (d[i] < 0) q.col(i) = -q.col(i);
  return q;
}

uint64_t derive_stream(uint64_t a, uint64_t b, uint64_t c, uint64_t d) {
  uint64_t h = splitmix64(a);
  h = splitmix64(h ^ (b + 0x517CC1B727220A95ull));
  h = splitmix64(h ^ (c + 0x2545F4914F6CDD1Dull));
  h = splitmix64(h ^ (d + 0x9E6C63D0876A9A47ull));
  return h;
}

}  // namespace tpca
