#pragma once

#include <cstdint>
#include <Eigen/Dense>

namespace tpca {

// Counter-based Philox4x32-10 stream. A (seed, stream) pair addresses an
// independent stream; draws are reproducible on any platform and a stream
// can be re-created cheaply to replay a single trial.
class Rng {
 public:
  Rng(uint64_t seed, uint64_t stream = 0);

  uint32_t next_u32();
  uint64_t next_u64();
  double next_double();    // uniform [0,1)
  double next_gaussian();  // N(0,1), Marsaglia polar

  Eigen::VectorXd gaussian_vector(int n);
  Eigen::MatrixXd gaussian_matrix(int rows, int cols);
  Eigen::VectorXd unit_sphere(int n);
  // Haar orthogonal matrix via QR of a Gaussian matrix, sign-fixed.
  Eigen::MatrixXd random_rotation(int n);

  uint64_t seed() const { return seed_; }
  uint64_t stream() const { return stream_; }

 private:
  void refill();

  uint64_t seed_ = 0;
  uint64_t stream_ = 0;
  uint64_t counter_ = 0;
  uint32_t block_[4] = {0, 0, 0, 0};
  int pos_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stable derivation of sub-stream ids from a base seed and labels, used to
// give every trial in a grid its own stream.
uint64_t derive_stream(uint64_t a, uint64_t b = 0, uint64_t c = 0, uint64_t d = 0);

}  // namespace tpca
