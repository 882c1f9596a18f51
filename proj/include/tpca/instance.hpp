#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tpca/rng.hpp"
#include "tpca/tensor.hpp"

namespace tpca {

enum class NoiseKind { iid_gaussian, symmetric_gaussian, semi_random };

std::string to_string(NoiseKind k);
NoiseKind noise_kind_from_string(const std::string& s);

// T = tau * v0^{(x) k} + noise, with ground truth retained.
struct SpikedInstance {
  DenseTensor tensor;
  double tau = 0.0;
  VectorXd v0;
  NoiseKind noise_kind = NoiseKind::iid_gaussian;
  uint64_t seed = 0;
  uint64_t stream = 0;

  int n() const { return tensor.dim; }
  int k() const { return tensor.order; }
};

struct GenOptions {
  // Test hook: scales the noise tensor (0 gives the pure rank-one signal).
  double noise_scale = 1.0;
  // Caller-supplied signal direction; normalized if given.
  std::optional<VectorXd> v0;
  uint64_t stream = 0;
};

SpikedInstance gen_spiked(int n, int k, double tau, NoiseKind kind, uint64_t seed,
                          const GenOptions& opts = {});

// Pure-noise tensor (no instance wrapper), convenience for calibration runs.
DenseTensor gen_noise(int n, int k, NoiseKind kind, uint64_t seed, uint64_t stream = 0);

}  // namespace tpca
