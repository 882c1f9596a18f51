#include "tpca/instance.hpp"

namespace tpca {

std::string to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::iid_gaussian: return "iid_gaussian";
    case NoiseKind::symmetric_gaussian: return "symmetric_gaussian";
    case NoiseKind::semi_random: return "semi_random";
  }
  return "unknown";
}

NoiseKind noise_kind_from_string(const std::string& s) {
  if (s == "iid_gaussian" || s == "iid") return NoiseKind::iid_gaussian;
  if (s == "symmetric_gaussian" || s == "symmetric") return NoiseKind::symmetric_gaussian;
  if (s == "semi_random" || s == "semirandom") return NoiseKind::semi_random;
  throw std::invalid_argument("unknown noise kind: " + s);
}

DenseTensor gen_noise(int n, int k, NoiseKind kind, uint64_t seed, uint64_t stream) {
  Rng rng(seed, derive_stream(stream, 0x6e6f697365ull));
  DenseTensor a(k, n);
  for (double& e : a.entries) e = rng.next_gaussian();
  if (kind == NoiseKind::symmetric_gaussian) a = symmetrize(a);
  return a;
}

SpikedInstance gen_spiked(int n, int k, double tau, NoiseKind kind, uint64_t seed,
                          const GenOptions& opts) {
  if (n < 2) throw std::invalid_argument("gen_spiked: n >= 2 required");
  if (k < 3) throw std::invalid_argument("gen_spiked: k >= 3 required");
  if (tau < 0) throw std::invalid_argument("gen_spiked: tau >= 0 required");
  if (kind == NoiseKind::semi_random)
    throw std::invalid_argument("gen_spiked: semi_random instances come from apply_semirandom");
  checked_pow(k, n);

  SpikedInstance inst;
  inst.tau = tau;
  inst.noise_kind = kind;
  inst.seed = seed;
  inst.stream = opts.stream;

  if (opts.v0) {
    if (int(opts.v0->size()) != n) throw std::invalid_argument("gen_spiked: v0 has wrong length");
    inst.v0 = opts.v0->normalized();
  } else {
    Rng rng(seed, derive_stream(opts.stream, 0x76307630ull));
    inst.v0 = rng.unit_sphere(n);
  }

  inst.tensor = gen_noise(n, k, kind, seed, opts.stream);
  if (opts.noise_scale != 1.0)
    for (double& e : inst.tensor.entries) e *= opts.noise_scale;

  if (tau != 0.0) {
    std::vector<int> idx(size_t(k), 0);
    for (int64_t f = 0; f < inst.tensor.size(); ++f) {
      inst.tensor.multi_index(f, idx);
      double p = tau;
      for (int m = 0; m < k; ++m) p *= inst.v0[idx[size_t(m)]];
      inst.tensor.entries[size_t(f)] += p;
    }
  }
  return inst;
}

}  // namespace tpca
