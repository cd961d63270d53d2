#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace fasbeam {

// Seedable generator with a pinned algorithm: std::mt19937_64 produces the
// same sequence on every conforming platform, and every variate transform
// below is implemented here rather than delegated to std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n) by rejection; n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  // Standard normal via the Box-Muller transform (cached second variate).
  double normal();

  // Circularly-symmetric complex Gaussian with E|z|^2 = 1.
  std::complex<double> complex_normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// SplitMix64 finaliser; bijective mixing of a 64-bit value.
std::uint64_t mix64(std::uint64_t x);

// Sub-seed for a numbered stream (draw index, trial index, epoch, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Named sub-seed: mix64(master ^ fnv1a64(name)).
std::uint64_t derive_seed(std::uint64_t master, std::string_view name);

std::uint64_t fnv1a64(std::string_view text);

}  // namespace fasbeam
