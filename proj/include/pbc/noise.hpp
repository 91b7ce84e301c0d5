#pragma once

#include <cstdint>

#include "pbc/errors.hpp"

namespace pbc {

enum class NoiseLaw {
  uniform_symmetric,  // uniform on [-1, 1], nu fixed at 1
  log_skewed,         // exp(ln(nu+1) * ln(2*zeta) / ln 2) - 1, zeta uniform on (0,1)
};

// Iid perturbation stream on [-1, nu]. Sampling is counter based: the k-th
// draw of trajectory i is a pure function of (base_seed, i, k), so ensembles
// are reproducible under any execution order.
struct NoiseSpec {
  NoiseLaw law = NoiseLaw::uniform_symmetric;
  double nu = 1.0;
  uint64_t base_seed = kDefaultSeed;

  static constexpr uint64_t kDefaultSeed = 12345;

  static NoiseSpec uniform(uint64_t seed = kDefaultSeed);
  static NoiseSpec skewed(double nu, uint64_t seed = kDefaultSeed);
};

namespace rng {

// 64-bit finalizer (splitmix64 constants). All stream derivation runs
// through this mix; the constants are part of the output contract and are
// documented in the README.
inline uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

inline uint64_t stream_key(uint64_t base_seed, uint64_t trajectory_index) {
  return mix64(base_seed ^ mix64((trajectory_index + 1) * kGamma));
}

inline uint64_t word_at(uint64_t key, uint64_t counter) {
  return mix64(key + (counter + 1) * kGamma);
}

// 53-bit uniform in [0, 1).
inline double unit_at(uint64_t key, uint64_t counter) {
  return static_cast<double>(word_at(key, counter) >> 11) * 0x1.0p-53;
}

}  // namespace rng

// Deterministic substream for one trajectory. Value type; supports both
// sequential draws and random access by step index.
class SampleStream {
public:
  SampleStream(const NoiseSpec& spec, uint64_t trajectory_index);

  // Perturbation for the given step counter, in [-1, nu].
  double at(uint64_t counter) const;
  double next() { return at(counter_++); }

  // Underlying uniform driver in [0, 1); same counter sequence.
  double unit_at(uint64_t counter) const { return rng::unit_at(key_, counter); }

  uint64_t key() const { return key_; }

private:
  uint64_t key_;
  uint64_t counter_ = 0;
  NoiseLaw law_;
  double nu_;
};

SampleStream derive_stream(const NoiseSpec& spec, uint64_t trajectory_index);

// Distribution transforms, exposed for direct testing.
// uniform: xi = 2u - 1.
double uniform_symmetric_transform(double u);
// skewed: xi = exp(ln(nu+1) * ln(2*zeta) / ln 2) - 1; zeta = 0.5 maps to
// exactly 0 and half of the mass is negative. zeta is clamped to the open
// unit interval so the result stays finite.
double log_skewed_transform(double zeta, double nu);

}  // namespace pbc
